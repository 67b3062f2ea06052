"""Text emission of step maps and reports: CSV, TSV, SVG and JSON."""

from __future__ import annotations

import json
from typing import Iterable

from .iet import MapKind, NonInjectivityReport, Segment, StepMap

CSV_HEADER = "# tmiet-stepmap v1"


def _num(x) -> str:
    return format(float(x), ".17g")


def stepmap_to_csv(mp: StepMap, sep: str = ",") -> str:
    """One line per segment, ``x_start,x_end,y_start,slope``, after a header line."""
    lines = [CSV_HEADER]
    lines.extend(sep.join(_num(v) for v in (s.x0, s.x1, s.y0, s.slope)) for s in mp.segments)
    return "\n".join(lines) + "\n"


def stepmap_from_csv(text: str, kind: MapKind = MapKind.CLASSICAL, sep: str = ",") -> StepMap:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError(f"missing header line {CSV_HEADER!r}")
    segs = []
    for k, line in enumerate(lines[1:], start=2):
        parts = line.split(sep)
        if len(parts) != 4:
            raise ValueError(f"line {k}: expected 4 fields, got {len(parts)}")
        x0, x1, y0, slope = map(float, parts)
        segs.append(Segment(x0, x1, y0, slope))
    return StepMap(tuple(segs), kind, tolerance=1e-12)


def stepmap_to_svg(mp: StepMap, size: int = 600, margin: int = 20,
                   marks: Iterable[float] = (), title: str = "") -> str:
    """Graph of the map in the unit square; ``marks`` are abscissae drawn as ticks."""
    scale = size - 2 * margin

    def px(x):
        return f"{margin + float(x) * scale:.3f}"

    def py(y):
        return f"{margin + (1 - float(y)) * scale:.3f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    if title:
        out.append(f"<title>{title}</title>")
    out.append(f'<rect x="{margin}" y="{margin}" width="{scale}" height="{scale}" '
               'fill="none" stroke="#888" stroke-width="1"/>')
    out.append('<g class="segments" stroke="#000" stroke-width="1.5">')
    for s in mp.segments:
        out.append(f'<line x1="{px(s.x0)}" y1="{py(s.y0)}" x2="{px(s.x1)}" y2="{py(s.y1)}"/>')
    out.append("</g>")
    marks = list(marks)
    if marks:
        out.append('<g class="marks" stroke="#c00" stroke-width="1">')
        for x in marks:
            out.append(f'<line x1="{px(x)}" y1="{size - margin}" x2="{px(x)}" '
                       f'y2="{size - margin + 6}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def report_to_json(report: NonInjectivityReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=False) + "\n"
