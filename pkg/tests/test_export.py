import json
import xml.etree.ElementTree as ET

import pytest

from tmiet.export import (CSV_HEADER, report_to_json, stepmap_from_csv, stepmap_to_csv,
                          stepmap_to_svg)
from tmiet.iet import build_T_n, verify_theorem, von_neumann_kakutani

from conftest import tm_table

SVG = "{http://www.w3.org/2000/svg}"


def test_csv_layout():
    text = stepmap_to_csv(von_neumann_kakutani(2, 5))
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "0,0.5,0.5,1"
    assert len(lines) == 6


def test_csv_round_trip_keeps_17_digits():
    mp = build_T_n(tm_table(3, 8), 8)
    back = stepmap_from_csv(stepmap_to_csv(mp))
    assert len(back) == len(mp)
    for a, b in zip(mp.segments, back.segments):
        assert float(a.x0) == b.x0 and float(a.y0) == b.y0 and float(a.slope) == b.slope


def test_csv_rejects_garbage():
    with pytest.raises(ValueError):
        stepmap_from_csv("0,1,0,1\n")
    with pytest.raises(ValueError):
        stepmap_from_csv(CSV_HEADER + "\n0,1,0\n")


def test_svg_has_one_line_per_segment():
    mp = build_T_n(tm_table(2, 6), 6)
    root = ET.fromstring(stepmap_to_svg(mp, marks=[0.25, 0.5]))
    segs = root.find(f"{SVG}g[@class='segments']")
    assert len(segs.findall(f"{SVG}line")) == len(mp)
    assert len(root.find(f"{SVG}g[@class='marks']").findall(f"{SVG}line")) == 2
    # y grows upwards: the first segment of the vNK map starts at ordinate 1/2
    first = ET.fromstring(stepmap_to_svg(von_neumann_kakutani(2, 2), size=120, margin=10))
    line = first.find(f"{SVG}g").find(f"{SVG}line")
    assert float(line.get("y1")) == pytest.approx(60.0)


def test_report_json_fields():
    doc = json.loads(report_to_json(verify_theorem(2, depth=60, resolution=10)))
    assert set(doc) == {"m", "depth", "points", "clusters", "counts", "theorem_check"}
    assert doc["counts"] == {"points": 2, "images": 1}
    assert set(doc["points"][0]) == {"x", "err", "source"}
    assert doc["clusters"][0]["members"] == ["0w1", "1w1"]
