"""Step maps on [0, 1): finite approximations of the interval exchange of a subshift.

Two approximations are built from a factor table:

* ``build_T_n`` splits both axes into equal intervals indexed by the
  factors of lengths ``n`` and ``n - 1`` and sends the interval of ``v`` onto
  the interval of ``v[1:]`` (slope ``p(n) / p(n-1)``);
* ``build_T_part_n`` places the cylinders of the injectivity partition at
  their measured positions and translates each onto the cylinder of its
  shift (slope 1), leaving the residual left-special mass undefined.

The non-injectivity detector works on the symbolic side and only uses
measured positions to report where the collapsing points sit.
"""

from __future__ import annotations

import enum
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .language import (FactorTable, SpecialBranch, TableDepthError, build_factor_table,
                       trace_special_branches)
from .measure import (DEFAULT_EPS_FREQ, FrequencyMeasure, ValuationPoint,
                      estimate_frequencies, phi_mu_bracket)
from .ordering import Verdict, check_consecutive
from .substitution import thue_morse_substitution
from .words import format_word

DEFAULT_EPS_CLUSTER = 5 * DEFAULT_EPS_FREQ


class MapKind(enum.Enum):
    TLN = "TLn"
    TPART = "TPartN"
    CLASSICAL = "Classical"


@dataclass(frozen=True)
class Segment:
    """Affine piece sending ``[x0, x1)`` onto ``[y0, y0 + slope * (x1 - x0))``."""

    x0: float | Fraction
    x1: float | Fraction
    y0: float | Fraction
    slope: float | Fraction = 1
    label: bytes | None = None

    @property
    def y1(self):
        return self.y0 + self.slope * (self.x1 - self.x0)

    @property
    def length(self):
        return self.x1 - self.x0

    def __call__(self, x):
        return self.y0 + self.slope * (x - self.x0)


@dataclass(frozen=True)
class StepMap:
    segments: tuple[Segment, ...]
    kind: MapKind
    tolerance: float = 0
    _starts: list = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        tol = self.tolerance or 0  # keep exact coordinates exact
        for i, s in enumerate(segs):
            if not s.x0 < s.x1:
                raise ValueError(f"segment {i} has an empty or reversed source")
            if s.slope <= 0:
                raise ValueError(f"segment {i} has non-positive slope {s.slope}")
            if s.x0 < 0 or s.x1 > 1 or s.y0 < -tol or s.y1 > 1 + tol:
                raise ValueError(f"segment {i} leaves the unit square")
            if i and segs[i - 1].x1 > s.x0 + tol:
                raise ValueError(f"segments {i - 1} and {i} overlap or are out of order")
        object.__setattr__(self, "_starts", [s.x0 for s in segs])

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def locate(self, x) -> int | None:
        i = bisect_right(self._starts, x) - 1
        if i >= 0 and x < self.segments[i].x1:
            return i
        return None

    @property
    def domain_measure(self):
        return sum(s.length for s in self.segments)


def evaluate(mp: StepMap, x):
    """Image of ``x``, or ``None`` when ``x`` falls in a gap of the map."""
    if not 0 <= x < 1:
        raise ValueError(f"{x} is outside [0, 1)")
    i = mp.locate(x)
    return None if i is None else mp.segments[i](x)


def evaluate_many(mp: StepMap, xs) -> np.ndarray:
    """Float images of an array of abscissae, ``nan`` in gaps."""
    xs = np.asarray(xs, dtype=float)
    if xs.size and (xs.min() < 0 or xs.max() >= 1):
        raise ValueError("abscissae must lie in [0, 1)")
    x0 = np.array([float(s.x0) for s in mp.segments])
    x1 = np.array([float(s.x1) for s in mp.segments])
    y0 = np.array([float(s.y0) for s in mp.segments])
    slope = np.array([float(s.slope) for s in mp.segments])
    i = np.searchsorted(x0, xs, side="right") - 1
    ok = (i >= 0) & (xs < x1[np.maximum(i, 0)])
    j = np.maximum(i, 0)
    return np.where(ok, y0[j] + slope[j] * (xs - x0[j]), np.nan)


def build_T_n(t: FactorTable, n: int) -> StepMap:
    """Equal-length approximation with ``p(n)`` sources and ``p(n-1)`` targets (exact)."""
    if not 2 <= n <= t.max_len:
        raise TableDepthError(f"n must lie in 2..{t.max_len}, got {n}")
    sources = t.factors(n)
    targets = t.factors(n - 1)
    p, q = len(sources), len(targets)
    slope = Fraction(p, q)
    segs = [Segment(Fraction(i, p), Fraction(i + 1, p),
                    Fraction(bisect_left(targets, v[1:]), q), slope, v)
            for i, v in enumerate(sources)]
    return StepMap(tuple(segs), MapKind.TLN)


def von_neumann_kakutani(b: int, levels: int) -> StepMap:
    """First ``levels`` pieces of ``x -> x - 1 + b**-k + b**-(k+1)`` on ``[1 - b**-k, 1 - b**-(k+1))``."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    segs = []
    for k in range(levels):
        x0 = 1 - Fraction(1, b ** k)
        x1 = 1 - Fraction(1, b ** (k + 1))
        segs.append(Segment(x0, x1, x0 - 1 + Fraction(1, b ** k) + Fraction(1, b ** (k + 1))))
    return StepMap(tuple(segs), MapKind.CLASSICAL)


def classical_iet(lengths: Sequence, permutation: Sequence[int]) -> StepMap:
    """Finite exchange of intervals of the given lengths; ``permutation[i]`` is the
    position of interval ``i`` after the exchange."""
    lengths = [Fraction(x) for x in lengths]
    total = sum(lengths)
    if total != 1:
        raise ValueError("interval lengths must sum to 1")
    if sorted(permutation) != list(range(len(lengths))):
        raise ValueError("not a permutation")
    order = sorted(range(len(lengths)), key=lambda i: permutation[i])
    image_start, y = {}, Fraction(0)
    for i in order:
        image_start[i] = y
        y += lengths[i]
    segs, x = [], Fraction(0)
    for i, ln in enumerate(lengths):
        segs.append(Segment(x, x + ln, image_start[i]))
        x += ln
    return StepMap(tuple(segs), MapKind.CLASSICAL)


@dataclass
class InjectivityReport:
    injective_on_segments: bool
    image_gaps: list[tuple]
    overlaps: list[tuple[int, int, tuple]]
    multiplicity: dict[str, int] = field(default_factory=dict)


def analyze_injectivity(mp: StepMap, grid: int = 0, tol: float = 0) -> InjectivityReport:
    """Overlaps between segment images and gaps in ``[0, 1)`` left uncovered.

    Interval arithmetic is exact for exact coordinates (``Fraction``);
    ``tol`` discards overlaps and gaps no longer than it.  With ``grid > 0``
    the number of preimages of the ordinates ``(k + 1/2) / grid`` is also
    tallied.
    """
    order = sorted(range(len(mp)), key=lambda i: (mp.segments[i].y0, i))
    overlaps = []
    active: list[int] = []
    for i in order:
        s = mp.segments[i]
        active = [j for j in active if mp.segments[j].y1 > s.y0 + tol]
        for j in active:
            hi = min(mp.segments[j].y1, s.y1)
            if hi - s.y0 > tol:
                overlaps.append((min(i, j), max(i, j), (s.y0, hi)))
        active.append(i)
    gaps = []
    reach = 0
    for i in order:
        s = mp.segments[i]
        if s.y0 - reach > tol:
            gaps.append((reach, s.y0))
        reach = max(reach, s.y1)
    if 1 - reach > tol:
        gaps.append((reach, 1))
    multiplicity = {}
    if grid:
        y0 = np.array([float(mp.segments[i].y0) for i in order])
        y1 = np.array([float(mp.segments[i].y1) for i in order])
        ys = (np.arange(grid) + 0.5) / grid
        counts = ((ys[:, None] >= y0[None, :]) & (ys[:, None] < y1[None, :])).sum(axis=1) \
            if len(order) * grid <= 5e7 else np.array([((y >= y0) & (y < y1)).sum() for y in ys])
        multiplicity = {"0": int((counts == 0).sum()), "1": int((counts == 1).sum()),
                        "2+": int((counts >= 2).sum())}
    return InjectivityReport(not overlaps, gaps, overlaps, multiplicity)


def fan_in(mp: StepMap) -> dict:
    """Number of segments per distinct image start."""
    out: dict = {}
    for s in mp.segments:
        out[s.y0] = out.get(s.y0, 0) + 1
    return out


def is_piecewise_increasing(mp: StepMap) -> bool:
    """Within each first-letter group of labels, sources and images strictly increase."""
    groups: dict[int, list[Segment]] = {}
    for s in mp.segments:
        if s.label is None:
            raise ValueError("segments need factor labels to be grouped by first letter")
        groups.setdefault(s.label[0], []).append(s)
    for segs in groups.values():
        for a, b in zip(segs, segs[1:]):
            if not (a.x0 < b.x0 and a.y0 < b.y0):
                return False
    return True


# ---------------------------------------------------------------------------
# injectivity partition


@dataclass(frozen=True)
class PlanEntry:
    factor: bytes
    measure: float
    lower: float
    upper: float


@dataclass(frozen=True)
class ResidualBranch:
    """A leftover factor matched to ``letter . branch``."""

    word: bytes
    letter: int
    branch: SpecialBranch


@dataclass
class PartitionPlan:
    max_len: int
    selected: list[PlanEntry]
    residual: list[bytes]
    residual_branches: list[ResidualBranch]
    pending: list[bytes]

    @property
    def selected_mass(self) -> float:
        return float(sum(e.measure for e in self.selected))

    @property
    def residual_mass(self) -> float:
        return 1.0 - self.selected_mass


def cylinder_bracket(f: FrequencyMeasure, v: bytes) -> ValuationPoint:
    """Bracket of ``v`` read off the finest measured partition.

    Brackets of factors of different lengths computed this way tile
    exactly, which the per-length estimates only do up to ``~ n / window``.
    """
    t = f.table
    r = f.resolution
    if len(v) > r:
        raise TableDepthError(f"factor of length {len(v)} exceeds the resolution {r}")
    t.require(v)
    st = t.starts(r)
    lo_top = bisect_left(t.top, v)
    hi_top = bisect_left(t.top, v[:-1] + bytes([v[-1] + 1])) if v else len(t.top)
    i0 = int(np.searchsorted(st, lo_top))
    i1 = int(np.searchsorted(st, hi_top))
    lower = f.lower_bounds(r)
    freqs = f.frequencies(r)
    lo = float(lower[i0])
    hi = min(float(lower[i1 - 1] + freqs[i1 - 1]), 1.0)  # rounding in the cumulative sum
    return ValuationPoint(v, lo, hi)


def build_part_L(t: FactorTable, f: FrequencyMeasure | None, max_len: int,
                 branches: Sequence[SpecialBranch] | None = None) -> PartitionPlan:
    """Select cylinders ``x.u`` with ``u`` not left special, lengths ``2..max_len``.

    Factors still unselected at ``max_len`` form the residual; when
    ``branches`` are given each residual word is matched to a left
    extension ``a.w`` of a traced infinite left special branch, and the
    others (finite left special branches that die later) are ``pending``.
    """
    if max_len < 2:
        raise ValueError(f"max_len must be >= 2, got {max_len}")
    if max_len + 2 > t.max_len:
        raise TableDepthError(f"a partition up to length {max_len} needs table depth "
                              f"{max_len + 2}, have {t.max_len}")
    if f is not None and f.resolution < max_len:
        raise TableDepthError(f"measure resolution {f.resolution} is below {max_len}")
    chosen: list[bytes] = []
    unselected: list[bytes] = []
    for v in t.factors(2):
        (unselected if t.is_left_special(v[1:]) else chosen).append(v)
    for _ in range(3, max_len + 1):
        nxt = []
        for v in unselected:
            for b in range(t.m):
                vb = v + bytes([b])
                if vb not in t:
                    continue
                (nxt if t.is_left_special(vb[1:]) else chosen).append(vb)
        unselected = nxt
    chosen.sort()
    entries = []
    for v in chosen:
        if f is None:
            entries.append(PlanEntry(v, float("nan"), float("nan"), float("nan")))
        else:
            br = cylinder_bracket(f, v)
            entries.append(PlanEntry(v, br.upper - br.lower, br.lower, br.upper))
    residual = sorted(unselected)
    matched, pending = [], []
    if branches is not None:
        for r in residual:
            hit = next((b for b in branches if b.prefix[:len(r) - 1] == r[1:]), None)
            if hit is None:
                pending.append(r)
            else:
                matched.append(ResidualBranch(r, r[0], hit))
    return PartitionPlan(max_len, entries, residual, matched, pending)


def build_T_part_n(t: FactorTable, f: FrequencyMeasure, plan: PartitionPlan,
                   eps_freq: float = DEFAULT_EPS_FREQ) -> StepMap:
    """Slope-1 map translating each selected cylinder onto the cylinder of its shift.

    Sources sharing an image factor are stacked in lexicographic order; a
    stack overflowing the image bracket by more than ``eps_freq`` is an
    error naming the offending factor.
    """
    if f.table is not t:
        raise ValueError("measure and plan must come from the same factor table")
    stacked: dict[bytes, float] = {}
    segs = []
    for e in plan.selected:
        image = e.factor[1:]
        br = cylinder_bracket(f, image)
        offset = stacked.get(image, 0.0)
        width = e.upper - e.lower
        if offset + width > (br.upper - br.lower) + eps_freq:
            raise ValueError(f"sources stacked on {format_word(image, t.m)} overflow its "
                             f"bracket at {format_word(e.factor, t.m)}")
        stacked[image] = offset + width
        segs.append(Segment(e.lower, e.upper, br.lower + offset, 1.0, e.factor))
    segs.sort(key=lambda s: s.x0)
    return StepMap(tuple(segs), MapKind.TPART, tolerance=eps_freq)


# ---------------------------------------------------------------------------
# non-injectivity


@dataclass(frozen=True)
class NonInjectivityPoint:
    x: float
    err: float
    source: str
    word: bytes
    image: float
    image_err: float


@dataclass(frozen=True)
class Cluster:
    image: float
    err: float
    members: tuple[str, ...]


@dataclass
class NonInjectivityReport:
    m: int
    depth: int
    resolution: int
    points: list[NonInjectivityPoint]
    clusters: list[Cluster]
    discarded: list[str]
    verdicts: list[dict]
    pending: int
    separated: bool
    theorem_check: bool

    @property
    def counts(self) -> tuple[int, int]:
        return len(self.points), len(self.clusters)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "depth": self.depth,
            "points": [{"x": p.x, "err": p.err, "source": p.source} for p in self.points],
            "clusters": [{"image": c.image, "err": c.err, "members": list(c.members)}
                         for c in self.clusters],
            "counts": {"points": len(self.points), "images": len(self.clusters)},
            "theorem_check": self.theorem_check,
        }


class PipelineError(RuntimeError):
    """A stage of the verification pipeline failed."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage


def _branch_name(branch: SpecialBranch, index: int) -> str:
    return f"w{branch.seed}" if branch.seed is not None else f"b{index}"


def detect_non_injectivity(t: FactorTable, f: FrequencyMeasure, plan: PartitionPlan,
                           branches: Sequence[SpecialBranch], depth: int,
                           eps_cluster: float = DEFAULT_EPS_CLUSTER) -> NonInjectivityReport:
    """Collapse points ``a.w`` of the traced branches, clustered by common image.

    Left extensions that are the smaller member of a consecutive pair
    (certified to ``depth``) have no point of their own and are dropped.
    """
    m = t.m
    if any(b.depth < depth - 1 for b in branches):
        raise TableDepthError(f"branches must be traced to depth >= {depth - 1}")
    words: list[tuple[bytes, str]] = []
    for k, b in enumerate(branches):
        for a in sorted(b.lext_letters):
            words.append((bytes([a]) + b.prefix[:depth - 1], f"{a}{_branch_name(b, k)}"))
    words.sort()
    discarded: set[bytes] = set()
    verdicts = []
    for (lo, lo_name), (hi, hi_name) in zip(words, words[1:]):
        v = check_consecutive(t, lo, hi, depth)
        verdicts.append({"pair": [lo_name, hi_name], "verdict": v.verdict.value,
                         "certified_depth": v.certified_depth})
        if v.verdict is Verdict.UNKNOWN:
            raise ValueError(f"consecutivity of ({lo_name}, {hi_name}) is undecided at depth "
                             f"{depth}; certify deeper")
        if v.verdict is Verdict.CONSECUTIVE_TO_DEPTH:
            discarded.add(lo)
    r = f.resolution
    points = []
    for word, name in words:
        if word in discarded:
            continue
        x = phi_mu_bracket(f, word[:r])
        y = phi_mu_bracket(f, word[1:r])
        points.append(NonInjectivityPoint(x.midpoint, x.half_width, name, word,
                                          y.midpoint, y.half_width))
    clusters: list[list[NonInjectivityPoint]] = []
    for p in sorted(points, key=lambda p: (p.image, p.x)):
        if clusters and p.image - clusters[-1][-1].image <= eps_cluster:
            clusters[-1].append(p)
        else:
            clusters.append([p])
    out_clusters = []
    for members in clusters:
        images = [p.image for p in members]
        out_clusters.append(Cluster(float(np.mean(images)),
                                    max(p.image_err for p in members) + (max(images) - min(images)),
                                    tuple(p.source for p in sorted(members, key=lambda p: p.x))))
    xs = sorted(p.x for p in points)
    separated = all(b - a > eps_cluster for a, b in zip(xs, xs[1:]))
    # every residual word of the partition must sit on a traced branch or be pending
    pending = len(plan.pending)
    on_branch = all(any(w.startswith(res) for w, _ in words) for res in
                    (rb.word for rb in plan.residual_branches))
    points.sort(key=lambda p: p.x)
    theorem_check = (len(points) == m * (m - 1) and len(out_clusters) == m - 1
                     and all(len(c.members) == m for c in out_clusters)
                     and separated and on_branch)
    return NonInjectivityReport(m, depth, r, points, out_clusters,
                                sorted(name for w, name in words if w in discarded),
                                verdicts, pending, separated, theorem_check)


def verify_theorem(m: int, depth: int = 200, resolution: int = 10,
                   window: int | None = None,
                   eps_cluster: float = DEFAULT_EPS_CLUSTER) -> NonInjectivityReport:
    """Run the whole pipeline on the Thue-Morse subshift over ``m`` letters."""
    stage = "substitution"
    try:
        s = thue_morse_substitution(m)
        stage = "table"
        t = build_factor_table(s, max(2 * depth + 1, resolution + 2))
        stage = "branches"
        branches = trace_special_branches(t, depth)
        stage = "measure"
        f = estimate_frequencies(t, resolution, window)
        stage = "plan"
        plan = build_part_L(t, f, resolution, branches)
        stage = "detect"
        return detect_non_injectivity(t, f, plan, branches, depth, eps_cluster)
    except Exception as exc:
        raise PipelineError(stage, exc) from exc
