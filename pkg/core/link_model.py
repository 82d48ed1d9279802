"""
Piecewise-linear links
Exact polygonal curves with validation, file I/O, perturbation and
general-position diagnostics
"""
import sys
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from config import LINK_FORMAT_VERSION
from core.predicates import (Point3, Segment3, Exact, exact_sign, collinear3,
                             segments_intersect, vsub, vdot)
from core.utils import get_logger, child_rng, parse_rational, format_rational

logger = get_logger("link_model", "link_model.log")

# Perturbation jitter resolution: offsets are k / 2**20 of the magnitude
JITTER_BITS = 20


class LinkParseError(ValueError):
    """Malformed link document"""


class LinkValidationError(ValueError):
    """A PolyLink invariant is violated; `witness` names the offending edges"""

    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message)
        self.witness = witness


class PerturbationError(ValueError):
    """Requested jitter is too large for the link's feature separation"""

    def __init__(self, message: str, separation: float):
        super().__init__(message)
        self.separation = separation


@dataclass(frozen=True)
class LinkPoint:
    """Intrinsic coordinate of a link point; vertices belong to the edge starting there"""
    component: int
    edge: int
    t: Exact

    def __post_init__(self):
        if not isinstance(self.t, (Fraction, int)) and not hasattr(self.t, "sign"):
            raise TypeError(f"edge parameter must be exact, got {type(self.t).__name__}")
        if isinstance(self.t, int):
            object.__setattr__(self, "t", Fraction(self.t))
        if exact_sign(self.t) < 0 or exact_sign(self.t - 1) >= 0:
            raise ValueError(f"edge parameter {float(self.t)} outside [0, 1)")

    def sort_key(self) -> tuple:
        return (self.component, self.edge, float(self.t))


@dataclass(frozen=True)
class EdgeRef:
    """One edge of the link with its global index"""
    index: int
    component: int
    edge: int
    segment: Segment3


def _default_labels(count: int) -> Tuple[str, ...]:
    return tuple(chr(ord("A") + i) if i < 26 else f"C{i}" for i in range(count))


@dataclass(frozen=True)
class PolyLink:
    """
    Multi-component closed polygon with exact rational vertices.

    Construction validates every invariant exactly and raises
    LinkValidationError with witness edges on the first violation.
    """
    components: Tuple[Tuple[Point3, ...], ...]
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        comps = tuple(tuple(v if isinstance(v, Point3) else Point3.of(*v) for v in c)
                      for c in self.components)
        object.__setattr__(self, "components", comps)
        labels = tuple(self.labels) if self.labels else _default_labels(len(comps))
        if len(labels) != len(comps):
            raise LinkValidationError(f"{len(labels)} labels for {len(comps)} components")
        object.__setattr__(self, "labels", labels)
        validate_link(self)

    # ============ Structure ============

    @property
    def n_components(self) -> int:
        return len(self.components)

    def edge_count(self, component: int) -> int:
        return len(self.components[component])

    @cached_property
    def edges(self) -> Tuple[EdgeRef, ...]:
        """All edges in (component, edge) order; index is the global edge id"""
        refs = []
        for c, verts in enumerate(self.components):
            n = len(verts)
            for e in range(n):
                refs.append(EdgeRef(len(refs), c, e, Segment3(verts[e], verts[(e + 1) % n])))
        return tuple(refs)

    @cached_property
    def _offsets(self) -> Tuple[int, ...]:
        offsets, total = [], 0
        for verts in self.components:
            offsets.append(total)
            total += len(verts)
        return tuple(offsets)

    def edge_index(self, component: int, edge: int) -> int:
        return self._offsets[component] + edge

    def segment(self, component: int, edge: int) -> Segment3:
        return self.edges[self.edge_index(component, edge)].segment

    def component_edges(self, component: int) -> Tuple[EdgeRef, ...]:
        start = self._offsets[component]
        return self.edges[start:start + self.edge_count(component)]

    def adjacent(self, g1: int, g2: int) -> bool:
        """Distinct edges sharing a vertex"""
        a, b = self.edges[g1], self.edges[g2]
        if a.component != b.component or g1 == g2:
            return False
        n = self.edge_count(a.component)
        return (a.edge + 1) % n == b.edge or (b.edge + 1) % n == a.edge

    def point(self, lp: LinkPoint) -> tuple:
        if not 0 <= lp.component < self.n_components:
            raise IndexError(f"component {lp.component} out of range")
        if not 0 <= lp.edge < self.edge_count(lp.component):
            raise IndexError(f"edge {lp.edge} out of range")
        return self.segment(lp.component, lp.edge).at(lp.t)

    @cached_property
    def vertex_array(self) -> np.ndarray:
        return np.array([v.f for verts in self.components for v in verts], dtype=np.float64)

    def diameter(self) -> Fraction:
        """Largest bounding-box extent, exact"""
        verts = [v for c in self.components for v in c]
        return max(max(getattr(v, a) for v in verts) - min(getattr(v, a) for v in verts)
                   for a in ("x", "y", "z"))

    # ============ Chart parameters ============

    @cached_property
    def _arclength(self) -> Tuple[np.ndarray, ...]:
        tables = []
        for c in range(self.n_components):
            lengths = np.array([np.linalg.norm(np.subtract(r.segment.b.f, r.segment.a.f))
                                for r in self.component_edges(c)])
            tables.append(np.concatenate([[0.0], np.cumsum(lengths)]))
        return tuple(tables)

    def component_length(self, component: int) -> float:
        return float(self._arclength[component][-1])

    def chart_param(self, lp: LinkPoint) -> float:
        """Arclength-normalized circle parameter in [0, 1)"""
        table = self._arclength[lp.component]
        s = table[lp.edge] + float(lp.t) * (table[lp.edge + 1] - table[lp.edge])
        value = s / table[-1]
        return value - 1.0 if value >= 1.0 else value


# ============ Validation ============

def _bbox_overlaps(link: PolyLink) -> np.ndarray:
    lo = np.array([r.segment.bbox()[0] for r in link.edges])
    hi = np.array([r.segment.bbox()[1] for r in link.edges])
    scale = max(1.0, float(np.abs(np.concatenate([lo, hi])).max()))
    slack = 1e-9 * scale
    return np.all((lo[:, None, :] <= hi[None, :, :] + slack)
                  & (lo[None, :, :] <= hi[:, None, :] + slack), axis=2)


def validate_link(link: PolyLink):
    """Exact invariant check; raises LinkValidationError on the first violation"""
    if not link.components:
        raise LinkValidationError("link has no components")
    for c, verts in enumerate(link.components):
        if len(verts) < 3:
            raise LinkValidationError(f"component {c} has {len(verts)} vertices (need >= 3)", (c,))
        for i in range(len(verts)):
            if verts[i] == verts[(i + 1) % len(verts)]:
                raise LinkValidationError(
                    f"component {c}: consecutive vertices {i} and {(i + 1) % len(verts)} coincide",
                    ((c, i), (c, (i + 1) % len(verts))))

    edges = link.edges
    overlaps = _bbox_overlaps(link)
    for g1 in range(len(edges)):
        for g2 in range(g1 + 1, len(edges)):
            e1, e2 = edges[g1], edges[g2]
            if link.adjacent(g1, g2):
                _check_adjacent(e1, e2)
                continue
            if not overlaps[g1, g2]:
                continue
            if segments_intersect(e1.segment, e2.segment):
                raise LinkValidationError(
                    f"edges ({e1.component},{e1.edge}) and ({e2.component},{e2.edge}) intersect",
                    ((e1.component, e1.edge), (e2.component, e2.edge)))


def _check_adjacent(e1: EdgeRef, e2: EdgeRef):
    """Adjacent edges may only meet at their shared vertex"""
    s1, s2 = e1.segment, e2.segment
    for shared in (s1.a, s1.b):
        if shared in (s2.a, s2.b):
            a = s1.b if shared == s1.a else s1.a
            b = s2.b if shared == s2.a else s2.a
            if collinear3(a, shared, b) and vdot(vsub(a, shared), vsub(b, shared)) > 0:
                raise LinkValidationError(
                    f"adjacent edges ({e1.component},{e1.edge}) and ({e2.component},{e2.edge}) fold back",
                    ((e1.component, e1.edge), (e2.component, e2.edge)))


# ============ File format ============

def load_link(document: str) -> PolyLink:
    """
    Parse a link document.

    Format (JSON text):
        {"version": 1, "labels": ["A", ...],
         "components": [[["0", "0.5", "1/3"], ...], ...]}

    Coordinates are decimal or p/q strings and are read exactly.
    """
    try:
        data = json.loads(document, parse_float=Fraction)
    except json.JSONDecodeError as e:
        raise LinkParseError(f"not a link document: {e}") from e
    if not isinstance(data, dict) or "components" not in data:
        raise LinkParseError("missing 'components'")
    version = data.get("version")
    if not isinstance(version, int) or version < 1 or version > LINK_FORMAT_VERSION:
        raise LinkParseError(f"unsupported link format version {version!r}")
    components = []
    try:
        for c, comp in enumerate(data["components"]):
            verts = []
            for v in comp:
                if len(v) != 3:
                    raise LinkParseError(f"component {c}: vertex {v!r} is not a triple")
                verts.append(Point3(*(parse_rational(x) for x in v)))
            components.append(verts)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        if isinstance(e, LinkParseError):
            raise
        raise LinkParseError(f"bad coordinate: {e}") from e
    labels = tuple(data.get("labels") or ())
    return PolyLink(components=tuple(tuple(c) for c in components), labels=labels)


def save_link(link: PolyLink) -> str:
    """Canonical writer: one vertex per line, exact decimal strings"""
    lines = ["{", '  "components": [']
    for c, verts in enumerate(link.components):
        lines.append("    [")
        rows = [json.dumps([format_rational(x) for x in v.xyz]) for v in verts]
        lines.append(",\n".join("      " + r for r in rows))
        lines.append("    ]" + ("," if c < link.n_components - 1 else ""))
    lines.append("  ],")
    lines.append(f'  "labels": {json.dumps(list(link.labels))},')
    lines.append(f'  "version": {LINK_FORMAT_VERSION}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_link(path: Union[str, Path]) -> PolyLink:
    with open(path, "r", encoding="utf-8") as f:
        return load_link(f.read())


def write_link(link: PolyLink, path: Union[str, Path]):
    with open(path, "w", encoding="utf-8") as f:
        f.write(save_link(link))


# ============ Perturbation ============

def _segment_distance(p1: np.ndarray, q1: np.ndarray, p2: np.ndarray, q2: np.ndarray) -> float:
    """Closest distance between two 3D segments (clamped parametric form)"""
    d1, d2, r = q1 - p1, q2 - p2, p1 - p2
    a, e, f = float(d1 @ d1), float(d2 @ d2), float(d2 @ r)
    tiny = 1e-300
    if a <= tiny and e <= tiny:
        return float(np.linalg.norm(r))
    if a <= tiny:
        s, t = 0.0, float(np.clip(f / e, 0.0, 1.0))
    else:
        c = float(d1 @ r)
        if e <= tiny:
            s, t = float(np.clip(-c / a, 0.0, 1.0)), 0.0
        else:
            b = float(d1 @ d2)
            denom = a * e - b * b
            s = float(np.clip((b * f - c * e) / denom, 0.0, 1.0)) if denom > tiny else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t, s = 0.0, float(np.clip(-c / a, 0.0, 1.0))
            elif t > 1.0:
                t, s = 1.0, float(np.clip((b - c) / a, 0.0, 1.0))
    return float(np.linalg.norm((p1 + d1 * s) - (p2 + d2 * t)))


def feature_separation(link: PolyLink) -> float:
    """
    Smallest geometric feature of the link: distances between non-adjacent
    edges, edge lengths, and vertex-to-neighbour-edge distances.
    """
    ends = [(np.array(r.segment.a.f), np.array(r.segment.b.f)) for r in link.edges]
    best = min(float(np.linalg.norm(b - a)) for a, b in ends)
    for g1 in range(len(ends)):
        for g2 in range(g1 + 1, len(ends)):
            (p1, q1), (p2, q2) = ends[g1], ends[g2]
            if link.adjacent(g1, g2):
                # far endpoints against the neighbouring edge
                shared_at_q1 = np.array_equal(q1, p2) or np.array_equal(q1, q2)
                far1 = p1 if shared_at_q1 else q1
                far2 = q2 if (np.array_equal(p2, q1) or np.array_equal(p2, p1)) else p2
                best = min(best,
                           _segment_distance(far1, far1, p2, q2),
                           _segment_distance(far2, far2, p1, q1))
                continue
            best = min(best, _segment_distance(p1, q1, p2, q2))
    return best


def perturb(link: PolyLink, magnitude, seed: int) -> PolyLink:
    """
    Jitter every vertex by a seed-derived rational vector of Euclidean
    length <= magnitude.

    Every point of an edge then moves by at most magnitude along the
    straight-line homotopy, so two features closer than the separation can
    lose at most 2 * magnitude of their distance and the isotopy class is kept.

    Raises:
        PerturbationError: magnitude is negative or not below half the
            feature separation of the link
    """
    magnitude = parse_rational(magnitude)
    if magnitude < 0:
        raise PerturbationError(f"negative magnitude {magnitude}", feature_separation(link))
    if magnitude == 0:
        return link
    separation = feature_separation(link)
    if float(magnitude) >= separation / 2:
        raise PerturbationError(
            f"magnitude {float(magnitude):.3g} not below half the feature separation "
            f"{separation:.6g}", separation)
    rng = child_rng(seed, "perturb")
    scale = 1 << JITTER_BITS
    comps = []
    for verts in link.components:
        offsets = rng.integers(-scale, scale, size=(len(verts), 3), endpoint=True)
        # redraw outside the ball until every offset is inside
        outside = (offsets * offsets).sum(axis=1) > scale * scale
        while outside.any():
            offsets[outside] = rng.integers(-scale, scale, size=(int(outside.sum()), 3), endpoint=True)
            outside = (offsets * offsets).sum(axis=1) > scale * scale
        comps.append(tuple(
            Point3(*(x + magnitude * Fraction(int(k), scale) for x, k in zip(v.xyz, row)))
            for v, row in zip(verts, offsets)))
    logger.info(f"perturbed {sum(len(c) for c in comps)} vertices, magnitude {float(magnitude):.3g}, seed {seed}")
    return PolyLink(components=tuple(comps), labels=link.labels)


def default_magnitude(link: PolyLink, fraction: Union[str, Fraction]) -> Fraction:
    """Default jitter: a fixed fraction of the link diameter"""
    return parse_rational(fraction) * link.diameter()


# ============ General position ============

@dataclass
class GPReport:
    """
    PL analogues of the general-position conditions.

    conditions maps "I_II", "III", "IV", "V" to True (pass), False (fail)
    or None (not applicable to PL curves).
    """
    conditions: Dict[str, Optional[bool]] = field(default_factory=dict)
    witnesses: Dict[str, List[tuple]] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v is not False for v in self.conditions.values())

    def record(self, condition: str, witnesses: List[tuple]):
        self.conditions[condition] = not witnesses
        self.witnesses[condition] = list(witnesses)

    def to_dict(self) -> dict:
        return {
            "conditions": {k: v for k, v in sorted(self.conditions.items())},
            "witnesses": {k: [_jsonable(w) for w in ws] for k, ws in sorted(self.witnesses.items())},
            "notes": list(self.notes),
        }


def _jsonable(value):
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    return value


def _vertex_on_edge_lines(link: PolyLink) -> List[tuple]:
    witnesses = []
    for ref in link.edges:
        for c, verts in enumerate(link.components):
            for i, v in enumerate(verts):
                if v == ref.segment.a or v == ref.segment.b:
                    continue
                if collinear3(ref.segment.a, ref.segment.b, v):
                    witnesses.append(((ref.component, ref.edge), (c, i)))
    return witnesses


def gp_diagnose(link: PolyLink, workers: int = 1) -> GPReport:
    """
    Diagnose general position.

    I/II: no edge's line contains another vertex.
    III: no line meets five or more edges.
    IV: no degenerate quadruple (infinite transversal family or tangential
        double root).
    V: smooth-only, reported as not applicable.
    """
    from core.stabbing import EnumerationOptions, enumerate_quadrisecants_with_report

    report = GPReport()
    report.record("I_II", _vertex_on_edge_lines(link))

    options = EnumerationOptions(strict=False, workers=workers)
    found, degeneracies = enumerate_quadrisecants_with_report(link, options)
    report.record("III", [tuple((h.point.component, h.point.edge) for h in q.transversal.hits)
                          for q in found if len(q.transversal.hits) >= 5])
    report.record("IV", [tuple(d.edges) for d in degeneracies])
    report.conditions["V"] = None
    report.witnesses["V"] = []
    report.notes.append("condition V concerns smooth special points and has no PL analogue")
    logger.info(f"gp_diagnose: {report.conditions}")
    return report
