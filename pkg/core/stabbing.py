"""
Quadrisecant engine
Exact line transversals of edge quadruples, enumeration over a link with
BVH pruning and a float prefilter, and pattern classification
"""
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cmp_to_key
from fractions import Fraction
from itertools import combinations, islice
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from config import BATCH_SIZE, DEFAULT_WORKERS, KEY_DIGITS, PREFILTER_SLACK
from core.bvh import EdgeBVH
from core.link_model import LinkPoint, PolyLink
from core.predicates import (Exact, PluckerLine, QuadSurd, Segment3, _plane_normal, exact_sign,
                             orient3d, vcross, vdot, vfloat, vsub, vzero)
from core.utils import get_logger

logger = get_logger("stabbing", "stabbing.log")

# Quadruples handed to the prefilter at once
PREFILTER_CHUNK = 65536


class DegenerateConfigurationError(RuntimeError):
    """Raised under strict mode; `degeneracies` holds the witnesses"""

    def __init__(self, degeneracies: Sequence["Degeneracy"]):
        first = degeneracies[0]
        super().__init__(f"{len(degeneracies)} degenerate configuration(s), first: "
                         f"{first.kind} on edges {list(first.edges)} ({first.detail})")
        self.degeneracies = list(degeneracies)


# ============ Types ============

@dataclass(frozen=True)
class Hit:
    """A link point on a transversal and its parameter along the line"""
    point: LinkPoint
    param: Exact


@dataclass(frozen=True)
class Transversal:
    """
    Line through anchor + param * direction with its hits, sorted strictly
    by line parameter. multiplicity 2 marks a double root of the solve.
    """
    anchor: tuple
    direction: tuple
    hits: Tuple[Hit, ...]
    multiplicity: int = 1

    @property
    def line(self) -> PluckerLine:
        return PluckerLine(direction=self.direction, moment=vcross(self.anchor, self.direction))

    def position(self, param) -> tuple:
        return tuple(a + param * d for a, d in zip(self.anchor, self.direction))

    def reversed(self) -> "Transversal":
        hits = tuple(Hit(h.point, -h.param) for h in reversed(self.hits))
        return Transversal(self.anchor, tuple(-d for d in self.direction), hits, self.multiplicity)


@dataclass(frozen=True)
class Quadrisecant:
    """A transversal with at least four hits; a, b, c, d are the first four"""
    transversal: Transversal
    pattern: str
    containment: Tuple[bool, bool, bool]
    near_degenerate: bool
    key: tuple
    residual: float = 0.0

    @property
    def points(self) -> Tuple[Hit, ...]:
        return self.transversal.hits[:4]


@dataclass
class SolveOutcome:
    """
    Result of one quadruple solve.

    kind is the number of distinct real roots of the resultant quadratic
    ("zero", "one", "two") or "degenerate-infinite"; roots carry their
    multiplicity; transversals are the certified lines inside all four
    half-open edges.
    """
    kind: str
    roots: List[Tuple[Exact, int]] = field(default_factory=list)
    discriminant_sign: int = 0
    transversals: List[Transversal] = field(default_factory=list)
    witness: str = ""


@dataclass(frozen=True)
class Degeneracy:
    """A quadruple the solver cannot resolve to finitely many simple lines"""
    edges: Tuple[Tuple[int, int], ...]
    kind: str
    detail: str


@dataclass
class EnumerationOptions:
    strict: bool = False
    workers: int = DEFAULT_WORKERS
    prune: bool = True
    prefilter: bool = True
    key_digits: int = KEY_DIGITS
    prefilter_slack: float = PREFILTER_SLACK
    batch_size: int = BATCH_SIZE


@dataclass
class EnumerationResult:
    quadrisecants: List[Quadrisecant]
    degeneracies: List[Degeneracy]
    stats: Dict[str, int] = field(default_factory=dict)


# ============ Exact line-segment incidence ============

def meet_segment(anchor, direction, seg: Segment3, closed: bool = False) -> Optional[Tuple[Exact, Exact, bool]]:
    """
    Where the line anchor + lam * direction meets seg.

    Returns (u, lam, contained) with u the edge parameter, or None. A line
    containing the edge is reported at its start vertex (u = 0). The edge is
    half-open (u < 1) unless closed is set.
    """
    e = seg.vector.xyz
    n = vcross(e, direction)
    rel = vsub(seg.a, anchor)
    dd = vdot(direction, direction)
    if vzero(n):
        if not vzero(vcross(rel, direction)):
            return None
        return Fraction(0), vdot(rel, direction) / dd, True
    if exact_sign(vdot(rel, n)) != 0:
        return None
    u = vdot(vcross(vsub(anchor, seg.a), direction), n) / vdot(n, n)
    if exact_sign(u) < 0:
        return None
    top = exact_sign(u - 1)
    if top > 0 or (top == 0 and not closed):
        return None
    lam = vdot(vsub(seg.at(u), anchor), direction) / dd
    return u, lam, False


def _bilinear(e1: Segment3, e2: Segment3, e: Segment3) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """Coefficients (a, b, c, d) of F(s, t) = a + b s + c t + d s t = orient3d(A(s), B(t), P, Q)"""
    p1, q1, p2, q2 = e1.a, e1.b, e2.a, e2.b
    f00 = orient3d(p1, p2, e.a, e.b)
    f10 = orient3d(q1, p2, e.a, e.b)
    f01 = orient3d(p1, q2, e.a, e.b)
    f11 = orient3d(q1, q2, e.a, e.b)
    return f00, f10 - f00, f01 - f00, f11 - f10 - f01 + f00


def _coplanar(segs: Sequence[Segment3]) -> bool:
    points = [p for s in segs for p in (s.a, s.b)]
    n = _plane_normal(points)
    if n is None:
        return True
    return all(vdot(vsub(p, points[0]), n) == 0 for p in points)


def _default_refs(count: int) -> Tuple[Tuple[int, int], ...]:
    return tuple((0, i) for i in range(count))


def _make_transversal(anchor, direction, raw: List[Tuple[Tuple[int, int], Exact, Exact]],
                      multiplicity: int = 1) -> Optional[Transversal]:
    """raw holds (ref, edge parameter, line parameter); None unless all line parameters differ"""
    raw = sorted(raw, key=cmp_to_key(lambda x, y: exact_sign(x[2] - y[2])))
    for i in range(len(raw) - 1):
        if exact_sign(raw[i + 1][2] - raw[i][2]) == 0:
            return None
    hits = tuple(Hit(LinkPoint(ref[0], ref[1], u), lam) for ref, u, lam in raw)
    return Transversal(tuple(anchor), tuple(direction), hits, multiplicity)


# ============ Per-quadruple solve ============

def transversals_of_four_edges(e1: Segment3, e2: Segment3, e3: Segment3, e4: Segment3,
                               refs: Optional[Sequence[Tuple[int, int]]] = None) -> SolveOutcome:
    """
    All lines meeting four half-open segments.

    Candidate lines run from A(s) on e1 to B(t) on e2. Meeting the line of
    e3 and of e4 are bilinear equations F3(s, t) = F4(s, t) = 0; eliminating t
    leaves alpha s^2 + beta s + gamma = 0. Every root is back-substituted and
    certified exactly.

    Args:
        e1..e4: the segments, pairwise non-identical
        refs: (component, edge) per segment for the reported LinkPoints
    """
    segs = (e1, e2, e3, e4)
    refs = tuple(refs) if refs is not None else _default_refs(4)
    for x, y in combinations(segs, 2):
        if {x.a, x.b} == {y.a, y.b}:
            raise ValueError("transversals_of_four_edges needs four distinct segments")

    a3, b3, c3, d3 = _bilinear(e1, e2, e3)
    a4, b4, c4, d4 = _bilinear(e1, e2, e4)
    alpha = b3 * d4 - b4 * d3
    beta = a3 * d4 + b3 * c4 - a4 * d3 - b4 * c3
    gamma = a3 * c4 - a4 * c3

    if alpha == 0 and beta == 0 and gamma == 0:
        return _degenerate_outcome(segs, refs)

    if alpha != 0:
        disc = beta * beta - 4 * alpha * gamma
        if disc < 0:
            return SolveOutcome("zero", discriminant_sign=-1)
        if disc == 0:
            roots = [(-beta / (2 * alpha), 2)]
            kind = "one"
        else:
            sq = QuadSurd.sqrt(disc)
            roots = sorted([((-beta - sq) / (2 * alpha), 1), ((-beta + sq) / (2 * alpha), 1)],
                           key=lambda r: float(r[0]))
            kind = "two"
        sign = exact_sign(disc)
    elif beta != 0:
        roots = [(-gamma / beta, 1)]
        kind = "one"
        sign = 1
    else:
        return SolveOutcome("zero", discriminant_sign=0)

    outcome = SolveOutcome(kind, roots=roots, discriminant_sign=sign)
    for s, mult in roots:
        if exact_sign(s) < 0 or exact_sign(s - 1) >= 0:
            continue
        num3, den3 = a3 + b3 * s, c3 + d3 * s
        num4, den4 = a4 + b4 * s, c4 + d4 * s
        if exact_sign(den3) != 0:
            t = -num3 / den3
        elif exact_sign(den4) != 0:
            t = -num4 / den4
        else:
            if exact_sign(num3) == 0 and exact_sign(num4) == 0:
                pencil = _pencil_members(segs, refs, s)
                if pencil is None:
                    return _degenerate_outcome(segs, refs)
                family, members = pencil
                if family:
                    return SolveOutcome("degenerate-infinite", roots=roots, discriminant_sign=sign,
                                        witness=f"every t solves the system at s = {float(s)}")
                outcome.transversals.extend(members)
            continue
        # both bilinear equations must hold at (s, t)
        if exact_sign(num3 + den3 * t) != 0 or exact_sign(num4 + den4 * t) != 0:
            continue
        if exact_sign(t) < 0 or exact_sign(t - 1) >= 0:
            continue
        trans = _line_hits(segs, refs, s, t, mult)
        if trans is not None:
            outcome.transversals.append(trans)
    return outcome


def _line_hits(segs, refs, s, t, mult) -> Optional[Transversal]:
    e1, e2, e3, e4 = segs
    anchor = e1.at(s)
    direction = vsub(e2.at(t), anchor)
    if vzero(direction):
        return None
    raw = [(refs[0], s, Fraction(0)), (refs[1], t, Fraction(1))]
    for ref, seg in ((refs[2], e3), (refs[3], e4)):
        met = meet_segment(anchor, direction, seg)
        if met is None:
            return None
        raw.append((ref, met[0], met[1]))
    return _make_transversal(anchor, direction, raw, mult)


def _line_param(anchor, direction, seg: Segment3) -> Optional[Exact]:
    """Parameter on the line of seg where anchor + lam * direction crosses it; None if parallel or skew"""
    if vzero(direction):
        return None
    n = vcross(seg.vector.xyz, direction)
    if vzero(n) or exact_sign(vdot(vsub(seg.a, anchor), n)) != 0:
        return None
    return vdot(vcross(vsub(anchor, seg.a), direction), n) / vdot(n, n)


def _pencil_members(segs, refs, s) -> Optional[Tuple[bool, List[Transversal]]]:
    """
    Lines from A(s) on e1 to B(t) on e2 when every t solves both bilinear
    equations.

    The hit parameters on e3 and e4 are monotone in t between the cuts where
    the line passes an endpoint or turns parallel to e3 or e4, so testing one
    t inside each open gap decides whether a whole range of lines meets all
    four segments. Returns (family, isolated lines), or None when A(s) lies on
    the line of e2 and the pencil collapses to a single line.
    """
    e1, e2 = segs[0], segs[1]
    anchor = e1.at(s)
    if vzero(vcross(vsub(e2.a, anchor), e2.vector.xyz)):
        return None
    cuts = [Fraction(0), Fraction(1)]
    for seg in segs[2:]:
        for direction in (vsub(seg.a, anchor), vsub(seg.b, anchor), seg.vector.xyz):
            t = _line_param(anchor, direction, e2)
            if t is None or exact_sign(t) <= 0 or exact_sign(t - 1) >= 0:
                continue
            if all(exact_sign(t - c) != 0 for c in cuts):
                cuts.append(t)
    cuts.sort(key=cmp_to_key(lambda x, y: exact_sign(x - y)))
    for lo, hi in zip(cuts, cuts[1:]):
        if _line_hits(segs, refs, s, (lo + hi) * Fraction(1, 2), 1) is not None:
            return True, []
    members = [_line_hits(segs, refs, s, t, 1) for t in cuts[:-1]]
    return False, [m for m in members if m is not None]


def _degenerate_outcome(segs: Sequence[Segment3], refs) -> SolveOutcome:
    """
    Resultant vanishes identically. Lines through two of the eight endpoints
    are examined directly: coplanar quadruples are a family only when such a
    line meets all four closed segments in at least three distinct points,
    and lines containing an edge are reported as finite transversals.
    """
    coplanar = _coplanar(segs)
    endpoints = []
    for s in segs:
        for p in (s.a, s.b):
            if p not in endpoints:
                endpoints.append(p)
    family = not coplanar
    special: Dict[tuple, Transversal] = {}
    pairs = list(combinations(endpoints, 2))
    starts = np.array([x.f for x, _ in pairs])
    screen = _screen_lines(starts, np.array([y.f for _, y in pairs]) - starts, segs)
    for (x, y), ok in zip(pairs, screen):
        if not ok:
            continue
        direction = vsub(y, x)
        anchor = x.xyz
        closed = [meet_segment(anchor, direction, s, closed=True) for s in segs]
        if any(m is None for m in closed):
            continue
        contained = any(m[2] for m in closed)
        if coplanar and not contained and len({m[1] for m in closed}) >= 3:
            family = True
        if not contained:
            continue
        raw = []
        for ref, s in zip(refs, segs):
            met = meet_segment(anchor, direction, s)
            if met is None:
                break
            raw.append((ref, met[0], met[1]))
        else:
            trans = _make_transversal(anchor, direction, raw)
            if trans is not None:
                special.setdefault(_line_identity(trans), trans)

    transversals = [special[k] for k in sorted(special)]
    if family:
        witness = ("coplanar quadruple admits a line family" if coplanar
                   else "resultant vanishes identically")
        return SolveOutcome("degenerate-infinite", transversals=transversals, witness=witness)
    kind = {0: "zero", 1: "one", 2: "two"}.get(len(transversals), "degenerate-infinite")
    return SolveOutcome(kind, transversals=transversals,
                        witness="coplanar quadruple, resultant vanishes identically")


def _screen_lines(anchors: np.ndarray, dirs: np.ndarray, segs: Sequence[Segment3],
                  tol: float = 1e-9) -> np.ndarray:
    """Float screen of candidate lines (rows) against all segments; parallel cases pass"""
    scale = max(1.0, float(np.abs(anchors).max()), float(np.abs(dirs).max()))
    keep = np.ones(len(anchors), dtype=bool)
    for s in segs:
        p, q = np.array(s.a.f), np.array(s.b.f)
        n = np.cross(q - p, dirs)
        norm2 = np.einsum("ij,ij->i", n, n)
        parallel = norm2 <= (tol * scale * scale) ** 2
        safe = np.where(parallel, 1.0, norm2)
        off = np.abs(np.einsum("ij,ij->i", p - anchors, n)) / np.sqrt(safe)
        u = np.einsum("ij,ij->i", np.cross(anchors - p, dirs), n) / safe
        hit = (off <= tol * scale) & (u >= -tol) & (u <= 1.0 + tol)
        keep &= parallel | hit
    return keep


def _line_identity(trans: Transversal) -> tuple:
    d = np.array(vfloat(trans.direction))
    d /= np.linalg.norm(d)
    if d[np.argmax(np.abs(d) > 1e-12)] < 0:
        d = -d
    return tuple(round(float(x), 9) for x in d) + tuple(
        sorted((h.point.component, h.point.edge) for h in trans.hits))


# ============ Float prefilter ============

def _orient_rows(p: np.ndarray, q: np.ndarray, r: np.ndarray, s: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", q - p, np.cross(r - p, s - p))


def prefilter_quadruples(P: np.ndarray, Q: np.ndarray, quads: np.ndarray, slack: float) -> np.ndarray:
    """
    Boolean mask of quadruples worth an exact solve.

    Mirrors the exact solve in doubles and keeps a quadruple when some root
    has s and t inside [-slack, 1 + slack], or when the coefficients are too
    close to a degenerate case for doubles to decide.
    """
    p = [P[quads[:, i]] for i in range(4)]
    q = [Q[quads[:, i]] for i in range(4)]
    coef = []
    for i in (2, 3):
        f00 = _orient_rows(p[0], p[1], p[i], q[i])
        f10 = _orient_rows(q[0], p[1], p[i], q[i])
        f01 = _orient_rows(p[0], q[1], p[i], q[i])
        f11 = _orient_rows(q[0], q[1], p[i], q[i])
        coef.append((f00, f10 - f00, f01 - f00, f11 - f10 - f01 + f00))
    (a3, b3, c3, d3), (a4, b4, c4, d4) = coef
    alpha = b3 * d4 - b4 * d3
    beta = a3 * d4 + b3 * c4 - a4 * d3 - b4 * c3
    gamma = a3 * c4 - a4 * c3

    m3 = np.abs(a3) + np.abs(b3) + np.abs(c3) + np.abs(d3)
    m4 = np.abs(a4) + np.abs(b4) + np.abs(c4) + np.abs(d4)
    ref = m3 * m4 + 1e-300
    size = np.maximum(np.maximum(np.abs(alpha), np.abs(beta)), np.abs(gamma))
    keep = size <= 1e-9 * ref

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        quadratic = np.abs(alpha) > 1e-12 * ref
        disc = beta * beta - 4.0 * alpha * gamma
        keep |= quadratic & (np.abs(disc) <= 1e-9 * (beta * beta + 4.0 * np.abs(alpha * gamma)))
        sq = np.sqrt(np.maximum(disc, 0.0))
        real = quadratic & (disc >= 0.0)
        linear = ~quadratic & (np.abs(beta) > 1e-12 * ref)
        candidates = [
            (np.where(real, (-beta - sq) / (2.0 * alpha), np.nan), real),
            (np.where(real, (-beta + sq) / (2.0 * alpha), np.nan), real),
            (np.where(linear, -gamma / beta, np.nan), linear),
        ]
        dscale = np.abs(c3) + np.abs(d3) + np.abs(c4) + np.abs(d4) + 1e-300
        span = np.maximum(np.linalg.norm(q[0] - p[0], axis=1), np.linalg.norm(q[1] - p[1], axis=1))
        for s, valid in candidates:
            in_s = valid & (s >= -slack) & (s <= 1.0 + slack)
            den3, den4 = c3 + d3 * s, c4 + d4 * s
            use3 = np.abs(den3) >= np.abs(den4)
            den = np.where(use3, den3, den4)
            num = np.where(use3, a3 + b3 * s, a4 + b4 * s)
            flat = np.abs(den) <= 1e-9 * dscale
            t = -num / den
            in_t = (t >= -slack) & (t <= 1.0 + slack)
            keep |= in_s & (flat | (in_t & _meets_far_edges(p, q, s, t, span, slack)))
    return keep


def _meets_far_edges(p, q, s, t, span, slack) -> np.ndarray:
    """
    Whether the line A(s)B(t) hits e3 and e4 within their parameter ranges.

    A(s) = B(t) is the shared-vertex root of adjacent edges and carries no
    line. Near-parallel edges pass.
    """
    A = p[0] + s[:, None] * (q[0] - p[0])
    d = p[1] + t[:, None] * (q[1] - p[1]) - A
    dn = np.linalg.norm(d, axis=1)
    ok = dn > 1e-9 * span
    for i in (2, 3):
        e = q[i] - p[i]
        n = np.cross(e, d)
        nn = np.einsum("ij,ij->i", n, n)
        parallel = np.sqrt(nn) <= 1e-9 * np.linalg.norm(e, axis=1) * dn
        u = np.einsum("ij,ij->i", np.cross(A - p[i], d), n) / np.where(parallel, 1.0, nn)
        ok &= parallel | ((u >= -slack) & (u <= 1.0 + slack))
    return ok


# ============ Parallel solve ============

_WORKER_STATE: Dict[str, tuple] = {}


def _init_worker(segments: Tuple[Segment3, ...], refs: Tuple[Tuple[int, int], ...]):
    _WORKER_STATE["segments"] = segments
    _WORKER_STATE["refs"] = refs


def _solve_batch(batch: Sequence[Tuple[int, int, int, int]]) -> List[Tuple[tuple, SolveOutcome]]:
    """Solve a batch; only outcomes that carry lines or degeneracies come back"""
    segments, refs = _WORKER_STATE["segments"], _WORKER_STATE["refs"]
    out = []
    for quad in batch:
        outcome = transversals_of_four_edges(*(segments[g] for g in quad),
                                             refs=[refs[g] for g in quad])
        if outcome.transversals or outcome.kind == "degenerate-infinite":
            out.append((tuple(quad), outcome))
    return out


def _chunks(items: Iterable, size: int) -> Iterator[list]:
    it = iter(items)
    while True:
        chunk = list(islice(it, size))
        if not chunk:
            return
        yield chunk


# ============ Merge, extension and classification ============

def _first_sign(direction) -> int:
    for c in direction:
        sign = exact_sign(c)
        if sign:
            return sign
    return 0


def _near_edges(anchor, direction, P: np.ndarray, Q: np.ndarray, tol: float) -> np.ndarray:
    """Indices of edges whose lines pass within tol of the line (float screen)"""
    a = np.array(vfloat(anchor))
    d = np.array(vfloat(direction))
    e = Q - P
    n = np.cross(e, d)
    norms = np.linalg.norm(n, axis=1)
    parallel = norms <= 1e-12 * np.linalg.norm(e, axis=1) * np.linalg.norm(d)
    dist = np.abs(np.einsum("ij,ij->i", P - a, n)) / np.where(parallel, 1.0, norms)
    return np.nonzero(parallel | (dist <= tol))[0]


def extend_transversal(trans: Transversal, segments: Sequence[Segment3],
                       refs: Sequence[Tuple[int, int]], P: np.ndarray, Q: np.ndarray,
                       tol: float) -> Transversal:
    """Add every further edge the line meets so the hit list is maximal"""
    have = {(h.point.component, h.point.edge) for h in trans.hits}
    raw = [((h.point.component, h.point.edge), h.point.t, h.param) for h in trans.hits]
    for g in _near_edges(trans.anchor, trans.direction, P, Q, tol):
        if refs[g] in have:
            continue
        met = meet_segment(trans.anchor, trans.direction, segments[g])
        if met is not None:
            raw.append((refs[g], met[0], met[1]))
    if len(raw) == len(trans.hits):
        return trans
    return _make_transversal(trans.anchor, trans.direction, raw, trans.multiplicity) or trans


def _word(link: PolyLink, hits: Sequence[Hit]) -> str:
    return "".join(link.labels[h.point.component] for h in hits)


def canonical_key(trans: Transversal, digits: int) -> tuple:
    """Sorted (component, edge, rounded t) hits plus the projectivized direction"""
    d = np.array(vfloat(trans.direction))
    d /= np.linalg.norm(d)
    if _first_sign(trans.direction) < 0:
        d = -d
    hits = tuple(sorted((h.point.component, h.point.edge, round(float(h.point.t), digits) + 0.0)
                        for h in trans.hits))
    return hits, tuple(round(float(x), digits) + 0.0 for x in d)


def _contained_intervals(link: PolyLink, trans: Transversal) -> List[Tuple[Exact, Exact]]:
    """Line-parameter ranges of edges lying on the line"""
    anchor, direction = trans.anchor, trans.direction
    dd = vdot(direction, direction)
    out = []
    for ref in link.edges:
        seg = ref.segment
        if not (vzero(vcross(vsub(seg.a, anchor), direction))
                and vzero(vcross(vsub(seg.b, anchor), direction))):
            continue
        la = vdot(vsub(seg.a, anchor), direction) / dd
        lb = vdot(vsub(seg.b, anchor), direction) / dd
        out.append((la, lb) if exact_sign(lb - la) > 0 else (lb, la))
    return out


def _covered(intervals: List[Tuple[Exact, Exact]], lo: Exact, hi: Exact) -> bool:
    reach = lo
    for a, b in sorted(intervals, key=cmp_to_key(lambda x, y: exact_sign(x[0] - y[0]))):
        if exact_sign(a - reach) > 0:
            break
        if exact_sign(b - reach) > 0:
            reach = b
        if exact_sign(reach - hi) >= 0:
            return True
    return False


def _pattern_and_containment(trans: Transversal, link: PolyLink) -> Tuple[str, Tuple[bool, bool, bool]]:
    points = trans.hits[:4]
    intervals = _contained_intervals(link, trans) if _has_collinear_edges(link, trans) else []
    flags = tuple(bool(intervals) and _covered(intervals, points[i].param, points[i + 1].param)
                  for i in range(3))
    return _word(link, points), flags


def _has_collinear_edges(link: PolyLink, trans: Transversal) -> bool:
    """Float screen: can any edge lie on the line at all"""
    V = link.vertex_array
    a = np.array(vfloat(trans.anchor))
    d = np.array(vfloat(trans.direction))
    d /= np.linalg.norm(d)
    rel = V - a
    dist = np.linalg.norm(rel - np.outer(rel @ d, d), axis=1)
    scale = max(1.0, float(np.abs(V).max()))
    return int(np.count_nonzero(dist <= 1e-9 * scale)) >= 2


def classify_pattern(q: Quadrisecant, link: PolyLink) -> Tuple[str, Tuple[bool, bool, bool]]:
    """
    Pattern word of the first four hits in line order, and per secant
    ab, bc, cd whether it lies inside the link.
    """
    return _pattern_and_containment(q.transversal, link)


def _residual(trans: Transversal, link: PolyLink) -> float:
    """Largest float distance from a hit point to the line"""
    a = np.array(vfloat(trans.anchor))
    d = np.array(vfloat(trans.direction))
    d /= np.linalg.norm(d)
    worst = 0.0
    for h in trans.hits:
        x = np.array(vfloat(link.point(h.point))) - a
        worst = max(worst, float(np.linalg.norm(x - np.dot(x, d) * d)))
    return worst


def finish_quadrisecant(trans: Transversal, link: PolyLink, digits: int) -> Quadrisecant:
    """Orient the line so the pattern word reads no later than its reverse, then classify"""
    word = _word(link, trans.hits)
    rev = word[::-1]
    if rev < word or (rev == word and _first_sign(trans.direction) < 0):
        trans = trans.reversed()
    pattern, containment = _pattern_and_containment(trans, link)
    return Quadrisecant(trans, pattern, containment, trans.multiplicity > 1,
                        canonical_key(trans, digits), _residual(trans, link))


# ============ Enumeration ============

def edge_arrays(link: PolyLink) -> Tuple[np.ndarray, np.ndarray]:
    P = np.array([r.segment.a.f for r in link.edges], dtype=np.float64).reshape(-1, 3)
    Q = np.array([r.segment.b.f for r in link.edges], dtype=np.float64).reshape(-1, 3)
    return P, Q


def run_enumeration(link: PolyLink, options: Optional[EnumerationOptions] = None) -> EnumerationResult:
    """
    Enumerate all quadrisecants of the link.

    Candidate quadruples come from the BVH (or all 4-sets without pruning),
    pass the float prefilter, and are solved exactly in batches. Lines are
    extended against every edge, deduplicated by canonical key and sorted.

    Raises:
        DegenerateConfigurationError: strict mode and a degenerate quadruple
    """
    options = options or EnumerationOptions()
    edges = link.edges
    segments = tuple(r.segment for r in edges)
    refs = tuple((r.component, r.edge) for r in edges)
    P, Q = edge_arrays(link)
    scale = max(1.0, float(link.diameter()))
    stats = {"edges": len(edges), "candidates": 0, "survivors": 0, "solved_lines": 0}

    bvh = None
    if options.prune:
        V = np.concatenate([P, Q], axis=1).reshape(-1, 2, 3)
        bvh = EdgeBVH(V.min(axis=1), V.max(axis=1), slack=1e-9 * scale)
        stream = bvh.candidate_quadruples()
    else:
        stream = combinations(range(len(edges)), 4)

    survivors: List[Tuple[int, int, int, int]] = []
    for chunk in _chunks(stream, PREFILTER_CHUNK):
        arr = np.array(chunk, dtype=np.int64).reshape(-1, 4)
        stats["candidates"] += len(arr)
        if options.prefilter:
            arr = arr[prefilter_quadruples(P, Q, arr, options.prefilter_slack)]
        survivors.extend(tuple(int(x) for x in row) for row in arr)
    survivors.sort()
    stats["survivors"] = len(survivors)
    if bvh is not None:
        stats["box_tests"], stats["box_pruned"] = bvh.tests, bvh.pruned

    size = max(1, options.batch_size)
    batches = [survivors[i:i + size] for i in range(0, len(survivors), size)]
    solved: List[Tuple[tuple, SolveOutcome]] = []
    if options.workers > 1 and len(batches) > 1:
        with ProcessPoolExecutor(max_workers=options.workers, initializer=_init_worker,
                                 initargs=(segments, refs)) as pool:
            for part in pool.map(_solve_batch, batches):
                solved.extend(part)
    else:
        _init_worker(segments, refs)
        for batch in batches:
            solved.extend(_solve_batch(batch))
    stats["productive"] = len(solved)

    degeneracies = set()
    found: Dict[tuple, Quadrisecant] = {}
    for quad, outcome in solved:
        quad_refs = tuple(refs[g] for g in quad)
        if outcome.kind == "degenerate-infinite":
            degeneracies.add(Degeneracy(quad_refs, outcome.kind, outcome.witness))
        for trans in outcome.transversals:
            stats["solved_lines"] += 1
            if trans.multiplicity > 1:
                degeneracies.add(Degeneracy(quad_refs, "double-root", "tangential transversal"))
            full = extend_transversal(trans, segments, refs, P, Q, 1e-9 * scale)
            q = finish_quadrisecant(full, link, options.key_digits)
            prev = found.get(q.key)
            if prev is None or (q.near_degenerate and not prev.near_degenerate):
                found[q.key] = q

    quads = [found[k] for k in sorted(found)]
    degenerate = sorted(degeneracies, key=lambda d: (d.edges, d.kind, d.detail))
    logger.info(f"enumeration: {stats['edges']} edges, {stats['candidates']} candidates, "
                f"{stats['survivors']} exact solves, {len(quads)} quadrisecants, "
                f"{len(degenerate)} degeneracies")
    if degenerate:
        logger.warning(f"{len(degenerate)} degenerate quadruple(s), first {degenerate[0]}")
        if options.strict:
            raise DegenerateConfigurationError(degenerate)
    return EnumerationResult(quads, degenerate, stats)


def enumerate_quadrisecants_with_report(link: PolyLink, options: Optional[EnumerationOptions] = None
                                        ) -> Tuple[List[Quadrisecant], List[Degeneracy]]:
    result = run_enumeration(link, options)
    return result.quadrisecants, result.degeneracies


def enumerate_quadrisecants(link: PolyLink, options: Optional[EnumerationOptions] = None) -> List[Quadrisecant]:
    return run_enumeration(link, options).quadrisecants
