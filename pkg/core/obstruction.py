"""
Obstruction atlas
The strip of secants of one component, the trisecant set traced in chart
coordinates, its self-crossings, winding classes of closed chains, fiber
search for a clear apex and the chord disk spanned from it
"""
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from config import (CLEAR_ARC_REFINEMENTS, DEFAULT_SAMPLES, DIAGONAL_MARGIN, KEY_DIGITS,
                    REFINE_CAP, STEP_BOUND)
from core.link_model import LinkPoint, PolyLink
from core.predicates import (Point3, Segment3, collinear3, orient3d, triangle_meets_segment,
                             vdot, vsub, vzero)
from core.stabbing import (Quadrisecant, edge_arrays, extend_transversal, finish_quadrisecant,
                           meet_segment, transversals_of_four_edges)
from core.utils import get_logger

logger = get_logger("obstruction", "obstruction.log")

Ref = Tuple[int, int]


class StepSizeError(RuntimeError):
    """An arc keeps jumping more than the step bound after the refinement cap"""

    def __init__(self, message: str, location: tuple):
        super().__init__(message)
        self.location = location


class ChainNotClosedError(ValueError):
    """winding_class needs a chain returning to its starting pair"""


class ChordVerificationError(RuntimeError):
    """A chord of the fan meets the link; `chord` is (apex, witness point, edge, edge)"""

    def __init__(self, message: str, chord: tuple):
        super().__init__(message)
        self.chord = chord


def circular_distance(x: float, y: float) -> float:
    d = abs(x - y) % 1.0
    return min(d, 1.0 - d)


def wrapped_step(x: float, y: float) -> float:
    """Increment from x to y on the circle, in [-1/2, 1/2)"""
    return (y - x + 0.5) % 1.0 - 0.5


# ============ Types ============

@dataclass(frozen=True)
class MoebiusCoord:
    """
    Secant as a pair of chart parameters in [0, 1). The pair is unordered;
    (a, b) keeps the traced order so lifts stay continuous, canonical gives
    the ordered representative a < b.
    """
    a: float
    b: float

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("degenerate secant: both ends at the same parameter")

    @property
    def canonical(self) -> Tuple[float, float]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)

    def distance(self, other: "MoebiusCoord") -> float:
        """Chart distance of unordered pairs"""
        direct = max(circular_distance(self.a, other.a), circular_distance(self.b, other.b))
        swapped = max(circular_distance(self.a, other.b), circular_distance(self.b, other.a))
        return min(direct, swapped)


@dataclass(frozen=True)
class ObstructionSample:
    """One exactly verified trisecant: endpoints a, b and the middle point"""
    coord: MoebiusCoord
    a: LinkPoint
    b: LinkPoint
    middle: LinkPoint
    sigma: Fraction
    lam: Fraction
    key: tuple
    middle_param: float


@dataclass
class ObstructionArc:
    samples: Tuple[ObstructionSample, ...]
    middle_edge: Ref
    endpoint_edges: Tuple[int, int]
    closed: bool = False

    @property
    def sigma_range(self) -> Tuple[Fraction, Fraction]:
        return self.samples[0].sigma, self.samples[-1].sigma


@dataclass
class Crossing:
    arcs: Tuple[int, int]
    coord: MoebiusCoord
    quadrisecant: Quadrisecant


@dataclass
class ArcChain:
    """Arcs glued end to end; closed chains repeat the first sample at the end"""
    arcs: Tuple[Tuple[int, bool], ...]
    samples: Tuple[ObstructionSample, ...]
    closed: bool
    winding_class: Optional[int] = None
    middle_components: Tuple[int, ...] = ()
    middle_turns: Optional[int] = None


@dataclass
class ObstructionAtlas:
    component: int
    samples_per_edge: int
    arcs: List[ObstructionArc] = field(default_factory=list)
    crossings: List[Crossing] = field(default_factory=list)
    chains: List[ArcChain] = field(default_factory=list)
    degenerate_cells: List[Tuple[int, int, Ref]] = field(default_factory=list)


@dataclass
class ChordDisk:
    apex: LinkPoint
    apex_point: tuple
    triangles: Tuple[Tuple[tuple, tuple, tuple], ...]
    degenerate: Tuple[bool, ...]


# ============ Cell geometry ============

@dataclass(frozen=True)
class _Cell:
    """Endpoint edges i, j of the component and middle edge k (any component)"""
    si: Segment3
    sj: Segment3
    sk: Segment3
    ri: Ref
    rj: Ref
    rk: Ref
    f0: Tuple[Fraction, Fraction]
    f1: Tuple[Fraction, Fraction]
    g0: Tuple[Fraction, Fraction]
    g1: Tuple[Fraction, Fraction]


def _affine(fn, seg: Segment3) -> Tuple[Fraction, Fraction]:
    """(alpha, beta) with fn(seg.at(s)) = alpha + beta s; fn must be affine"""
    v0, v1 = fn(seg.a), fn(seg.b)
    return v0, v1 - v0


def _make_cell(si, sj, sk, ri, rj, rk) -> _Cell:
    # t(s) solves orient3d(A(s), B(t), Pk, Qk) = 0, linear in t: f0 + t (f1 - f0)
    f0 = _affine(lambda A: orient3d(A, sj.a, sk.a, sk.b), si)
    f1 = _affine(lambda A: orient3d(A, sj.b, sk.a, sk.b), si)
    # middle point at a vertex of e_k: the line A -> Pk (or Qk) meets e_j's line
    g0 = _affine(lambda A: orient3d(A, sk.a, sj.a, sj.b), si)
    g1 = _affine(lambda A: orient3d(A, sk.b, sj.a, sj.b), si)
    return _Cell(si, sj, sk, ri, rj, rk, f0, f1, g0, g1)


def _events(cell: _Cell) -> List[Fraction]:
    """Parameters in [0, 1] where the validity of a cell sample can change"""
    out = {Fraction(0), Fraction(1)}
    diff = (cell.f0[0] - cell.f1[0], cell.f0[1] - cell.f1[1])
    for alpha, beta in (cell.f0, cell.f1, cell.g0, cell.g1, diff):
        if beta != 0:
            root = -alpha / beta
            if 0 < root < 1:
                out.add(root)
    return sorted(out)


def _link_point(link: PolyLink, ref: Ref, t: Fraction) -> LinkPoint:
    """Half-open normal form: parameter 1 is the next edge's start"""
    if t == 1:
        return LinkPoint(ref[0], (ref[1] + 1) % link.edge_count(ref[0]), Fraction(0))
    return LinkPoint(ref[0], ref[1], t)


def _sample_at(link: PolyLink, cell: _Cell, sigma: Fraction) -> Optional[ObstructionSample]:
    f0 = cell.f0[0] + cell.f0[1] * sigma
    f1 = cell.f1[0] + cell.f1[1] * sigma
    if f0 == f1:
        return None
    t = f0 / (f0 - f1)
    if t < 0 or t > 1:
        return None
    A = cell.si.at(sigma)
    B = cell.sj.at(t)
    D = vsub(B, A)
    if vzero(D):
        return None
    met = meet_segment(A, D, cell.sk, closed=True)
    if met is None or met[2]:
        return None
    u, lam, _ = met
    if not 0 < lam < 1:
        return None
    a = _link_point(link, cell.ri, sigma)
    b = _link_point(link, cell.rj, t)
    m = _link_point(link, cell.rk, u)
    ca, cb = link.chart_param(a), link.chart_param(b)
    if ca == cb:
        return None
    M = cell.sk.at(u)
    return ObstructionSample(MoebiusCoord(ca, cb), a, b, m, sigma, lam,
                             (frozenset((A, B)), M), link.chart_param(m))


def _gap(s1: ObstructionSample, s2: ObstructionSample) -> float:
    return max(circular_distance(s1.coord.a, s2.coord.a),
               circular_distance(s1.coord.b, s2.coord.b),
               circular_distance(s1.middle_param, s2.middle_param))


def _refine(link, cell, s1, s2, depth, bound, cap) -> List[ObstructionSample]:
    """Samples after s1 up to s2, bisected until every step is within bound"""
    if _gap(s1, s2) <= bound:
        return [s2]
    location = (cell.ri, cell.rj, cell.rk, float(s1.sigma))
    if depth >= cap:
        raise StepSizeError(f"arc jumps {_gap(s1, s2):.3g} > {bound} near {location} "
                            f"after {cap} refinements", location)
    mid = _sample_at(link, cell, (s1.sigma + s2.sigma) / 2)
    if mid is None:
        raise StepSizeError(f"arc breaks inside a valid interval near {location}", location)
    return (_refine(link, cell, s1, mid, depth + 1, bound, cap)
            + _refine(link, cell, mid, s2, depth + 1, bound, cap))


def _trace_cell(link: PolyLink, cell: _Cell, samples: int, margin: float,
                bound: float, cap: int) -> List[ObstructionArc]:
    arcs = []
    events = _events(cell)
    for lo, hi in zip(events, events[1:]):
        if _sample_at(link, cell, (lo + hi) / 2) is None:
            continue
        grid = [lo] + [Fraction(m, samples) for m in range(1, samples) if lo < Fraction(m, samples) < hi] + [hi]
        points = [p for p in (_sample_at(link, cell, s) for s in grid) if p is not None]
        if len(points) < 2:
            continue
        dense = [points[0]]
        for nxt in points[1:]:
            dense.extend(_refine(link, cell, dense[-1], nxt, 0, bound, cap))
        run: List[ObstructionSample] = []
        for s in dense:
            if circular_distance(s.coord.a, s.coord.b) < margin:
                if len(run) >= 2:
                    arcs.append(ObstructionArc(tuple(run), cell.rk, (cell.ri[1], cell.rj[1])))
                run = []
                continue
            run.append(s)
        if len(run) >= 2:
            arcs.append(ObstructionArc(tuple(run), cell.rk, (cell.ri[1], cell.rj[1])))
    return arcs


# ============ Float screen ============

def _orient_rows(p, q, r, s) -> np.ndarray:
    return np.einsum("...i,...i->...", q - p, np.cross(r - p, s - p))


def screen_cells(P: np.ndarray, Q: np.ndarray, gi: int, gj: int, ks: np.ndarray,
                 tol: float = 1e-7) -> np.ndarray:
    """
    Mask over middle edges ks: can cell (gi, gj, k) carry a trisecant?
    Mirrors the exact interval test in doubles and keeps anything close.
    """
    Pi, Qi, Pj, Qj = P[gi], Q[gi], P[gj], Q[gj]
    Pk, Qk = P[ks], Q[ks]
    f0a, f0b = _orient_rows(Pi, Pj, Pk, Qk), _orient_rows(Qi, Pj, Pk, Qk)
    f1a, f1b = _orient_rows(Pi, Qj, Pk, Qk), _orient_rows(Qi, Qj, Pk, Qk)
    g0a, g0b = _orient_rows(Pi, Pk, Pj, Qj), _orient_rows(Qi, Pk, Pj, Qj)
    g1a, g1b = _orient_rows(Pi, Qk, Pj, Qj), _orient_rows(Qi, Qk, Pj, Qj)
    alphas = np.stack([f0a, f1a, g0a, g1a, f0a - f1a], axis=1)
    betas = np.stack([f0b - f0a, f1b - f1a, g0b - g0a, g1b - g1a, (f0b - f1b) - (f0a - f1a)], axis=1)
    scale = np.abs(alphas).max(axis=1) + np.abs(betas).max(axis=1) + 1e-300
    flat = np.maximum.reduce([np.abs(f0a), np.abs(f0b), np.abs(f1a), np.abs(f1b)]) <= 1e-12 * scale

    m = len(ks)
    with np.errstate(divide="ignore", invalid="ignore"):
        roots = -alphas / betas
        roots[(np.abs(betas) <= 1e-14 * scale[:, None]) | ~((roots > 0) & (roots < 1))] = np.nan
        ev = np.sort(np.concatenate([np.zeros((m, 1)), roots, np.ones((m, 1))], axis=1), axis=1)
        clustered = np.any(ev[:, 1:] - ev[:, :-1] < 1e-7, axis=1)
        mids = (ev[:, :-1] + ev[:, 1:]) / 2.0
        A = Pi + mids[..., None] * (Qi - Pi)
        f0v = f0a[:, None] + (f0b - f0a)[:, None] * mids
        f1v = f1a[:, None] + (f1b - f1a)[:, None] * mids
        t = f0v / (f0v - f1v)
        B = Pj + t[..., None] * (Qj - Pj)
        D = B - A
        ek = (Qk - Pk)[:, None, :]
        n = np.cross(ek, D)
        u = np.sum(np.cross(A - Pk[:, None, :], D) * n, axis=-1) / np.sum(n * n, axis=-1)
        M = Pk[:, None, :] + u[..., None] * ek
        lam = np.sum((M - A) * D, axis=-1) / np.sum(D * D, axis=-1)
        valid = ((t >= -tol) & (t <= 1 + tol) & (u >= -tol) & (u <= 1 + tol)
                 & (lam > -tol) & (lam < 1 + tol))
    return np.any(valid, axis=1) | clustered | flat


def _cells_for_pair(link: PolyLink, P: np.ndarray, Q: np.ndarray, gi: int, gj: int) -> np.ndarray:
    """Middle edges whose box meets the box of e_i and e_j, then the float screen"""
    lo = np.minimum.reduce([P[gi], Q[gi], P[gj], Q[gj]])
    hi = np.maximum.reduce([P[gi], Q[gi], P[gj], Q[gj]])
    klo, khi = np.minimum(P, Q), np.maximum(P, Q)
    slack = 1e-9 * max(1.0, float(np.abs(P).max()))
    near = np.all((klo <= hi + slack) & (khi >= lo - slack), axis=1)
    near[[gi, gj]] = False
    ks = np.nonzero(near)[0]
    if len(ks) == 0:
        return ks
    return ks[screen_cells(P, Q, gi, gj, ks)]


# ============ Tracing ============

_TRACE_STATE: Dict[str, object] = {}


def _init_trace(link, samples, margin, bound, cap):
    _TRACE_STATE.update(link=link, samples=samples, margin=margin, bound=bound, cap=cap)


def _trace_pairs(pairs: Sequence[Tuple[int, int]]) -> Tuple[List[ObstructionArc], List[Tuple[int, int, Ref]]]:
    link = _TRACE_STATE["link"]
    edges = link.edges
    P, Q = edge_arrays(link)
    arcs, degenerate = [], []
    for gi, gj in pairs:
        for gk in _cells_for_pair(link, P, Q, gi, gj):
            ei, ej, ek = edges[gi], edges[gj], edges[int(gk)]
            cell = _make_cell(ei.segment, ej.segment, ek.segment,
                              (ei.component, ei.edge), (ej.component, ej.edge), (ek.component, ek.edge))
            if cell.f0 == (0, 0) and cell.f1 == (0, 0):
                degenerate.append((ei.edge, ej.edge, cell.rk))
                continue
            arcs.extend(_trace_cell(link, cell, _TRACE_STATE["samples"], _TRACE_STATE["margin"],
                                    _TRACE_STATE["bound"], _TRACE_STATE["cap"]))
    return arcs, degenerate

# ============ Chains ============

def _take(by_key: Dict[tuple, List[int]], used: List[bool], key: tuple) -> Optional[int]:
    for idx in by_key.get(key, ()):
        if not used[idx]:
            used[idx] = True
            return idx
    return None


def chain_arcs(arcs: Sequence[ObstructionArc]) -> List[ArcChain]:
    """
    Glue arcs whose end samples are the same secant. Every arc lands in
    exactly one chain; on a branching key the lowest arc index wins.
    """
    by_key: Dict[tuple, List[int]] = {}
    for idx, arc in enumerate(arcs):
        for key in {arc.samples[0].key, arc.samples[-1].key}:
            by_key.setdefault(key, []).append(idx)
    used = [False] * len(arcs)
    chains = []
    for start in range(len(arcs)):
        if used[start]:
            continue
        used[start] = True
        pieces = [(start, False)]
        head, tail = arcs[start].samples[0].key, arcs[start].samples[-1].key
        closed = head == tail
        while not closed:
            nxt = _take(by_key, used, tail)
            if nxt is None:
                break
            rev = arcs[nxt].samples[0].key != tail
            pieces.append((nxt, rev))
            tail = arcs[nxt].samples[0 if rev else -1].key
            closed = tail == head
        while not closed:
            prv = _take(by_key, used, head)
            if prv is None:
                break
            rev = arcs[prv].samples[-1].key != head
            pieces.insert(0, (prv, rev))
            head = arcs[prv].samples[-1 if rev else 0].key
            closed = head == tail
        samples: List[ObstructionSample] = []
        for idx, rev in pieces:
            seq = arcs[idx].samples[::-1] if rev else arcs[idx].samples
            samples.extend(seq if not samples else seq[1:])
        chains.append(ArcChain(tuple(pieces), tuple(samples), closed))
    return chains


def winding_class(coords: Sequence[MoebiusCoord], tol: float = 1e-9) -> int:
    """
    How often a closed loop of secants winds around the strip.

    The endpoints are lifted continuously. A loop that comes back with its
    endpoints exchanged winds once (1); one where each endpoint advances a
    full turn in the same sense winds twice (2); no net advance is 0.

    Raises:
        ChainNotClosedError: the loop does not return to its starting pair,
            or its lift advances the endpoints unequally
    """
    if len(coords) < 2:
        raise ChainNotClosedError("a loop needs at least two samples")
    first = coords[0]
    if first.distance(coords[-1]) > tol:
        raise ChainNotClosedError(f"chain ends at {coords[-1].canonical}, started at {first.canonical}")
    ca, cb = first.a, first.b
    la, lb = ca, cb
    for c in coords[1:]:
        direct = max(circular_distance(ca, c.a), circular_distance(cb, c.b))
        swapped = max(circular_distance(ca, c.b), circular_distance(cb, c.a))
        na, nb = (c.a, c.b) if direct <= swapped else (c.b, c.a)
        la += wrapped_step(ca, na)
        lb += wrapped_step(cb, nb)
        ca, cb = na, nb
    if circular_distance(ca, first.b) <= tol and circular_distance(cb, first.a) <= tol:
        return 1
    ka, kb = round(la - first.a), round(lb - first.b)
    if (ka, kb) == (0, 0):
        return 0
    if ka == kb and abs(ka) == 1:
        return 2
    raise ChainNotClosedError(f"lift advances the endpoints by ({ka}, {kb}) turns")


def _middle_turns(samples: Sequence[ObstructionSample]) -> Optional[int]:
    """Full turns of the middle point, when it stays on one component"""
    if len({s.middle.component for s in samples}) != 1:
        return None
    total = sum(wrapped_step(p.middle_param, q.middle_param) for p, q in zip(samples, samples[1:]))
    return int(round(total))


def _classify_chain(chain: ArcChain):
    chain.middle_components = tuple(sorted({s.middle.component for s in chain.samples}))
    if not chain.closed:
        return
    chain.winding_class = winding_class([s.coord for s in chain.samples])
    chain.middle_turns = _middle_turns(chain.samples)
    if chain.winding_class == 2 and chain.middle_turns is not None and abs(chain.middle_turns) != 1:
        logger.warning(f"class-2 chain with middle point turning {chain.middle_turns} times")


# ============ Crossings ============

def find_crossings(link: PolyLink, arcs: Sequence[ObstructionArc],
                   digits: int = KEY_DIGITS) -> List[Crossing]:
    """
    Self-crossings of the traced set. Two arcs over the same endpoint edges
    with different middle edges cross exactly where one secant carries both
    middle points; the four edges are solved exactly and the resulting line
    is a quadrisecant with the endpoint edges outermost.
    """
    groups: Dict[Tuple[Tuple[int, int], Ref], List[int]] = {}
    for idx, arc in enumerate(arcs):
        groups.setdefault((arc.endpoint_edges, arc.middle_edge), []).append(idx)
    by_pair: Dict[Tuple[int, int], List[Ref]] = {}
    for pair, middle in sorted(groups):
        by_pair.setdefault(pair, []).append(middle)

    segments = tuple(r.segment for r in link.edges)
    refs = tuple((r.component, r.edge) for r in link.edges)
    P, Q = edge_arrays(link)
    tol = 1e-9 * max(1.0, float(link.diameter()))
    found: Dict[tuple, Crossing] = {}
    for (i, j), middles in sorted(by_pair.items()):
        comp = arcs[groups[((i, j), middles[0])][0]].samples[0].a.component
        ri, rj = (comp, i), (comp, j)
        for rk, rl in combinations(middles, 2):
            outcome = transversals_of_four_edges(
                link.segment(*ri), link.segment(*rj), link.segment(*rk), link.segment(*rl),
                refs=(ri, rj, rk, rl))
            for trans in outcome.transversals:
                ends = {(h.point.component, h.point.edge) for h in (trans.hits[0], trans.hits[-1])}
                if ends != {ri, rj}:
                    continue
                s = next(h.point.t for h in trans.hits if (h.point.component, h.point.edge) == ri)
                first = _arc_containing(arcs, groups[((i, j), rk)], s)
                second = _arc_containing(arcs, groups[((i, j), rl)], s)
                if first is None or second is None:
                    continue
                full = extend_transversal(trans, segments, refs, P, Q, tol)
                q = finish_quadrisecant(full, link, digits)
                if q.key in found:
                    continue
                ea = next(h.point for h in trans.hits if (h.point.component, h.point.edge) == ri)
                eb = next(h.point for h in trans.hits if (h.point.component, h.point.edge) == rj)
                coord = MoebiusCoord(link.chart_param(ea), link.chart_param(eb))
                found[q.key] = Crossing((first, second), coord, q)
    return [found[k] for k in sorted(found)]


def _arc_containing(arcs: Sequence[ObstructionArc], candidates: Sequence[int], s) -> Optional[int]:
    for idx in candidates:
        lo, hi = arcs[idx].sigma_range
        if lo <= s <= hi:
            return idx
    return None


# ============ Atlas ============

def trace_obstruction(link: PolyLink, component: int, samples_per_edge: int = DEFAULT_SAMPLES,
                      workers: int = 1, margin: float = DIAGONAL_MARGIN,
                      step_bound: float = STEP_BOUND, refine_cap: int = REFINE_CAP,
                      digits: int = KEY_DIGITS) -> ObstructionAtlas:
    """
    Trace every trisecant with both endpoints on one component.

    Args:
        link: validated link
        component: component carrying the endpoints
        samples_per_edge: grid resolution per endpoint edge (at least 4)
        workers: processes for the per-edge-pair tracing phase

    Returns:
        ObstructionAtlas with arcs, crossings and classified chains

    Raises:
        StepSizeError: an arc stays discontinuous after refine_cap bisections
    """
    if not 0 <= component < link.n_components:
        raise IndexError(f"component {component} out of range")
    if samples_per_edge < 4:
        raise ValueError(f"need at least 4 samples per edge, got {samples_per_edge}")
    own = [r.index for r in link.component_edges(component)]
    pairs = list(combinations(own, 2))
    batches = [[p for p in pairs if p[0] == g] for g in own]
    batches = [b for b in batches if b]
    args = (link, samples_per_edge, margin, step_bound, refine_cap)

    parts = []
    if workers > 1 and len(batches) > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_trace, initargs=args) as pool:
            parts = list(pool.map(_trace_pairs, batches))
    else:
        _init_trace(*args)
        parts = [_trace_pairs(b) for b in batches]

    arcs = [arc for part_arcs, _ in parts for arc in part_arcs]
    arcs.sort(key=lambda a: (a.endpoint_edges, a.middle_edge, a.samples[0].sigma))
    atlas = ObstructionAtlas(component, samples_per_edge, arcs)
    atlas.degenerate_cells = sorted(cell for _, cells in parts for cell in cells)
    atlas.crossings = find_crossings(link, arcs, digits)
    atlas.chains = chain_arcs(arcs)
    for chain in atlas.chains:
        _classify_chain(chain)
        if chain.closed and len(chain.arcs) == 1:
            arcs[chain.arcs[0][0]].closed = True

    logger.info(f"component {component}: {len(arcs)} arcs, {len(atlas.crossings)} crossings, "
                f"{sum(c.closed for c in atlas.chains)}/{len(atlas.chains)} closed chains")
    if atlas.degenerate_cells:
        logger.warning(f"{len(atlas.degenerate_cells)} cells with a whole family of trisecants, "
                       f"first {atlas.degenerate_cells[0]}")
    return atlas


# ============ Clear fibers and chord disks ============

def _apex_candidates(link: PolyLink, component: int, refinements: int) -> List[LinkPoint]:
    out = []
    for e in range(link.edge_count(component)):
        for r in range(1, refinements + 1):
            out.extend(LinkPoint(component, e, Fraction(m, 2 ** r)) for m in range(1, 2 ** r, 2))
    return out


def _fan_witness(link: PolyLink, component: int, apex: LinkPoint) -> Optional[tuple]:
    """First (apex, point, fan edge, link edge) where a chord from the apex meets the link"""
    X = Point3(*link.point(apex))
    Xf = np.array(X.f)
    P, Q = edge_arrays(link)
    lo, hi = np.minimum(P, Q), np.maximum(P, Q)
    slack = 1e-9 * max(1.0, float(np.abs(P).max()))
    apex_g = link.edge_index(component, apex.edge)
    for ref in link.component_edges(component):
        j = ref.index
        if j == apex_g:
            continue
        tri_lo = np.minimum.reduce([Xf, P[j], Q[j]]) - slack
        tri_hi = np.maximum.reduce([Xf, P[j], Q[j]]) + slack
        near = np.nonzero(np.all((lo <= tri_hi) & (hi >= tri_lo), axis=1))[0]
        for k in near:
            k = int(k)
            if k == j or (k == apex_g and link.adjacent(j, apex_g)):
                continue
            seg = link.edges[k].segment
            hit = triangle_meets_segment(X, ref.segment.a, ref.segment.b, seg.a, seg.b)
            if hit is not None:
                return X.xyz, tuple(hit), (ref.component, ref.edge), (link.edges[k].component, link.edges[k].edge)
    return None


def find_clear_arc(atlas: ObstructionAtlas, link: PolyLink, component: Optional[int] = None,
                   refinements: int = CLEAR_ARC_REFINEMENTS) -> Optional[LinkPoint]:
    """
    Apex whose whole fiber of secants avoids the traced set, or None.

    Candidates are edge-interior points at dyadic subdivisions, tried
    farthest from every traced endpoint first; each is confirmed exactly
    by checking that no chord from it meets the link.
    """
    component = atlas.component if component is None else component
    candidates = _apex_candidates(link, component, refinements)
    ends = np.array([c for arc in atlas.arcs for s in arc.samples for c in (s.coord.a, s.coord.b)])
    if len(ends):
        params = np.array([link.chart_param(c) for c in candidates])
        d = np.abs(params[:, None] - ends[None, :]) % 1.0
        clearance = np.minimum(d, 1.0 - d).min(axis=1)
    else:
        clearance = np.ones(len(candidates))
    order = sorted(range(len(candidates)),
                   key=lambda i: (-round(float(clearance[i]), 12), candidates[i].edge, candidates[i].t))
    for tried, i in enumerate(order, 1):
        if _fan_witness(link, component, candidates[i]) is None:
            logger.info(f"clear apex {candidates[i]} after {tried} candidate(s)")
            return candidates[i]
    logger.info(f"no clear apex among {len(candidates)} candidates on component {component}")
    return None


def build_chord_disk(link: PolyLink, component: int, apex: LinkPoint, verify: bool = True) -> ChordDisk:
    """
    Fan of chord triangles from the apex over every edge of the component.
    The triangle over the apex edge itself is degenerate.

    Raises:
        ChordVerificationError: some chord interior meets the link
    """
    if apex.component != component:
        raise ValueError(f"apex on component {apex.component}, disk asked for {component}")
    if verify:
        witness = _fan_witness(link, component, apex)
        if witness is not None:
            raise ChordVerificationError(
                f"chord from the apex meets edge {witness[3]} inside the triangle over edge {witness[2]}",
                witness)
    X = link.point(apex)
    triangles, degenerate = [], []
    for ref in link.component_edges(component):
        triangles.append((X, ref.segment.a.xyz, ref.segment.b.xyz))
        degenerate.append(collinear3(X, ref.segment.a, ref.segment.b))
    return ChordDisk(apex, X, tuple(triangles), tuple(degenerate))


def farthest_vertex_is_extreme(link: PolyLink, atlas: Optional[ObstructionAtlas] = None) -> bool:
    """
    The vertex V farthest from the origin has the strict supporting plane
    x . V = |V|^2, so it never lies strictly between two link points.
    With an atlas, no traced middle point may sit on V either.
    """
    verts = [v for comp in link.components for v in comp]
    V = max(verts, key=lambda v: (vdot(v, v), tuple(-c for c in v.xyz)))
    r2 = vdot(V, V)
    if any(vdot(w, V) >= r2 for w in verts if w != V):
        return False
    if atlas is not None:
        for arc in atlas.arcs:
            if any(link.point(s.middle) == V.xyz for s in arc.samples):
                return False
    return True
