"""
Winding numbers of trisecant families
Rotation-minimizing normal frames along a component and the pair of
winding numbers of a closed family of trisecants with middle points on it
"""
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from config import INTEGRALITY_TOL
from core.link_model import LinkPoint, PolyLink
from core.obstruction import ArcChain, ObstructionAtlas, wrapped_step
from core.predicates import vcross, vdot, vsub, vzero
from core.stabbing import meet_segment
from core.utils import get_logger

logger = get_logger("winding", "winding.log")

TURN = 2.0 * np.pi


class IntegralityError(RuntimeError):
    """An accumulated winding is not within tolerance of an integer"""

    def __init__(self, message: str, defect: float):
        super().__init__(message)
        self.defect = defect


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _rotate(x: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation of x about a unit axis"""
    c, s = np.cos(angle), np.sin(angle)
    return x * c + np.cross(axis, x) * s + axis * np.dot(axis, x) * (1.0 - c)


def _transport(x: np.ndarray, t_from: np.ndarray, t_to: np.ndarray) -> np.ndarray:
    """Smallest rotation taking t_from to t_to, applied to x"""
    axis = np.cross(t_from, t_to)
    norm = np.linalg.norm(axis)
    if norm <= 1e-15:
        return x
    return _rotate(x, axis / norm, np.arctan2(norm, np.dot(t_from, t_to)))


# ============ Normal frame ============

@dataclass
class NormalFrame:
    """
    Per-edge unit tangents and transported normals (u, v) of one component.

    Transport around the loop comes back rotated by `holonomy` radians; the
    frame at chart parameter s is turned by (twist * pi - holonomy) * s so it
    closes up as a frame of perpendicular lines. twist counts extra turns of
    the line circle.
    """
    component: int
    tangents: np.ndarray
    u: np.ndarray
    v: np.ndarray
    holonomy: float
    twist: int = 0

    @property
    def correction(self) -> float:
        return self.twist * np.pi - self.holonomy

    def at(self, edge: int, s: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(tangent, u, v) on an edge at chart parameter s"""
        t = self.tangents[edge]
        angle = self.correction * s
        return t, _rotate(self.u[edge], t, angle), _rotate(self.v[edge], t, angle)


def _initial_normal(verts: np.ndarray, t0: np.ndarray) -> np.ndarray:
    """Newell normal of the polygon made perpendicular to t0; an axis if that vanishes"""
    nxt = np.roll(verts, -1, axis=0)
    newell = np.cross(verts, nxt).sum(axis=0)
    u = newell - np.dot(newell, t0) * t0
    if np.linalg.norm(u) <= 1e-12 * max(1.0, np.linalg.norm(newell)):
        axis = np.eye(3)[int(np.argmin(np.abs(t0)))]
        u = axis - np.dot(axis, t0) * t0
    return _unit(u)


def build_normal_frame(link: PolyLink, component: int, twist: int = 0) -> NormalFrame:
    """
    Discrete rotation-minimizing frame along a component.

    Planar components start from their plane normal, which every transport
    step keeps fixed, so their holonomy is zero.
    """
    if link.edge_count(component) < 3:
        raise ValueError(f"component {component} needs at least 3 edges")
    verts = np.array([v.f for v in link.components[component]], dtype=np.float64)
    tangents = np.array([_unit(b - a) for a, b in zip(verts, np.roll(verts, -1, axis=0))])
    n = len(tangents)
    u = np.empty((n, 3))
    u[0] = _initial_normal(verts, tangents[0])
    for e in range(1, n):
        u[e] = _unit(_transport(u[e - 1], tangents[e - 1], tangents[e]))
    back = _transport(u[-1], tangents[-1], tangents[0])
    holonomy = float(np.arctan2(np.dot(np.cross(u[0], back), tangents[0]), np.dot(u[0], back)))
    v = np.cross(tangents, u)
    logger.info(f"normal frame on component {component}: holonomy {holonomy:.6g} rad, twist {twist}")
    return NormalFrame(component, tangents, u, v, holonomy, twist)


# ============ Families ============

@dataclass(frozen=True)
class TrisecantRecord:
    a: LinkPoint
    b: LinkPoint
    middle: LinkPoint
    middle_param: float
    direction: Tuple[float, float, float]
    lam: float


@dataclass
class TrisecantFamily:
    """Cyclic list of trisecants with endpoints on K and middle points on H"""
    K: int
    H: int
    records: Tuple[TrisecantRecord, ...]
    winding_class: Optional[int] = None

    @property
    def surface(self) -> str:
        """Swept family of secants: a Moebius band for class 1, an annulus otherwise"""
        if self.winding_class is None:
            return "unknown"
        return "moebius" if self.winding_class == 1 else "annulus"

    def reversed(self) -> "TrisecantFamily":
        return TrisecantFamily(self.K, self.H, self.records[::-1], self.winding_class)


def _record(link: PolyLink, sample) -> TrisecantRecord:
    A = np.array([float(c) for c in link.point(sample.a)])
    B = np.array([float(c) for c in link.point(sample.b)])
    return TrisecantRecord(sample.a, sample.b, sample.middle, sample.middle_param,
                           tuple(float(c) for c in B - A), float(sample.lam))


def family_from_chain(link: PolyLink, chain: ArcChain, K: int, H: int) -> TrisecantFamily:
    samples = chain.samples[:-1] if chain.closed else chain.samples
    return TrisecantFamily(K, H, tuple(_record(link, s) for s in samples), chain.winding_class)


def extract_families(atlas: ObstructionAtlas, link: PolyLink, K: int, H: int) -> List[TrisecantFamily]:
    """Closed chains of the atlas whose middle points all lie on H"""
    if atlas.component != K:
        raise ValueError(f"atlas traced for component {atlas.component}, not {K}")
    if not 0 <= H < link.n_components:
        return []
    families = [family_from_chain(link, c, K, H) for c in atlas.chains
                if c.closed and c.middle_components == (H,)]
    logger.info(f"{len(families)} closed families with endpoints on {K}, middle points on {H}")
    return families


# ============ Winding numbers ============

@dataclass
class WindingResult:
    omega1: int
    omega2: int
    defect1: float
    defect2: float
    samples: int
    middle_travel: float
    line_angles: Tuple[float, ...]
    middle_params: Tuple[float, ...]


def _line_angle(record: TrisecantRecord, frame: NormalFrame) -> float:
    t, u, v = frame.at(record.middle.edge, record.middle_param)
    d = np.asarray(record.direction, dtype=np.float64)
    d = d - np.dot(d, t) * t
    if np.linalg.norm(d) <= 1e-12 * max(1.0, np.linalg.norm(record.direction)):
        raise IntegralityError(f"trisecant direction is tangent to component {frame.component} "
                               f"at {record.middle}", float("nan"))
    return float(np.arctan2(np.dot(d, v), np.dot(d, u)))


def _integral(total: float, what: str) -> Tuple[int, float]:
    k = int(round(total))
    defect = abs(total - k)
    if defect > INTEGRALITY_TOL:
        raise IntegralityError(f"{what} accumulates {total:.9f} turns, defect {defect:.3g}", defect)
    return k, defect


def winding_details(family: TrisecantFamily, frame: NormalFrame) -> WindingResult:
    """
    omega2: signed turns of the middle point around H.
    omega1: signed turns of the trisecant, projected to the plane normal to H
    and read as an unoriented line against the frame; one turn of that
    circle of lines is half a turn of a direction vector.

    Raises:
        IntegralityError: either accumulation misses an integer by more
            than the tolerance
    """
    if frame.component != family.H:
        raise ValueError(f"frame on component {frame.component}, family middle points on {family.H}")
    records = family.records
    if not records:
        raise ValueError("empty family")
    cyclic = records + records[:1]
    angles = [_line_angle(r, frame) for r in cyclic]
    params = [r.middle_param for r in cyclic]
    steps2 = [wrapped_step(p, q) for p, q in zip(params, params[1:])]
    # line angles live modulo pi: wrap each increment into [-pi/2, pi/2)
    steps1 = [(b - a + np.pi / 2) % np.pi - np.pi / 2 for a, b in zip(angles, angles[1:])]
    omega2, defect2 = _integral(sum(steps2), "middle point")
    omega1, defect1 = _integral(sum(steps1) / np.pi, "projected trisecant")
    return WindingResult(omega1, omega2, defect1, defect2, len(records),
                         float(sum(abs(s) for s in steps2)), tuple(angles), tuple(params))


def winding_pair(family: TrisecantFamily, frame: NormalFrame) -> Tuple[int, int]:
    result = winding_details(family, frame)
    return result.omega1, result.omega2


def point_between(link: PolyLink, K: int, p) -> bool:
    """
    Whether p lies strictly inside a secant of component K.

    For each edge e of K, every other edge f that crosses the plane through
    p and e gives one candidate line, through p and the crossing point y; p is
    between when that line meets e on the far side of p from y.
    """
    segs = [link.segment(K, i) for i in range(link.edge_count(K))]
    for i, e in enumerate(segs):
        n = vcross(vsub(e.a, p), vsub(e.b, p))
        if vzero(n):
            continue
        for j, f in enumerate(segs):
            if i == j:
                continue
            da, db = vdot(vsub(f.a, p), n), vdot(vsub(f.b, p), n)
            if da == db or (da > 0 and db > 0) or (da < 0 and db < 0):
                continue
            y = f.at(da / (da - db))
            away = vsub(p, y)
            if vzero(away):
                continue
            met = meet_segment(p, away, e, closed=True)
            if met is not None and met[1] > 0:
                return True
    return False


def middle_points_between(family: TrisecantFamily, link: PolyLink, samples_per_edge: int = 2) -> bool:
    """Every sampled point of H lies strictly between two points of K"""
    for edge in range(link.edge_count(family.H)):
        for k in range(samples_per_edge):
            p = link.point(LinkPoint(family.H, edge, Fraction(k, samples_per_edge)))
            if not point_between(link, family.K, p):
                return False
    return True
