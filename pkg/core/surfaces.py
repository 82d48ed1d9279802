"""
Algebraic surfaces
Torus quartics under exact rational poses, the linked pair of tori, and
the degree lower bound from real roots on a line
"""
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from sympy import Poly, QQ, Rational, expand

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.algebra import (TriPoly, UniPoly, X, Y, Z, count_with_multiplicity, restrict_to_line,
                          sturm_count)
from core.predicates import Dir3, PluckerLine, Point3, vcross
from core.utils import format_rational, get_logger

logger = get_logger("surfaces", "algebra.log")

Matrix3 = Tuple[Tuple[Fraction, Fraction, Fraction], ...]

# Circle parameters m giving rational points ((1-m^2)/(1+m^2), 2m/(1+m^2))
_CIRCLE_PARAMS = (Fraction(0), Fraction(1, 2), Fraction(2), Fraction(-1, 3),
                  Fraction(3), Fraction(-2), Fraction(1, 5), Fraction(-4))


class TorusConfigurationError(ValueError):
    """Radii or pose violate the torus preconditions"""


class ConsistencyError(RuntimeError):
    """An internal cross-check of the pipeline failed"""


# ============ Poses ============

def rotation_from_quaternion(a, b, c, d) -> Matrix3:
    """Exactly orthogonal rational rotation of the quaternion (a, b, c, d)"""
    a, b, c, d = (Fraction(v) for v in (a, b, c, d))
    n = a * a + b * b + c * c + d * d
    if n == 0:
        raise TorusConfigurationError("zero quaternion")
    rows = (
        (a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)),
        (2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)),
        (2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d),
    )
    return tuple(tuple(v / n for v in row) for row in rows)


IDENTITY: Matrix3 = rotation_from_quaternion(1, 0, 0, 0)
QUARTER_TURN_X: Matrix3 = rotation_from_quaternion(1, 1, 0, 0)


def _det(m: Matrix3) -> Fraction:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


@dataclass(frozen=True)
class Pose:
    """world = rotation * local + translation"""
    rotation: Matrix3 = IDENTITY
    translation: Tuple[Fraction, Fraction, Fraction] = (Fraction(0), Fraction(0), Fraction(0))

    def apply(self, p: Point3) -> Point3:
        v = p.xyz
        return Point3(*(sum(self.rotation[i][k] * v[k] for k in range(3)) + self.translation[i]
                        for i in range(3)))

    @property
    def determinant(self) -> Fraction:
        return _det(self.rotation)

    def orthogonality_defect(self) -> float:
        r = self.rotation
        worst = Fraction(0)
        for i in range(3):
            for j in range(3):
                dot = sum(r[k][i] * r[k][j] for k in range(3))
                worst = max(worst, abs(dot - (1 if i == j else 0)))
        return float(worst)


@dataclass(frozen=True)
class TorusSpec:
    r1: Fraction
    r2: Fraction
    pose: Pose = field(default_factory=Pose)

    def __post_init__(self):
        object.__setattr__(self, "r1", Fraction(self.r1))
        object.__setattr__(self, "r2", Fraction(self.r2))
        if not self.r1 > self.r2 > 0:
            raise TorusConfigurationError(f"need r1 > r2 > 0, got r1={self.r1}, r2={self.r2}")
        if abs(float(self.pose.determinant) - 1.0) > 1e-12 or self.pose.orthogonality_defect() > 1e-12:
            raise TorusConfigurationError("pose rotation is not a proper rotation")


# ============ Tori ============

def torus_quartic(spec: TorusSpec) -> TriPoly:
    """
    (X^2 + Y^2 + Z^2 + r1^2 - r2^2)^2 - 4 r1^2 (X^2 + Y^2) in local
    coordinates, local = R^T (world - translation).
    """
    r, t = spec.pose.rotation, spec.pose.translation
    world = (X, Y, Z)
    local = [sum(Rational(r[k][i].numerator, r[k][i].denominator)
                 * (world[k] - Rational(t[k].numerator, t[k].denominator)) for k in range(3))
             for i in range(3)]
    r1s = Rational(spec.r1.numerator, spec.r1.denominator) ** 2
    r2s = Rational(spec.r2.numerator, spec.r2.denominator) ** 2
    lx, ly, lz = local
    expr = (lx ** 2 + ly ** 2 + lz ** 2 + r1s - r2s) ** 2 - 4 * r1s * (lx ** 2 + ly ** 2)
    return TriPoly.from_poly(Poly(expand(expr), X, Y, Z, domain=QQ))


def _circle(m: Fraction) -> Tuple[Fraction, Fraction]:
    return (1 - m * m) / (1 + m * m), 2 * m / (1 + m * m)


def torus_sample_points(spec: TorusSpec, count: int = 16) -> List[Point3]:
    """Exact rational points on the torus from the rational circle parametrization"""
    side = 1
    while side * side < count:
        side += 1
    if side > len(_CIRCLE_PARAMS):
        raise ValueError(f"at most {len(_CIRCLE_PARAMS) ** 2} sample points")
    points = []
    for mu in _CIRCLE_PARAMS[:side]:
        cphi, sphi = _circle(mu)
        for nu in _CIRCLE_PARAMS[:side]:
            cth, sth = _circle(nu)
            rad = spec.r1 + spec.r2 * cth
            points.append(spec.pose.apply(Point3(rad * cphi, rad * sphi, spec.r2 * sth)))
            if len(points) == count:
                return points
    return points


def check_samples(surface: TriPoly, points: Sequence[Point3]):
    """Every sample must evaluate to exactly zero"""
    for p in points:
        value = surface(p)
        if value != 0:
            raise ConsistencyError(f"surface does not vanish at {tuple(float(c) for c in p.xyz)}: {value}")


def linked_pair_specs(r1, r2) -> Tuple[TorusSpec, TorusSpec]:
    """
    Standard torus and its copy turned a quarter about the x-axis and moved
    by r1 along it, so the core circles form a Hopf link.
    """
    r1, r2 = Fraction(r1), Fraction(r2)
    if not r1 > 2 * r2:
        raise TorusConfigurationError(f"linked tori need r1 > 2 r2, got r1={r1}, r2={r2}")
    first = TorusSpec(r1, r2)
    second = TorusSpec(r1, r2, Pose(QUARTER_TURN_X, (r1, Fraction(0), Fraction(0))))
    return first, second


def linked_pair_surface(r1, r2) -> TriPoly:
    """Product of the two linked torus quartics, total degree 8"""
    first, second = linked_pair_specs(r1, r2)
    surface = torus_quartic(first) * torus_quartic(second)
    logger.info(f"linked pair r1={r1} r2={r2}: {len(surface.terms)} terms, degree {surface.total_degree}")
    return surface


def auto_piercing_line(r1, r2) -> Tuple[Point3, Dir3]:
    """
    The x-axis: it pierces the first torus at +-(r1 +- r2) and the second at
    r1 +- (r1 +- r2), eight simple real roots in all.
    """
    linked_pair_specs(r1, r2)
    return Point3.of(0, 0, 0), Dir3.of(1, 0, 0)


# ============ Degree bound ============

@dataclass
class Degree8Report:
    surface: TriPoly
    anchor: Point3
    direction: Point3
    restricted: UniPoly
    root_count: Optional[int]
    distinct_roots: Optional[int]
    degree_bound: Optional[int]
    flagged: bool = False

    @property
    def line(self) -> PluckerLine:
        return PluckerLine(direction=self.direction.xyz, moment=vcross(self.anchor, self.direction))

    @property
    def conclusion(self) -> str:
        if self.flagged:
            return "restriction vanishes identically: the line lies in the surface, no bound"
        return f"surface degree >= {self.degree_bound}"

    def to_dict(self) -> dict:
        return {
            "surface_total_degree": self.surface.total_degree,
            "surface_terms": len(self.surface.terms),
            "line": {"anchor": [format_rational(c) for c in self.anchor.xyz],
                     "direction": [format_rational(c) for c in self.direction.xyz]},
            "restricted": [format_rational(c) for c in self.restricted.coeffs],
            "restricted_degree": self.restricted.degree,
            "root_count": self.root_count,
            "distinct_roots": self.distinct_roots,
            "degree_bound": self.degree_bound,
            "flagged": self.flagged,
            "conclusion": self.conclusion,
        }


def verify_degree_bound(surface: TriPoly, anchor: Point3, direction: Point3) -> Degree8Report:
    """
    Count the real roots of the surface on the line, with multiplicity. A
    nonzero restriction with k real roots proves the surface has degree >= k.

    Raises:
        ConsistencyError: root count > restricted degree > surface degree
    """
    restricted = restrict_to_line(surface, anchor, direction)
    if restricted.is_zero:
        return Degree8Report(surface, anchor, direction, restricted, None, None, None, flagged=True)
    roots = count_with_multiplicity(restricted)
    distinct = sturm_count(restricted)
    report = Degree8Report(surface, anchor, direction, restricted, roots, distinct, roots)
    if not (distinct <= roots <= restricted.degree <= surface.total_degree):
        raise ConsistencyError(f"inconsistent degree report: {distinct} distinct, {roots} roots, "
                               f"restricted degree {restricted.degree}, surface degree {surface.total_degree}")
    logger.info(f"degree bound: {roots} real roots -> degree >= {roots}")
    return report


def verify_quadrisecant_bound(surface: TriPoly, q) -> Degree8Report:
    """Degree bound along the line of a quadrisecant; the line must be rational"""
    trans = q.transversal
    if not all(isinstance(c, Fraction) for c in trans.anchor + trans.direction):
        raise ValueError("quadrisecant line has irrational coordinates")
    return verify_degree_bound(surface, Point3(*trans.anchor), Point3(*trans.direction))