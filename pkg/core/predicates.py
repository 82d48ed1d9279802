"""
Exact geometric predicates
Rational points and directions, Plücker lines, orientation tests

Every predicate is exact over the rationals. Orientation signs are first
evaluated in double precision with a forward error bound and only escalate
to Fraction arithmetic when the bound straddles zero.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import isqrt, sqrt
from typing import Optional, Sequence, Tuple, Union

import numpy as np

Rat = Fraction

# Unit roundoff of IEEE double
_U = float(np.finfo(np.float64).eps) / 2.0
# Bounds are looser than the classic input-exact ones because Fraction inputs
# are themselves rounded to doubles before the filtered evaluation.
O3D_ERRBOUND = (32.0 + 512.0 * _U) * _U
CROSS_ERRBOUND = (16.0 + 128.0 * _U) * _U


class DegenerateSecantError(ValueError):
    """Two coincident points were asked to span a line"""


# ============ Quadratic surds ============

def _is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def _rational_sqrt(d: Fraction) -> Optional[Fraction]:
    """sqrt(d) when it is rational"""
    if d < 0:
        return None
    if _is_square(d.numerator) and _is_square(d.denominator):
        return Fraction(isqrt(d.numerator), isqrt(d.denominator))
    return None


@dataclass(frozen=True, eq=False)
class QuadSurd:
    """
    Exact number a + b*sqrt(d) with rational a, b and a positive
    non-square rational radicand d. Values with b == 0 are always
    collapsed to plain Fractions by the arithmetic below.
    """
    a: Fraction
    b: Fraction
    d: Fraction

    @staticmethod
    def sqrt(d: Union[int, Fraction]) -> Union[Fraction, "QuadSurd"]:
        d = Fraction(d)
        if d < 0:
            raise ValueError(f"square root of negative radicand {d}")
        r = _rational_sqrt(d)
        if r is not None:
            return r
        return QuadSurd(Fraction(0), Fraction(1), d)

    @staticmethod
    def make(a, b, d) -> Union[Fraction, "QuadSurd"]:
        a, b = Fraction(a), Fraction(b)
        if b == 0:
            return a
        return QuadSurd(a, b, Fraction(d))

    def _parts(self, other) -> Tuple[Fraction, Fraction]:
        if isinstance(other, QuadSurd):
            if other.d != self.d:
                raise ValueError(f"mixed radicands {self.d} and {other.d}")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        raise TypeError(f"cannot combine QuadSurd with {type(other).__name__}")

    def __add__(self, other):
        try:
            a, b = self._parts(other)
        except TypeError:
            return NotImplemented
        return QuadSurd.make(self.a + a, self.b + b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        try:
            a, b = self._parts(other)
        except TypeError:
            return NotImplemented
        return QuadSurd.make(self.a - a, self.b - b, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            a, b = self._parts(other)
        except TypeError:
            return NotImplemented
        return QuadSurd.make(self.a * a + self.b * b * self.d,
                             self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def __truediv__(self, other):
        try:
            a, b = self._parts(other)
        except TypeError:
            return NotImplemented
        den = a * a - b * b * self.d
        if den == 0:
            raise ZeroDivisionError("QuadSurd division by zero")
        # multiply by the conjugate of the divisor
        return QuadSurd.make((self.a * a - self.b * b * self.d) / den,
                             (self.b * a - self.a * b) / den, self.d)

    def __rtruediv__(self, other):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadSurd division by zero")
        inv = QuadSurd.make(self.a / n, -self.b / n, self.d)
        return inv * other

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa if sa != 0 else sb
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with b^2 d
        lhs, rhs = self.a * self.a, self.b * self.b * self.d
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * sqrt(float(self.d))

    def __eq__(self, other):
        if isinstance(other, QuadSurd):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return False  # b is never zero here
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        return exact_sign(self - other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __repr__(self):
        return f"QuadSurd({self.a} + {self.b}*sqrt({self.d}))"


Exact = Union[Fraction, QuadSurd]


def exact_sign(x) -> int:
    """Sign of a Fraction, int or QuadSurd"""
    if isinstance(x, QuadSurd):
        return x.sign()
    return (x > 0) - (x < 0)


# ============ Points and directions ============

@dataclass(frozen=True)
class Point3:
    """Point of R^3 with exact rational coordinates"""
    x: Fraction
    y: Fraction
    z: Fraction

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = getattr(self, name)
            if not isinstance(value, Fraction):
                object.__setattr__(self, name, Fraction(value))

    @classmethod
    def of(cls, x, y, z) -> "Point3":
        return cls(Fraction(x), Fraction(y), Fraction(z))

    @property
    def xyz(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.x, self.y, self.z)

    @cached_property
    def f(self) -> Tuple[float, float, float]:
        """Correctly rounded double coordinates"""
        return (float(self.x), float(self.y), float(self.z))

    def __add__(self, other: "Point3") -> "Point3":
        return Point3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Point3") -> "Point3":
        return Point3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, k) -> "Point3":
        k = Fraction(k)
        return Point3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: "Point3") -> Fraction:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Point3") -> "Point3":
        return Point3(*vcross(self.xyz, other.xyz))

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0 and self.z == 0


@dataclass(frozen=True)
class Dir3(Point3):
    """Unnormalized direction; normalization is a view, never state"""

    def __post_init__(self):
        super().__post_init__()
        if self.is_zero():
            raise ValueError("direction must be nonzero")

    def normalized(self) -> np.ndarray:
        v = np.array(self.f, dtype=np.float64)
        return v / np.linalg.norm(v)

    def same_line_direction(self, other: "Dir3") -> bool:
        """Projective equality: parallel, either sense"""
        return Point3.cross(self, other).is_zero()

    def same_sense(self, other: "Dir3") -> bool:
        return self.same_line_direction(other) and self.dot(other) > 0


# Generic 3-vector helpers; entries may be Fraction or QuadSurd

def _xyz(p) -> tuple:
    return p.xyz if isinstance(p, Point3) else tuple(p)


def vadd(u, v) -> tuple:
    u, v = _xyz(u), _xyz(v)
    return (u[0] + v[0], u[1] + v[1], u[2] + v[2])


def vsub(u, v) -> tuple:
    u, v = _xyz(u), _xyz(v)
    return (u[0] - v[0], u[1] - v[1], u[2] - v[2])


def vscale(u, k) -> tuple:
    u = _xyz(u)
    return (u[0] * k, u[1] * k, u[2] * k)


def vdot(u, v):
    u, v = _xyz(u), _xyz(v)
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def vcross(u, v) -> tuple:
    u, v = _xyz(u), _xyz(v)
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def vzero(u) -> bool:
    return all(exact_sign(c) == 0 for c in _xyz(u))


def vfloat(u) -> Tuple[float, float, float]:
    u = _xyz(u)
    return (float(u[0]), float(u[1]), float(u[2]))


# ============ Lines and segments ============

@dataclass(frozen=True)
class PluckerLine:
    """
    Line as (direction, moment) with moment = p x direction for any point p
    on the line. Entries are exact (Fraction, or QuadSurd for lines through
    irrational transversal roots).
    """
    direction: tuple
    moment: tuple

    def __post_init__(self):
        if vzero(self.direction):
            raise ValueError("Plücker direction must be nonzero")
        if exact_sign(vdot(self.direction, self.moment)) != 0:
            raise ValueError("Plücker relation violated: moment . direction != 0")

    def contains(self, point) -> bool:
        """Exact incidence by substitution"""
        return vzero(vsub(vcross(point, self.direction), self.moment))


@dataclass(frozen=True)
class Segment3:
    """Closed segment a-b; link edges use the half-open view t in [0, 1)"""
    a: Point3
    b: Point3

    def __post_init__(self):
        if self.a == self.b:
            raise DegenerateSecantError(f"segment endpoints coincide at {self.a.xyz}")

    @property
    def vector(self) -> Point3:
        return self.b - self.a

    def at(self, t) -> tuple:
        """Point a + t (b - a); t may be Fraction or QuadSurd"""
        return vadd(self.a, vscale(self.vector, t))

    def point(self, t: Fraction) -> Point3:
        return Point3(*self.at(Fraction(t)))

    def bbox(self) -> Tuple[Tuple[float, float, float], Tuple[float, float, float]]:
        fa, fb = self.a.f, self.b.f
        return (tuple(min(p, q) for p, q in zip(fa, fb)),
                tuple(max(p, q) for p, q in zip(fa, fb)))


# ============ Predicates ============

def _det3(u, v, w):
    return (u[0] * (v[1] * w[2] - v[2] * w[1])
            - u[1] * (v[0] * w[2] - v[2] * w[0])
            + u[2] * (v[0] * w[1] - v[1] * w[0]))


def orient3d(p, q, r, s):
    """
    Exact determinant of rows (q - p, r - p, s - p).

    Zero iff the four points are coplanar; the unit tetrahedron
    (0,0,0),(1,0,0),(0,1,0),(0,0,1) gives 1.
    """
    return _det3(vsub(q, p), vsub(r, p), vsub(s, p))


def _orient3d_filter(p: Point3, q: Point3, r: Point3, s: Point3) -> Optional[int]:
    """Sign from doubles, or None when the error bound straddles zero"""
    pf, qf, rf, sf = p.f, q.f, r.f, s.f
    u = [qf[i] - pf[i] for i in range(3)]
    v = [rf[i] - pf[i] for i in range(3)]
    w = [sf[i] - pf[i] for i in range(3)]
    ua = [abs(qf[i]) + abs(pf[i]) for i in range(3)]
    va = [abs(rf[i]) + abs(pf[i]) for i in range(3)]
    wa = [abs(sf[i]) + abs(pf[i]) for i in range(3)]
    det = (u[0] * (v[1] * w[2] - v[2] * w[1])
           - u[1] * (v[0] * w[2] - v[2] * w[0])
           + u[2] * (v[0] * w[1] - v[1] * w[0]))
    permanent = (ua[0] * (va[1] * wa[2] + va[2] * wa[1])
                 + ua[1] * (va[0] * wa[2] + va[2] * wa[0])
                 + ua[2] * (va[0] * wa[1] + va[1] * wa[0]))
    bound = O3D_ERRBOUND * permanent
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return None


def orient3d_sign(p: Point3, q: Point3, r: Point3, s: Point3) -> int:
    """Sign of orient3d with the double-precision filter"""
    sign = _orient3d_filter(p, q, r, s)
    if sign is not None:
        return sign
    return exact_sign(orient3d(p, q, r, s))


def collinear3(p, q, r) -> bool:
    """True iff (q - p) x (r - p) is exactly zero (p = q counts as collinear)"""
    if isinstance(p, Point3) and isinstance(q, Point3) and isinstance(r, Point3):
        pf, qf, rf = p.f, q.f, r.f
        u = [qf[i] - pf[i] for i in range(3)]
        v = [rf[i] - pf[i] for i in range(3)]
        ua = [abs(qf[i]) + abs(pf[i]) for i in range(3)]
        va = [abs(rf[i]) + abs(pf[i]) for i in range(3)]
        for i, j in ((1, 2), (2, 0), (0, 1)):
            c = u[i] * v[j] - u[j] * v[i]
            bound = CROSS_ERRBOUND * (ua[i] * va[j] + ua[j] * va[i])
            if abs(c) > bound:
                return False
    return vzero(vcross(vsub(q, p), vsub(r, p)))


def side_product(l1: PluckerLine, l2: PluckerLine):
    """Reciprocal product; zero iff the lines meet or are parallel"""
    return vdot(l1.direction, l2.moment) + vdot(l2.direction, l1.moment)


def line_through(p, q) -> PluckerLine:
    """Line through p and q, verified to contain both"""
    d = vsub(q, p)
    if vzero(d):
        raise DegenerateSecantError(f"degenerate secant: both points at {vfloat(p)}")
    line = PluckerLine(direction=d, moment=vcross(p, d))
    if not (line.contains(p) and line.contains(q)):
        raise ArithmeticError("line_through failed its incidence check")
    return line


# ============ Planar helpers ============

def _dominant_axis(n) -> int:
    """Axis with the largest |component| (exact)"""
    mags = [abs(c) if not isinstance(c, QuadSurd) else abs(float(c)) for c in _xyz(n)]
    return max(range(3), key=lambda i: (mags[i], -i))


def _project(v, drop: int) -> Tuple:
    v = _xyz(v)
    return tuple(v[i] for i in range(3) if i != drop)


def _orient2d(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_closed_segment_2d(a, b, c) -> bool:
    """c collinear with a-b assumed; test bounding range"""
    return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))


def _plane_normal(points: Sequence) -> Optional[tuple]:
    """Some nonzero normal of the plane through coplanar points, None if all collinear"""
    base = points[0]
    for i in range(1, len(points)):
        for j in range(i + 1, len(points)):
            n = vcross(vsub(points[i], base), vsub(points[j], base))
            if not vzero(n):
                return n
    return None


def segments_intersect(s1: Segment3, s2: Segment3) -> bool:
    """Exact closed-segment intersection test in 3D"""
    a, b, c, d = s1.a, s1.b, s2.a, s2.b
    if orient3d_sign(a, b, c, d) != 0:
        return False
    n = _plane_normal([a, b, c, d])
    if n is None:
        # all four collinear: overlap along the dominant axis
        axis = _dominant_axis(vsub(b, a))
        lo1, hi1 = sorted((a.xyz[axis], b.xyz[axis]))
        lo2, hi2 = sorted((c.xyz[axis], d.xyz[axis]))
        return lo1 <= hi2 and lo2 <= hi1
    drop = _dominant_axis(n)
    a2, b2, c2, d2 = (_project(p, drop) for p in (a, b, c, d))
    o1, o2 = _orient2d(a2, b2, c2), _orient2d(a2, b2, d2)
    o3, o4 = _orient2d(c2, d2, a2), _orient2d(c2, d2, b2)
    if ((o1 > 0 and o2 < 0) or (o1 < 0 and o2 > 0)) and ((o3 > 0 and o4 < 0) or (o3 < 0 and o4 > 0)):
        return True
    if o1 == 0 and _on_closed_segment_2d(a2, b2, c2):
        return True
    if o2 == 0 and _on_closed_segment_2d(a2, b2, d2):
        return True
    if o3 == 0 and _on_closed_segment_2d(c2, d2, a2):
        return True
    if o4 == 0 and _on_closed_segment_2d(c2, d2, b2):
        return True
    return False


def triangle_meets_segment(apex: Point3, p: Point3, q: Point3,
                           s0: Point3, s1: Point3) -> Optional[tuple]:
    """
    Witness point where segment s0-s1 meets triangle (apex, p, q) anywhere
    other than the apex or the closed side p-q; None when there is none.

    Degenerate (collinear) triangles are the caller's business and yield None.
    """
    if collinear3(apex, p, q):
        return None
    o0 = orient3d(apex, p, q, s0)
    o1 = orient3d(apex, p, q, s1)
    if (o0 > 0 and o1 > 0) or (o0 < 0 and o1 < 0):
        return None
    drop = _dominant_axis(vcross(vsub(p, apex), vsub(q, apex)))
    tri = [_project(v, drop) for v in (apex, p, q)]
    orientation = 1 if _orient2d(*tri) > 0 else -1

    def allowed(x) -> bool:
        x2 = _project(x, drop)
        return tuple(x) == apex.xyz or _orient2d(tri[1], tri[2], x2) == 0

    if o0 != 0 or o1 != 0:
        w = o0 / (o0 - o1)
        x = vadd(s0, vscale(vsub(s1, s0), w))
        x2 = _project(x, drop)
        signs = [_orient2d(tri[i], tri[(i + 1) % 3], x2) * orientation for i in range(3)]
        if all(sg >= 0 for sg in signs):
            return None if allowed(x) else x
        return None

    # coplanar: clip w in [0, 1] against the three half-planes
    a2, b2 = _project(s0, drop), _project(s1, drop)
    lo, hi = Fraction(0), Fraction(1)
    for i in range(3):
        u, v = tri[i], tri[(i + 1) % 3]
        f0 = _orient2d(u, v, a2) * orientation
        f1 = _orient2d(u, v, b2) * orientation
        if f0 < 0 and f1 < 0:
            return None
        if f0 >= 0 and f1 >= 0:
            continue
        root = f0 / (f0 - f1)
        if f0 < 0:
            lo = max(lo, root)
        else:
            hi = min(hi, root)
        if lo > hi:
            return None
    x_lo = vadd(s0, vscale(vsub(s1, s0), lo))
    x_hi = vadd(s0, vscale(vsub(s1, s0), hi))
    if lo == hi:
        return None if allowed(x_lo) else x_lo
    on_side = [_orient2d(tri[1], tri[2], _project(x, drop)) == 0 for x in (x_lo, x_hi)]
    if all(on_side):
        return None
    return vscale(vadd(x_lo, x_hi), Fraction(1, 2))
