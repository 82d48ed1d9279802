"""
Exact polynomial algebra over the rationals
Univariate polynomials, Sturm chains, real-root counting with multiplicity,
and sparse trivariate polynomials restricted to lines
"""
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import Poly, QQ, Rational, symbols

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.predicates import Point3
from core.utils import format_rational, get_logger, parse_rational

logger = get_logger("algebra", "algebra.log")

TAU = symbols("tau")
X, Y, Z = symbols("x y z")


class ZeroPolynomialError(ValueError):
    """Operation needs a nonzero polynomial"""


class PolynomialParseError(ValueError):
    """Malformed polynomial text"""


def _to_rational(q: Fraction) -> Rational:
    return Rational(q.numerator, q.denominator)


def _to_fraction(c) -> Fraction:
    c = Rational(c)
    return Fraction(int(c.p), int(c.q))


# ============ Univariate ============

@dataclass(frozen=True)
class UniPoly:
    """Polynomial with Fraction coefficients in ascending degree, trailing zeros trimmed"""
    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_poly(cls, p: Poly) -> "UniPoly":
        if p.is_zero:
            return cls(())
        return cls(tuple(_to_fraction(c) for c in reversed(p.all_coeffs())))

    @classmethod
    def from_roots(cls, roots: Iterable[Tuple[Fraction, int]], lead: Fraction = Fraction(1)) -> "UniPoly":
        """lead * prod (x - r)^m"""
        p = Poly(_to_rational(Fraction(lead)), TAU, domain=QQ)
        for r, m in roots:
            p = p * Poly(TAU - _to_rational(Fraction(r)), TAU, domain=QQ) ** m
        return cls.from_poly(p)

    def to_poly(self) -> Poly:
        return Poly([_to_rational(c) for c in reversed(self.coeffs)] or [0], TAU, domain=QQ)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        return UniPoly.from_poly(self.to_poly() * other.to_poly())

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UniPoly(tuple(x + y for x, y in zip(a, b)))

    def derivative(self) -> "UniPoly":
        return UniPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def sign_at(self, x: Optional[Fraction], side: int = 1) -> int:
        """Sign at x, or at +inf (x None, side 1) / -inf (x None, side -1)"""
        if x is None:
            lead = self.leading
            s = (lead > 0) - (lead < 0)
            return s if side > 0 or self.degree % 2 == 0 else -s
        v = self(x)
        return (v > 0) - (v < 0)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            terms.append(f"{format_rational(c)}{'*' + mono if mono else ''}")
        return " + ".join(terms)


def _require_nonzero(p: UniPoly):
    if p.is_zero:
        raise ZeroPolynomialError("the zero polynomial has no finite root count")


def squarefree_part(p: UniPoly) -> UniPoly:
    _require_nonzero(p)
    if p.degree <= 0:
        return p
    poly = p.to_poly()
    return UniPoly.from_poly(poly.quo(poly.gcd(poly.diff(TAU))))


@dataclass(frozen=True)
class SturmChain:
    """
    Signed remainder sequence p0 = p, p1 = p', p(k+1) = -rem(p(k-1), p(k)),
    each member divided by its content so the coefficients stay small integers.
    The content is taken positive, which leaves every sign variation unchanged.
    """
    polys: Tuple[UniPoly, ...]

    @classmethod
    def of(cls, p: UniPoly) -> "SturmChain":
        _require_nonzero(p)
        chain = [_normalize(p.to_poly())]
        if p.degree > 0:
            chain.append(_normalize(p.to_poly().diff(TAU)))
            while True:
                r = -chain[-2].rem(chain[-1])
                if r.is_zero:
                    break
                chain.append(_normalize(r))
        return cls(tuple(UniPoly.from_poly(c) for c in chain))

    def variations(self, x: Optional[Fraction], side: int = 1) -> int:
        signs = [s for s in (q.sign_at(x, side) for q in self.polys) if s != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _normalize(p: Poly) -> Poly:
    """Divide by the content: integer coefficients with gcd 1, same leading sign"""
    if p.is_zero:
        return p
    _, integral = p.clear_denoms(convert=True)
    _, prim = integral.primitive()
    prim = prim.set_domain(QQ)
    return prim if (prim.LC() > 0) == (p.LC() > 0) else -prim


def sturm_count(p: UniPoly, lo: Optional[Fraction] = None, hi: Optional[Fraction] = None) -> int:
    """
    Number of distinct real roots of p in the open interval (lo, hi);
    None stands for -inf (lo) or +inf (hi).

    Raises:
        ZeroPolynomialError: p is zero
    """
    _require_nonzero(p)
    lo = None if lo is None else Fraction(lo)
    hi = None if hi is None else Fraction(hi)
    if lo is not None and hi is not None and lo >= hi:
        return 0
    q = squarefree_part(p)
    # endpoint roots are outside the open interval: divide them out
    for end in (lo, hi):
        if end is not None and q.degree > 0 and q(end) == 0:
            q = UniPoly.from_poly(q.to_poly().quo(Poly(TAU - _to_rational(end), TAU, domain=QQ)))
    if q.degree <= 0:
        return 0
    chain = SturmChain.of(q)
    return chain.variations(lo, -1) - chain.variations(hi, 1)


def count_with_multiplicity(p: UniPoly) -> int:
    """Real roots counted with multiplicity, from the square-free decomposition"""
    _require_nonzero(p)
    if p.degree <= 0:
        return 0
    _, factors = p.to_poly().sqf_list()
    return sum(k * sturm_count(UniPoly.from_poly(f)) for f, k in factors)


# ============ Trivariate ============

Monomial = Tuple[int, int, int]


@dataclass(frozen=True)
class TriPoly:
    """Sparse polynomial in x, y, z: exponent triple -> nonzero Fraction"""
    terms: Tuple[Tuple[Monomial, Fraction], ...] = ()

    def __post_init__(self):
        merged: Dict[Monomial, Fraction] = {}
        for mono, c in self.terms:
            mono = tuple(int(e) for e in mono)
            if len(mono) != 3 or any(e < 0 for e in mono):
                raise ValueError(f"bad exponent triple {mono}")
            merged[mono] = merged.get(mono, Fraction(0)) + Fraction(c)
        object.__setattr__(self, "terms", tuple(sorted((m, c) for m, c in merged.items() if c != 0)))

    @classmethod
    def from_dict(cls, coeffs: Dict[Monomial, Fraction]) -> "TriPoly":
        return cls(tuple(coeffs.items()))

    @classmethod
    def from_poly(cls, p: Poly) -> "TriPoly":
        return cls(tuple((m, _to_fraction(c)) for m, c in p.terms()))

    def to_poly(self) -> Poly:
        if not self.terms:
            return Poly(0, X, Y, Z, domain=QQ)
        return Poly.from_dict({m: _to_rational(c) for m, c in self.terms}, X, Y, Z, domain=QQ)

    def as_dict(self) -> Dict[Monomial, Fraction]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((sum(m) for m, _ in self.terms), default=-1)

    def __call__(self, point) -> Fraction:
        x, y, z = point.xyz if isinstance(point, Point3) else (Fraction(v) for v in point)
        return sum((c * x ** i * y ** j * z ** k for (i, j, k), c in self.terms), Fraction(0))

    def __add__(self, other: "TriPoly") -> "TriPoly":
        return TriPoly(self.terms + other.terms)

    def __mul__(self, other: "TriPoly") -> "TriPoly":
        return TriPoly.from_poly(self.to_poly() * other.to_poly())


def restrict_to_line(P: TriPoly, anchor: Point3, direction: Point3) -> UniPoly:
    """
    Exact substitution (x, y, z) = anchor + tau * direction.

    A zero result means the line lies in the zero set of P; callers flag it.
    """
    if direction.is_zero():
        raise ValueError("direction must be nonzero")
    linear = [Poly(_to_rational(d) * TAU + _to_rational(a), TAU, domain=QQ)
              for a, d in zip(anchor.xyz, direction.xyz)]
    powers: List[Dict[int, Poly]] = [{0: Poly(1, TAU, domain=QQ)} for _ in range(3)]

    def power(axis: int, e: int) -> Poly:
        cache = powers[axis]
        if e not in cache:
            cache[e] = power(axis, e - 1) * linear[axis]
        return cache[e]

    total = Poly(0, TAU, domain=QQ)
    for (i, j, k), c in P.terms:
        total += power(0, i) * power(1, j) * power(2, k) * _to_rational(c)
    result = UniPoly.from_poly(total)
    if result.is_zero:
        logger.info("restriction vanishes identically: line lies in the surface")
    return result


# ============ Text format ============

_VARS = {"x": 0, "y": 1, "z": 2}


def parse_tripoly(text: str) -> TriPoly:
    """
    One monomial per line, `c x^i y^j z^k`; a bare variable means exponent 1,
    '#' starts a comment, repeated monomials add up.
    """
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            coeff = parse_rational(tokens[0])
        except (ValueError, ZeroDivisionError) as e:
            raise PolynomialParseError(f"line {lineno}: bad coefficient {tokens[0]!r}") from e
        exps = [0, 0, 0]
        for tok in tokens[1:]:
            name, _, exp = tok.partition("^")
            if name not in _VARS:
                raise PolynomialParseError(f"line {lineno}: unknown variable {name!r}")
            try:
                exps[_VARS[name]] += int(exp) if exp else 1
            except ValueError as e:
                raise PolynomialParseError(f"line {lineno}: bad exponent in {tok!r}") from e
        terms.append((tuple(exps), coeff))
    return TriPoly(tuple(terms))


def format_tripoly(P: TriPoly) -> str:
    lines = []
    for (i, j, k), c in sorted(P.terms, key=lambda t: (-sum(t[0]), tuple(-e for e in t[0]))):
        parts = [format_rational(c)]
        parts += [f"{v}^{e}" for v, e in zip("xyz", (i, j, k)) if e]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n" if lines else ""
