import math
import random
import sys
import unittest
from fractions import Fraction
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.algebra import (PolynomialParseError, SturmChain, TriPoly, UniPoly, ZeroPolynomialError,
                          count_with_multiplicity, format_tripoly, parse_tripoly, restrict_to_line,
                          squarefree_part, sturm_count)
from core.predicates import Point3


def _random_case(rng: random.Random):
    """Polynomial with a known real root multiset, padded with root-free quadratics"""
    roots = {}
    degree = 0
    target = rng.randint(1, 12)
    while degree < target:
        if rng.random() < 0.25 and degree + 2 <= target:
            degree += 2
            roots.setdefault(None, []).append(Fraction(rng.randint(1, 20), rng.randint(1, 5)))
            continue
        r = Fraction(rng.randint(-30, 30), rng.randint(1, 6))
        m = min(rng.choice((1, 1, 1, 2, 3)), target - degree)
        roots[r] = roots.get(r, 0) + m
        degree += m
    real = {r: m for r, m in roots.items() if r is not None}
    lead = Fraction(rng.choice((-1, 1)) * rng.randint(1, 9), rng.randint(1, 9))
    p = UniPoly.from_roots(real.items(), lead)
    for c in roots.get(None, []):
        p = p * UniPoly((c, Fraction(0), Fraction(1)))
    return p, real


class TestSturm(unittest.TestCase):

    def setUp(self):
        self.rng = random.Random(1729)

    def test_chain_members_are_primitive(self):
        print("\n[TEST] Sturm chain members have coprime integer coefficients")
        for _ in range(40):
            p, real = _random_case(self.rng)
            chain = SturmChain.of(p)
            for q in chain.polys:
                self.assertTrue(all(c.denominator == 1 for c in q.coeffs), f"{q}")
                self.assertEqual(math.gcd(*(c.numerator for c in q.coeffs)), 1, f"{q}")
            self.assertGreater(chain.polys[0].coeffs[-1] * p.coeffs[-1], 0)
            self.assertEqual(chain.variations(None, -1) - chain.variations(None, 1), len(real))

    def test_known_polynomials(self):
        print("\n[TEST] Sturm counts on hand-picked polynomials")
        self.assertEqual(sturm_count(UniPoly((-2, 0, 1))), 2)         # t^2 - 2
        self.assertEqual(sturm_count(UniPoly((1, 0, 1))), 0)          # t^2 + 1
        self.assertEqual(sturm_count(UniPoly((0, 0, 0, 1))), 1)       # t^3
        self.assertEqual(count_with_multiplicity(UniPoly((0, 0, 0, 1))), 3)
        self.assertEqual(sturm_count(UniPoly((5,))), 0)

    def test_intervals(self):
        print("\n[TEST] Open-interval counts exclude the endpoints")
        p = UniPoly.from_roots([(Fraction(-1), 1), (Fraction(0), 2), (Fraction(3, 2), 1)])
        self.assertEqual(sturm_count(p, Fraction(-1), Fraction(3, 2)), 1)
        self.assertEqual(sturm_count(p, Fraction(-2), Fraction(2)), 3)
        self.assertEqual(sturm_count(p, Fraction(0), None), 1)
        self.assertEqual(sturm_count(p, None, Fraction(0)), 1)
        self.assertEqual(sturm_count(p, Fraction(2), Fraction(1)), 0)

    def test_zero_polynomial(self):
        print("\n[TEST] The zero polynomial has no root count")
        with self.assertRaises(ZeroPolynomialError):
            sturm_count(UniPoly(()))
        with self.assertRaises(ZeroPolynomialError):
            count_with_multiplicity(UniPoly((0, 0)))

    def test_random_factorizations(self):
        print("\n[TEST] 1000 random polynomials against their constructed root multisets")
        for case in range(1000):
            p, real = _random_case(self.rng)
            self.assertEqual(sturm_count(p), len(real), f"case {case}: {p}")
            self.assertEqual(count_with_multiplicity(p), sum(real.values()), f"case {case}: {p}")
            lo, hi = sorted(Fraction(self.rng.randint(-40, 40), self.rng.randint(1, 4)) for _ in range(2))
            inside = sum(1 for r in real if lo < r < hi)
            self.assertEqual(sturm_count(p, lo, hi), inside, f"case {case}: ({lo}, {hi}) {p}")

    def test_multiplicity_is_additive(self):
        print("\n[TEST] Root counts add over coprime products")
        p = UniPoly.from_roots([(Fraction(1), 2), (Fraction(-3), 1)])
        q = UniPoly.from_roots([(Fraction(1, 2), 3)]) * UniPoly((1, 0, 1))
        self.assertEqual(count_with_multiplicity(p * q), count_with_multiplicity(p) + count_with_multiplicity(q))

    def test_squarefree(self):
        print("\n[TEST] Square-free part keeps each root once")
        p = UniPoly.from_roots([(Fraction(2), 3), (Fraction(-1), 2)])
        self.assertEqual(squarefree_part(p).degree, 2)


class TestTrivariate(unittest.TestCase):

    def setUp(self):
        self.rng = random.Random(99)
        self.sphere = parse_tripoly("1 x^2\n1 y^2\n1 z^2\n-1  # unit sphere\n")

    def test_parse_and_format(self):
        print("\n[TEST] Polynomial text format parses and re-formats")
        self.assertEqual(self.sphere.total_degree, 2)
        self.assertEqual(self.sphere(Point3.of(1, 0, 0)), 0)
        self.assertEqual(parse_tripoly(format_tripoly(self.sphere)), self.sphere)
        self.assertEqual(parse_tripoly("2 x y\n3 x y").as_dict(), {(1, 1, 0): Fraction(5)})
        for bad in ("abc x", "1 w^2", "1 x^q"):
            with self.assertRaises(PolynomialParseError):
                parse_tripoly(bad)

    def test_sphere_on_axis(self):
        print("\n[TEST] The x-axis meets the unit sphere twice")
        r = restrict_to_line(self.sphere, Point3.of(0, 0, 0), Point3.of(1, 0, 0))
        self.assertEqual(r.coeffs, (Fraction(-1), Fraction(0), Fraction(1)))
        self.assertEqual(count_with_multiplicity(r), 2)
        tangent = restrict_to_line(self.sphere, Point3.of(0, 1, 0), Point3.of(1, 0, 0))
        self.assertEqual(count_with_multiplicity(tangent), 2)
        self.assertEqual(sturm_count(tangent), 1)

    def test_line_inside_surface(self):
        print("\n[TEST] A line inside the zero set restricts to zero")
        plane = parse_tripoly("1 z")
        self.assertTrue(restrict_to_line(plane, Point3.of(0, 0, 0), Point3.of(1, 2, 0)).is_zero)
        with self.assertRaises(ValueError):
            restrict_to_line(plane, Point3.of(0, 0, 0), Point3.of(0, 0, 0))

    def test_restriction_is_linear(self):
        print("\n[TEST] Restriction is linear and never raises the degree")
        for _ in range(20):
            P = self._random_tripoly()
            Q = self._random_tripoly()
            anchor = Point3(*(Fraction(self.rng.randint(-5, 5), self.rng.randint(1, 3)) for _ in range(3)))
            direction = Point3(*(Fraction(self.rng.randint(1, 7), self.rng.randint(1, 3)) for _ in range(3)))
            rp = restrict_to_line(P, anchor, direction)
            rq = restrict_to_line(Q, anchor, direction)
            self.assertEqual(restrict_to_line(P + Q, anchor, direction), rp + rq)
            self.assertLessEqual(rp.degree, P.total_degree)

    def _random_tripoly(self) -> TriPoly:
        terms = []
        for _ in range(self.rng.randint(1, 6)):
            mono = tuple(self.rng.randint(0, 3) for _ in range(3))
            terms.append((mono, Fraction(self.rng.randint(-9, 9), self.rng.randint(1, 4))))
        return TriPoly(tuple(terms))


if __name__ == '__main__':
    unittest.main()
