import random
import sys
import unittest
from fractions import Fraction
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.predicates import (DegenerateSecantError, Dir3, PluckerLine, Point3, QuadSurd, Segment3,
                             collinear3, exact_sign, line_through, orient3d, orient3d_sign,
                             segments_intersect, side_product, triangle_meets_segment)


def _rand_point(rng: random.Random) -> Point3:
    return Point3(*(Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(3)))


class TestOrientation(unittest.TestCase):

    def setUp(self):
        self.rng = random.Random(7)

    def test_unit_tetrahedron(self):
        print("\n[TEST] orient3d of the unit tetrahedron")
        o = Point3.of(0, 0, 0)
        self.assertEqual(orient3d(o, Point3.of(1, 0, 0), Point3.of(0, 1, 0), Point3.of(0, 0, 1)), 1)

    def test_coplanar_is_zero(self):
        print("\n[TEST] orient3d of coplanar points")
        pts = [Point3.of(0, 0, 0), Point3.of(1, 0, 0), Point3.of(0, 1, 0), Point3.of(1, 1, 0)]
        self.assertEqual(orient3d(*pts), 0)
        self.assertEqual(orient3d_sign(*pts), 0)

    def test_antisymmetry_and_translation(self):
        print("\n[TEST] orient3d antisymmetry and translation invariance")
        for _ in range(200):
            p, q, r, s = (_rand_point(self.rng) for _ in range(4))
            v = _rand_point(self.rng)
            base = orient3d(p, q, r, s)
            self.assertEqual(orient3d(q, p, r, s), -base)
            self.assertEqual(orient3d(p + v, q + v, r + v, s + v), base)
            self.assertEqual(orient3d_sign(p, q, r, s), exact_sign(base))

    def test_filter_near_degenerate(self):
        print("\n[TEST] orient3d_sign escalates on nearly coplanar input")
        eps = Fraction(1, 10 ** 30)
        pts = [Point3.of(0, 0, 0), Point3.of(1, 0, 0), Point3.of(0, 1, 0), Point3(1, 1, eps)]
        self.assertEqual(orient3d_sign(*pts), 1)


class TestCollinearity(unittest.TestCase):

    def test_examples(self):
        print("\n[TEST] collinear3 examples")
        self.assertTrue(collinear3(Point3.of(0, 0, 0), Point3.of(1, 1, 1), Point3.of(2, 2, 2)))
        self.assertFalse(collinear3(Point3.of(0, 0, 0), Point3.of(1, 0, 0), Point3.of(0, 1, 0)))
        p = Point3.of(3, 1, 4)
        self.assertTrue(collinear3(p, p, Point3.of(0, 0, 1)))

    def test_collinear_implies_coplanar_with_anything(self):
        print("\n[TEST] collinear triples are coplanar with every fourth point")
        p, q = Point3.of(1, 2, 3), Point3.of(2, 3, 5)
        r = p + (q - p).scaled(Fraction(7, 3))
        self.assertTrue(collinear3(p, q, r))
        for s in (Point3.of(1, 0, 0), Point3.of(0, 1, 0), Point3.of(0, 0, 1), Point3.of(9, -4, 2)):
            self.assertEqual(orient3d(p, q, r, s), 0)


class TestLines(unittest.TestCase):

    def setUp(self):
        self.rng = random.Random(11)

    def test_line_through_examples(self):
        print("\n[TEST] line_through examples")
        x_axis = line_through(Point3.of(0, 0, 0), Point3.of(1, 0, 0))
        self.assertEqual(tuple(x_axis.moment), (0, 0, 0))
        shifted = line_through(Point3.of(0, 1, 0), Point3.of(1, 1, 0))
        self.assertEqual(tuple(shifted.direction), (1, 0, 0))
        self.assertEqual(tuple(shifted.moment), (0, 0, -1))

    def test_degenerate_secant(self):
        print("\n[TEST] line_through rejects a degenerate secant")
        p = Point3.of(1, 2, 3)
        with self.assertRaises(DegenerateSecantError):
            line_through(p, p)

    def test_side_product_examples(self):
        print("\n[TEST] side_product on meeting, parallel and skew lines")
        x_axis = line_through(Point3.of(0, 0, 0), Point3.of(1, 0, 0))
        y_axis = line_through(Point3.of(0, 0, 0), Point3.of(0, 1, 0))
        parallel = line_through(Point3.of(0, 1, 0), Point3.of(1, 1, 0))
        skew = line_through(Point3.of(0, 0, 1), Point3.of(0, 1, 1))
        self.assertEqual(side_product(x_axis, y_axis), 0)
        self.assertEqual(side_product(x_axis, parallel), 0)
        self.assertNotEqual(side_product(x_axis, skew), 0)

    def test_plucker_relation_and_shared_point(self):
        print("\n[TEST] Plücker relation on random lines and shared-point side products")
        for _ in range(500):
            a, b, c = (_rand_point(self.rng) for _ in range(3))
            if a == b or a == c:
                continue
            l1, l2 = line_through(a, b), line_through(a, c)
            self.assertTrue(l1.contains(a) and l1.contains(b))
            self.assertEqual(side_product(l1, l2), 0)

    def test_plucker_rejects_bad_moment(self):
        print("\n[TEST] PluckerLine enforces its relation")
        with self.assertRaises(ValueError):
            PluckerLine(direction=(1, 0, 0), moment=(1, 0, 0))

    def test_directions(self):
        print("\n[TEST] Dir3 projective comparisons")
        d = Dir3.of(1, 2, 3)
        self.assertTrue(d.same_line_direction(Dir3.of(-2, -4, -6)))
        self.assertFalse(d.same_sense(Dir3.of(-2, -4, -6)))
        self.assertTrue(d.same_sense(Dir3.of(2, 4, 6)))
        with self.assertRaises(ValueError):
            Dir3.of(0, 0, 0)


class TestQuadSurd(unittest.TestCase):

    def test_arithmetic_and_sign(self):
        print("\n[TEST] QuadSurd arithmetic")
        r2 = QuadSurd.sqrt(2)
        self.assertIsInstance(r2, QuadSurd)
        self.assertEqual(r2 * r2, 2)
        self.assertEqual(exact_sign(r2 - Fraction(141, 100)), 1)
        self.assertEqual(exact_sign(r2 - Fraction(142, 100)), -1)
        self.assertEqual(QuadSurd.sqrt(Fraction(9, 4)), Fraction(3, 2))
        x = QuadSurd.make(1, 1, 2)
        self.assertEqual((x - 1) * (x - 1), 2)
        self.assertAlmostEqual(float(1 / x), 2 ** 0.5 - 1, places=12)


class TestSegments(unittest.TestCase):

    def test_segment_intersection(self):
        print("\n[TEST] exact segment intersection")
        s1 = Segment3(Point3.of(0, 0, 0), Point3.of(2, 0, 0))
        self.assertTrue(segments_intersect(s1, Segment3(Point3.of(1, -1, 0), Point3.of(1, 1, 0))))
        self.assertFalse(segments_intersect(s1, Segment3(Point3.of(1, -1, 1), Point3.of(1, 1, 1))))
        self.assertTrue(segments_intersect(s1, Segment3(Point3.of(2, 0, 0), Point3.of(3, 0, 0))))
        self.assertFalse(segments_intersect(s1, Segment3(Point3.of(3, 0, 0), Point3.of(4, 0, 0))))

    def test_degenerate_segment(self):
        print("\n[TEST] Segment3 rejects coincident endpoints")
        with self.assertRaises(DegenerateSecantError):
            Segment3(Point3.of(1, 1, 1), Point3.of(1, 1, 1))

    def test_triangle_meets_segment(self):
        print("\n[TEST] triangle-segment witness")
        apex, p, q = Point3.of(0, 0, 0), Point3.of(4, 0, 0), Point3.of(0, 4, 0)
        through = triangle_meets_segment(apex, p, q, Point3.of(1, 1, -1), Point3.of(1, 1, 1))
        self.assertEqual(tuple(through), (1, 1, 0))
        self.assertIsNone(triangle_meets_segment(apex, p, q, Point3.of(5, 5, -1), Point3.of(5, 5, 1)))
        # touching only the far side p-q is allowed
        self.assertIsNone(triangle_meets_segment(apex, p, q, Point3.of(2, 2, -1), Point3.of(2, 2, 1)))
        # touching only the apex is allowed
        self.assertIsNone(triangle_meets_segment(apex, p, q, Point3.of(0, 0, 0), Point3.of(-1, -1, 3)))


if __name__ == '__main__':
    unittest.main()
