import sys
import unittest
from fractions import Fraction
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.algebra import parse_tripoly
from core.predicates import Point3
from core.surfaces import (ConsistencyError, Pose, TorusConfigurationError, TorusSpec, auto_piercing_line,
                           check_samples, linked_pair_specs, linked_pair_surface, rotation_from_quaternion,
                           torus_quartic, torus_sample_points, verify_degree_bound)


class TestTorus(unittest.TestCase):

    def setUp(self):
        self.standard = TorusSpec(Fraction(2), Fraction(1, 2))
        pose = Pose(rotation_from_quaternion(1, 2, 3, 4), (Fraction(1, 3), Fraction(-2), Fraction(5, 7)))
        self.posed = TorusSpec(Fraction(3), Fraction(1), pose)

    def test_quartic_degree(self):
        print("\n[TEST] Torus quartic has total degree 4")
        self.assertEqual(torus_quartic(self.standard).total_degree, 4)
        self.assertEqual(torus_quartic(self.posed).total_degree, 4)

    def test_samples_vanish(self):
        print("\n[TEST] Rational torus samples lie exactly on the quartic")
        for spec in (self.standard, self.posed):
            surface = torus_quartic(spec)
            points = torus_sample_points(spec, 16)
            self.assertEqual(len(points), 16)
            check_samples(surface, points)

    def test_center_is_off_surface(self):
        print("\n[TEST] The torus center is not on the surface")
        surface = torus_quartic(self.standard)
        self.assertEqual(surface(Point3.of(0, 0, 0)), Fraction(15, 4) ** 2)
        with self.assertRaises(ConsistencyError):
            check_samples(surface, [Point3.of(0, 0, 0)])

    def test_rotation_is_exact(self):
        print("\n[TEST] Quaternion rotations are exactly orthogonal")
        pose = Pose(rotation_from_quaternion(1, 2, 3, 4))
        self.assertEqual(pose.determinant, 1)
        self.assertEqual(pose.orthogonality_defect(), 0.0)

    def test_bad_configurations(self):
        print("\n[TEST] Bad radii, zero quaternions and reflections are refused")
        with self.assertRaises(TorusConfigurationError):
            TorusSpec(Fraction(1), Fraction(1))
        with self.assertRaises(TorusConfigurationError):
            TorusSpec(Fraction(1), Fraction(0))
        with self.assertRaises(TorusConfigurationError):
            rotation_from_quaternion(0, 0, 0, 0)
        mirror = ((Fraction(-1), Fraction(0), Fraction(0)), (Fraction(0), Fraction(1), Fraction(0)),
                  (Fraction(0), Fraction(0), Fraction(1)))
        with self.assertRaises(TorusConfigurationError):
            TorusSpec(Fraction(2), Fraction(1), Pose(mirror))


class TestLinkedPair(unittest.TestCase):

    def setUp(self):
        self.surface = linked_pair_surface(Fraction(2), Fraction(1, 2))

    def test_degree_eight(self):
        print("\n[TEST] Linked pair surface has total degree exactly 8")
        self.assertEqual(self.surface.total_degree, 8)

    def test_both_tori_on_surface(self):
        print("\n[TEST] Samples of either torus lie on the product surface")
        for spec in linked_pair_specs(Fraction(2), Fraction(1, 2)):
            check_samples(self.surface, torus_sample_points(spec, 9))

    def test_unlinked_radii_refused(self):
        print("\n[TEST] Radii with r1 <= 2 r2 are refused")
        with self.assertRaises(TorusConfigurationError):
            linked_pair_surface(Fraction(1), Fraction(1, 2))

    def test_auto_line_bound(self):
        print("\n[TEST] Auto piercing line gives eight real roots")
        anchor, direction = auto_piercing_line(Fraction(2), Fraction(1, 2))
        report = verify_degree_bound(self.surface, anchor, Point3(*direction.xyz))
        self.assertFalse(report.flagged)
        self.assertGreaterEqual(report.root_count, 8)
        self.assertEqual(report.distinct_roots, 8)
        self.assertEqual(report.degree_bound, report.root_count)
        self.assertEqual(report.to_dict()["surface_total_degree"], 8)
        self.assertEqual(report.conclusion, "surface degree >= 8")

    def test_line_in_surface_is_flagged(self):
        print("\n[TEST] A line inside the zero set is flagged instead of bounded")
        report = verify_degree_bound(parse_tripoly("1 z"), Point3.of(0, 0, 0), Point3.of(1, 1, 0))
        self.assertTrue(report.flagged)
        self.assertIsNone(report.root_count)


if __name__ == '__main__':
    unittest.main()
