import math
import sys
import unittest
from fractions import Fraction
from pathlib import Path

import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.link_model import LinkPoint, PolyLink, perturb
from core.obstruction import trace_obstruction
from core.predicates import Point3
from core.presets import preset
from core.stabbing import enumerate_quadrisecants
from core.winding import (IntegralityError, TrisecantFamily, TrisecantRecord, build_normal_frame,
                          extract_families, middle_points_between, point_between, winding_details,
                          winding_pair)


def _subdivide(link: PolyLink) -> PolyLink:
    comps = []
    for verts in link.components:
        out = []
        for i, v in enumerate(verts):
            w = verts[(i + 1) % len(verts)]
            out.extend([v, (v + w).scaled(Fraction(1, 2))])
        comps.append(tuple(out))
    return PolyLink(components=tuple(comps))


class TestNormalFrame(unittest.TestCase):

    def test_planar_holonomy_is_zero(self):
        print("\n[TEST] Planar polygon transports its normal back unchanged")
        frame = build_normal_frame(preset("round_unknot", 16), 0)
        self.assertAlmostEqual(frame.holonomy, 0.0, places=12)
        self.assertTrue(np.allclose(np.abs(frame.u[:, 2]), 1.0))

    def test_frame_is_orthonormal(self):
        print("\n[TEST] Frame vectors are orthonormal along a knot")
        frame = build_normal_frame(preset("trefoil_t23", 24), 0, twist=1)
        for e in range(24):
            for s in (0.0, 0.3):
                t, u, v = frame.at(e, s)
                self.assertAlmostEqual(float(np.dot(t, u)), 0.0, places=12)
                self.assertAlmostEqual(float(np.dot(u, v)), 0.0, places=12)
                self.assertAlmostEqual(float(np.linalg.norm(u)), 1.0, places=12)

    def test_holonomy_survives_subdivision(self):
        print("\n[TEST] Subdividing edges leaves the holonomy unchanged")
        link = preset("trefoil_t23", 24)
        a = build_normal_frame(link, 0).holonomy
        b = build_normal_frame(_subdivide(link), 0).holonomy
        self.assertAlmostEqual(a, b, places=9)

    def test_needs_three_edges(self):
        print("\n[TEST] Frame needs a component with at least three edges")
        with self.assertRaises(IndexError):
            build_normal_frame(preset("round_unknot", 16), 2)


class TestWindingNumbers(unittest.TestCase):

    def setUp(self):
        self.link = preset("round_unknot", 16)
        self.frame = build_normal_frame(self.link, 0)

    def _family(self, direction_at) -> TrisecantFamily:
        records = []
        for e in range(16):
            lp = LinkPoint(0, e, Fraction(1, 2))
            s = self.link.chart_param(lp)
            records.append(TrisecantRecord(lp, lp, lp, s, tuple(direction_at(lp, s)), 0.5))
        return TrisecantFamily(0, 0, tuple(records), winding_class=2)

    def _radial(self, lp):
        p = np.array([float(c) for c in self.link.point(lp)])
        p[2] = 0.0
        return p / np.linalg.norm(p)

    def test_constant_family(self):
        print("\n[TEST] A family that never moves has winding pair (0, 0)")
        lp = LinkPoint(0, 3, Fraction(1, 2))
        s = self.link.chart_param(lp)
        record = TrisecantRecord(lp, lp, lp, s, (0.0, 0.0, 1.0), 0.5)
        family = TrisecantFamily(0, 0, (record,) * 5)
        self.assertEqual(winding_pair(family, self.frame), (0, 0))
        self.assertEqual(family.surface, "unknown")

    def test_vertical_lines_around_circle(self):
        print("\n[TEST] Vertical lines carried once around the circle give (0, 1)")
        family = self._family(lambda lp, s: (0.0, 0.0, 1.0))
        result = winding_details(family, self.frame)
        self.assertEqual((result.omega1, result.omega2), (0, 1))
        self.assertAlmostEqual(result.middle_travel, 1.0)
        self.assertEqual(result.samples, 16)
        self.assertEqual(family.surface, "annulus")

    def test_half_turning_lines(self):
        print("\n[TEST] Lines turning half a direction turn give one turn of the line circle")
        def tilt(lp, s):
            return math.cos(math.pi * s) * np.array([0.0, 0.0, 1.0]) + math.sin(math.pi * s) * self._radial(lp)
        family = self._family(tilt)
        omega1, omega2 = winding_pair(family, self.frame)
        self.assertEqual(abs(omega1), 1)
        self.assertEqual(omega2, 1)

    def test_reversal_negates(self):
        print("\n[TEST] Reversing a family negates both winding numbers")
        def tilt(lp, s):
            return math.cos(math.pi * s) * np.array([0.0, 0.0, 1.0]) + math.sin(math.pi * s) * self._radial(lp)
        family = self._family(tilt)
        w1, w2 = winding_pair(family, self.frame)
        self.assertEqual(winding_pair(family.reversed(), self.frame), (-w1, -w2))

    def test_twist_law(self):
        print("\n[TEST] Twisting the frame k times shifts omega1 by -k omega2")
        family = self._family(lambda lp, s: (0.0, 0.0, 1.0))
        base1, base2 = winding_pair(family, self.frame)
        for k in (-2, -1, 1, 2):
            twisted = build_normal_frame(self.link, 0, twist=k)
            self.assertEqual(winding_pair(family, twisted), (base1 - k * base2, base2))

    def test_tangent_direction_refused(self):
        print("\n[TEST] A trisecant along the curve cannot be read against the frame")
        lp = LinkPoint(0, 0, Fraction(1, 2))
        t = self.frame.tangents[0]
        record = TrisecantRecord(lp, lp, lp, self.link.chart_param(lp), tuple(float(x) for x in t), 0.5)
        with self.assertRaises(IntegralityError):
            winding_pair(TrisecantFamily(0, 0, (record, record)), self.frame)

    def test_frame_on_wrong_component(self):
        print("\n[TEST] Frame must live on the middle-point component")
        family = self._family(lambda lp, s: (0.0, 0.0, 1.0))
        with self.assertRaises(ValueError):
            winding_pair(TrisecantFamily(0, 1, family.records), self.frame)
        with self.assertRaises(ValueError):
            winding_pair(TrisecantFamily(0, 0, ()), self.frame)


class TestBetweenness(unittest.TestCase):

    def setUp(self):
        # skew quadrilateral; its convex hull is the tetrahedron on its vertices
        self.saddle = (Point3.of(2, 0, 1), Point3.of(0, 2, -1), Point3.of(-2, 0, 1), Point3.of(0, -2, -1))

    def _triangle(self, cx, cy, cz):
        r = Fraction(1, 10)
        return (Point3.of(cx + r, cy, cz), Point3.of(cx, cy + r, cz), Point3.of(cx - r, cy - r, cz))

    def test_point_between(self):
        print("\n[TEST] Centre of a skew quadrilateral is between two of its points, outside points are not")
        link = PolyLink(components=(self.saddle,))
        self.assertTrue(point_between(link, 0, (Fraction(0), Fraction(0), Fraction(0))))
        self.assertFalse(point_between(link, 0, (Fraction(0), Fraction(0), Fraction(5))))
        self.assertFalse(point_between(link, 0, (Fraction(5), Fraction(0), Fraction(0))))

    def test_sampled_component(self):
        print("\n[TEST] Betweenness is checked on sampled points of H, not on family data")
        inside = PolyLink(components=(self.saddle, self._triangle(0, 0, 0)))
        outside = PolyLink(components=(self.saddle, self._triangle(0, 0, 5)))
        self.assertTrue(middle_points_between(TrisecantFamily(0, 1, ()), inside))
        self.assertFalse(middle_points_between(TrisecantFamily(0, 1, ()), outside))


class TestHopfFamilies(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.link = perturb(preset("hopf", 8), Fraction(1, 10000), seed=1)
        cls.atlas = trace_obstruction(cls.link, 0, samples_per_edge=8)
        cls.families = extract_families(cls.atlas, cls.link, 0, 1)
        cls.frame = build_normal_frame(cls.link, 1)

    def test_families_are_integral(self):
        print("\n[TEST] Closed families on the Hopf link have integral winding pairs")
        for family in self.families:
            self.assertEqual(family.H, 1)
            result = winding_details(family, self.frame)
            self.assertLessEqual(result.defect1, 1e-6)
            self.assertLessEqual(result.defect2, 1e-6)
            if result.omega2 != 0:
                self.assertTrue(middle_points_between(family, self.link))

    def test_reversal_negates(self):
        print("\n[TEST] Reversing a traced family negates its winding pair")
        for family in self.families:
            w1, w2 = winding_pair(family, self.frame)
            self.assertEqual(winding_pair(family.reversed(), self.frame), (-w1, -w2))

    def test_frame_choice(self):
        print("\n[TEST] With omega2 = 0 the first winding number does not depend on the frame")
        twisted = build_normal_frame(self.link, 1, twist=1)
        for family in self.families:
            w1, w2 = winding_pair(family, self.frame)
            self.assertEqual(winding_pair(family, twisted), (w1 - w2, w2))
            if w2 == 0:
                self.assertEqual(winding_pair(family, twisted)[0], w1)

    def test_families_or_quadrisecant(self):
        print("\n[TEST] Hopf link has a family winding around H or a quadrisecant")
        winds = any(winding_pair(f, self.frame)[1] != 0 for f in self.families)
        self.assertTrue(winds or enumerate_quadrisecants(self.link))

    def test_argument_checks(self):
        print("\n[TEST] Family extraction checks its components")
        with self.assertRaises(ValueError):
            extract_families(self.atlas, self.link, 1, 0)
        self.assertEqual(extract_families(self.atlas, self.link, 0, 5), [])


if __name__ == '__main__':
    unittest.main()
