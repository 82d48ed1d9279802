import sys
import unittest
from fractions import Fraction
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import PERTURB_FRACTION
from core.link_model import LinkPoint, PolyLink, default_magnitude, perturb
from core.obstruction import (ChainNotClosedError, ChordVerificationError, MoebiusCoord, build_chord_disk,
                              circular_distance, farthest_vertex_is_extreme, find_clear_arc,
                              trace_obstruction, winding_class, wrapped_step)
from core.predicates import Point3, collinear3
from core.presets import preset
from core.stabbing import enumerate_quadrisecants


def _coords(pairs):
    return [MoebiusCoord(a % 1.0, b % 1.0) for a, b in pairs]


class TestWindingClass(unittest.TestCase):

    def test_swapped_ends(self):
        print("\n[TEST] Loop ending with its endpoints exchanged winds once")
        loop = _coords([(0.1 + 0.1 * k, 0.6 + 0.1 * k) for k in range(6)])
        self.assertEqual(winding_class(loop), 1)

    def test_full_turn(self):
        print("\n[TEST] Loop advancing both endpoints a full turn winds twice")
        loop = _coords([(0.1 + 0.1 * k, 0.4 + 0.1 * k) for k in range(11)])
        self.assertEqual(winding_class(loop), 2)
        self.assertEqual(winding_class(loop[::-1]), 2)

    def test_contractible(self):
        print("\n[TEST] Loop that retraces itself has class 0")
        loop = _coords([(0.1, 0.4), (0.15, 0.45), (0.2, 0.5), (0.15, 0.45), (0.1, 0.4)])
        self.assertEqual(winding_class(loop), 0)

    def test_open_chain(self):
        print("\n[TEST] Open chains are refused")
        with self.assertRaises(ChainNotClosedError):
            winding_class(_coords([(0.1, 0.4), (0.2, 0.5)]))
        with self.assertRaises(ChainNotClosedError):
            winding_class(_coords([(0.1, 0.4)]))

    def test_circle_helpers(self):
        print("\n[TEST] Circle distance and wrapped steps")
        self.assertAlmostEqual(circular_distance(0.95, 0.05), 0.1)
        self.assertAlmostEqual(wrapped_step(0.95, 0.05), 0.1)
        self.assertAlmostEqual(wrapped_step(0.05, 0.95), -0.1)
        with self.assertRaises(ValueError):
            MoebiusCoord(0.3, 0.3)
        self.assertEqual(MoebiusCoord(0.7, 0.2).canonical, (0.2, 0.7))


class TestRoundUnknot(unittest.TestCase):

    def setUp(self):
        self.link = preset("round_unknot", 16)
        self.atlas = trace_obstruction(self.link, 0, samples_per_edge=4)

    def test_no_arcs(self):
        print("\n[TEST] Convex planar polygon has an empty obstruction set")
        self.assertEqual(self.atlas.arcs, [])
        self.assertEqual(self.atlas.crossings, [])
        self.assertEqual(self.atlas.chains, [])

    def test_chord_disk(self):
        print("\n[TEST] Clear apex on the convex polygon spans a verified 16-triangle fan")
        apex = find_clear_arc(self.atlas, self.link)
        self.assertIsNotNone(apex)
        disk = build_chord_disk(self.link, 0, apex)
        self.assertEqual(len(disk.triangles), 16)
        self.assertEqual(sum(disk.degenerate), 1)
        self.assertTrue(disk.degenerate[apex.edge])

    def test_any_apex_is_clear(self):
        print("\n[TEST] Every apex on the convex polygon verifies")
        for e in (0, 5, 11):
            build_chord_disk(self.link, 0, LinkPoint(0, e, Fraction(1, 3)))

    def test_bad_arguments(self):
        print("\n[TEST] Tracing refuses bad components and coarse grids")
        with self.assertRaises(IndexError):
            trace_obstruction(self.link, 1)
        with self.assertRaises(ValueError):
            trace_obstruction(self.link, 0, samples_per_edge=3)
        with self.assertRaises(ValueError):
            build_chord_disk(self.link, 1, LinkPoint(0, 0, Fraction(1, 2)), verify=False)

    def test_farthest_vertex(self):
        print("\n[TEST] Farthest vertex has a strict supporting plane")
        self.assertTrue(farthest_vertex_is_extreme(self.link, self.atlas))


class TestTrefoil(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.link = perturb(preset("trefoil_t23", 16), Fraction(1, 10000), seed=7)
        cls.atlas = trace_obstruction(cls.link, 0, samples_per_edge=8)

    def test_samples_verify_exactly(self):
        print("\n[TEST] Every traced sample is an exact trisecant with its middle point between")
        self.assertGreater(len(self.atlas.arcs), 0)
        for arc in self.atlas.arcs:
            for s in arc.samples:
                a, m, b = (Point3(*self.link.point(p)) for p in (s.a, s.middle, s.b))
                self.assertTrue(collinear3(a, m, b))
                self.assertTrue(0 < s.lam < 1)

    def test_crossings_match_quadrisecants(self):
        print("\n[TEST] Self-crossings of the obstruction set are the AAAA quadrisecants")
        quads = [q for q in enumerate_quadrisecants(self.link) if q.pattern == "AAAA"]
        self.assertEqual(len(self.atlas.crossings), len(quads))
        self.assertEqual(sorted(c.quadrisecant.key for c in self.atlas.crossings),
                         sorted(q.key for q in quads))

    def test_chains_classified(self):
        print("\n[TEST] Closed chains carry a winding class")
        for chain in self.atlas.chains:
            if chain.closed:
                self.assertIn(chain.winding_class, (0, 1, 2))
            else:
                self.assertIsNone(chain.winding_class)
        used = sorted(idx for chain in self.atlas.chains for idx, _ in chain.arcs)
        self.assertEqual(used, list(range(len(self.atlas.arcs))))

    def test_no_clear_apex(self):
        print("\n[TEST] A knotted curve has no clear apex")
        self.assertIsNone(find_clear_arc(self.atlas, self.link))

    def test_forced_apex_fails(self):
        print("\n[TEST] Forcing an apex on the trefoil raises with a witness chord")
        with self.assertRaises(ChordVerificationError) as ctx:
            build_chord_disk(self.link, 0, LinkPoint(0, 0, Fraction(1, 2)))
        self.assertEqual(len(ctx.exception.chord), 4)

    def test_workers_do_not_change_atlas(self):
        print("\n[TEST] Parallel tracing gives the same atlas")
        parallel = trace_obstruction(self.link, 0, samples_per_edge=8, workers=2)
        self.assertEqual([(a.endpoint_edges, a.middle_edge, a.samples[0].sigma) for a in parallel.arcs],
                         [(a.endpoint_edges, a.middle_edge, a.samples[0].sigma) for a in self.atlas.arcs])
        self.assertEqual([c.quadrisecant.key for c in parallel.crossings],
                         [c.quadrisecant.key for c in self.atlas.crossings])

    def test_farthest_vertex(self):
        print("\n[TEST] Farthest vertex is never a traced middle point")
        self.assertTrue(farthest_vertex_is_extreme(self.link, self.atlas))


class TestTrefoilSixty(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        base = preset("trefoil_t23", 60)
        cls.link = perturb(base, default_magnitude(base, PERTURB_FRACTION), seed=0)
        cls.atlas = trace_obstruction(cls.link, 0)

    def test_crossings_match_quadrisecants(self):
        print("\n[TEST] 60-edge trefoil: atlas crossings are exactly the AAAA quadrisecants")
        quads = [q for q in enumerate_quadrisecants(self.link) if q.pattern == "AAAA"]
        self.assertGreaterEqual(len(quads), 1)
        self.assertEqual(sorted(c.quadrisecant.key for c in self.atlas.crossings),
                         sorted(q.key for q in quads))


class TestPlanarWiggle(unittest.TestCase):

    def setUp(self):
        # L-shaped hexagon, one corner lifted off the plane
        hexagon = PolyLink(components=((
            Point3.of(0, 0, Fraction(1, 4)), Point3.of(2, 0, 0), Point3.of(2, 1, 0),
            Point3.of(1, 1, 0), Point3.of(1, 2, 0), Point3.of(0, 2, 0)),))
        self.link = perturb(hexagon, Fraction(1, 1000), seed=1)
        self.atlas = trace_obstruction(self.link, 0)

    def test_clear_apex_on_nonconvex_curve(self):
        print("\n[TEST] Nonconvex unknot: trisecants exist, yet a clear apex spans a verified disk")
        self.assertGreater(len(self.atlas.arcs), 0)
        apex = find_clear_arc(self.atlas, self.link)
        self.assertIsNotNone(apex)
        disk = build_chord_disk(self.link, 0, apex)
        self.assertEqual(len(disk.triangles), 6)
        self.assertTrue(disk.degenerate[apex.edge])


if __name__ == '__main__':
    unittest.main()
