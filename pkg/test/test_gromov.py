import math
from unittest import TestCase
from nose.plugins.attrib import attr

import numpy as np

from qhgeo.discretize import GridParams, build_graph, refine
from qhgeo.domains import Disk
from qhgeo.gromov import (BasePoint, DeltaEstimate, VisualTable, approach_anchor, choose_base_point, estimate_delta,
                          gromov_product, product_from_distances, ray_nodes, starlikeness_probe, visual_table)
from qhgeo.util import PreconditionError, TooFewPointsError


class TestDeltaFromMatrix(TestCase):
    def setUp(self):
        line = np.arange(8, dtype=float)
        self._path = np.abs(line[:, None] - line[None, :])

        self._star = np.array([[0, 1, 1, 1],
                               [1, 0, 2, 2],
                               [1, 2, 0, 2],
                               [1, 2, 2, 0]], dtype=float)

        self._cycle = np.array([[0, 1, 2, 1],
                                [1, 0, 1, 2],
                                [2, 1, 0, 1],
                                [1, 2, 1, 0]], dtype=float)

    def tearDown(self):
        pass

    ### Tests
    def test_path_is_tree_like(self):
        estimate = estimate_delta(self._path, 2000, 0)

        self.assertIsInstance(estimate, DeltaEstimate)
        self.assertLessEqual(estimate.delta_hat, 1e-9)
        self.assertEqual(estimate.quadruple_count, 2000)

    def test_star_is_tree_like(self):
        self.assertEqual(estimate_delta(self._star, 500, 3).delta_hat, 0.0)

    def test_cycle(self):
        estimate = estimate_delta(self._cycle, 2000, 0)

        self.assertGreater(estimate.delta_hat, 0.5)
        self.assertLessEqual(estimate.delta_hat, 2.0)
        self.assertEqual(len(estimate.dict()['worst_quadruple']), 4)

    def test_seeded_prefix(self):
        small = estimate_delta(self._cycle, 100, 4).delta_hat
        large = estimate_delta(self._cycle, 2000, 4).delta_hat

        self.assertLessEqual(small, large)
        self.assertEqual(large, estimate_delta(self._cycle, 2000, 4).delta_hat)

    def test_invalid(self):
        with self.assertRaises(PreconditionError):
            estimate_delta(self._cycle, 0, 0)

        with self.assertRaises(PreconditionError):
            estimate_delta(np.zeros((3, 4)), 10, 0)

    def test_product(self):
        self.assertEqual(product_from_distances(3.0, 4.0, 5.0), 1.0)


class TestGromovOnDisk(TestCase):
    def setUp(self):
        self._disk = Disk((0, 0), 1)
        self._graph = build_graph(self._disk, GridParams(h_coarse=0.1, max_depth=3))
        self._base = choose_base_point(self._graph)
        self._anchors = self._disk.boundary_sample(8, 0)

    def tearDown(self):
        pass

    ### Tests
    def test_base_point(self):
        self.assertIsInstance(self._base, BasePoint)
        self.assertLess(math.hypot(*self._base.point), 0.1)
        self.assertEqual(self._base.delta_sigma, float(np.max(self._graph.delta)))

    def test_gromov_product_at_base(self):
        p = self._base.point

        self.assertAlmostEqual(gromov_product(self._graph, p, p, (0.5, 0.1)), 0.0, places=9)

    def test_graph_delta(self):
        first = estimate_delta(self._graph, 300, 2, pool=32)
        second = estimate_delta(self._graph, 300, 2, pool=32)

        self.assertGreaterEqual(first.delta_hat, 0.0)
        self.assertTrue(math.isfinite(first.delta_hat))
        self.assertEqual(first.delta_hat, second.delta_hat)
        self.assertEqual(len(first.worst_quadruple), 4)

    def test_visual_table(self):
        table = visual_table(self._graph, self._base, 0.2, self._anchors, 4)

        self.assertIsInstance(table, VisualTable)
        self.assertEqual(table.rho.shape, (8, 8))
        np.testing.assert_allclose(table.rho, table.rho.T)
        self.assertTrue(np.all(table.rho > 0))
        self.assertTrue(np.all(table.rho <= 1 + 1e-12))
        self.assertTrue(np.all(table.depths >= 2))

        rows = table.rows()
        self.assertEqual(len(rows), 9)
        self.assertEqual(len(rows[0]), 10)

    def test_visual_proxies_inside(self):
        table = visual_table(self._graph, self._base, 0.2, self._anchors, 4)

        self.assertTrue(np.all(self._disk.contains_many(table.proxies)))
        self.assertTrue(np.all(np.hypot(table.proxies[:, 0], table.proxies[:, 1]) > 0.85))

    def test_visual_tau(self):
        for tau in (0.0, -0.1, 1.5, float('nan')):
            with self.assertRaises(PreconditionError):
                visual_table(self._graph, self._base, tau, self._anchors, 4)

        with self.assertRaises(PreconditionError):
            visual_table(self._graph, self._base, 0.2, self._anchors, 0)

        self.assertEqual(visual_table(self._graph, self._base, 1.5, self._anchors, 4, tau_cap=2.0).tau, 1.5)

    def test_approach_anchor(self):
        point, node, depth = approach_anchor(self._graph, self._base, (1.0, 0.0), 4)

        self.assertGreater(point[0], 0.5)
        self.assertAlmostEqual(point[1], 0.0, places=9)
        self.assertGreaterEqual(node, 0)
        self.assertLess(depth, 4)

    def test_rays_start_at_base(self):
        rays = ray_nodes(self._graph, self._base, self._anchors[:3])

        self.assertEqual(len(rays), 3)
        for ray in rays:
            self.assertEqual(ray[0], self._base.node)

    def test_starlikeness(self):
        value = starlikeness_probe(self._graph, self._base, self._anchors, 50, 0)

        self.assertGreaterEqual(value, 0.0)
        self.assertTrue(math.isfinite(value))

        with self.assertRaises(TooFewPointsError):
            starlikeness_probe(self._graph, self._base, [], 50, 0)

    def test_delta_scale_invariant(self):
        scaled = build_graph(self._disk.scaled(2.0), GridParams(h_coarse=0.2, max_depth=3))
        a = estimate_delta(self._graph, 500, 3, pool=32)
        b = estimate_delta(scaled, 500, 3, pool=32)

        self.assertAlmostEqual(a.delta_hat, b.delta_hat, delta=1e-9 * max(1.0, a.delta_hat))

    @attr('slow')
    def test_delta_stable_under_refinement(self):
        finer = refine(refine(self._graph, 2), 2)
        coarse = estimate_delta(self._graph, 2000, 0)
        fine = estimate_delta(finer, 2000, 0)

        self.assertGreater(coarse.delta_hat, 0.0)
        self.assertLessEqual(abs(fine.delta_hat - coarse.delta_hat), 0.25 * coarse.delta_hat)
