import json
import math
import os
import tempfile
from unittest import TestCase
from mock import Mock

import numpy as np

from qhgeo.discretize import GridParams, GraphBuilder, MetricGraph, build_graph, refine, GRAPH_SCHEMA
from qhgeo.domains import Disk, Comb, Rectangle
from qhgeo.metrics import quasihyperbolic_distance
from qhgeo.util import PreconditionError, NodeBudgetError, DisconnectedGraphError, GraphBuildError


class TestGridParams(TestCase):
    def setUp(self):
        self._params = GridParams()

    def tearDown(self):
        pass

    ### Tests
    def test_defaults(self):
        self.assertEqual(self._params.h_coarse, 0.05)
        self.assertEqual(self._params.whitney_c, 0.5)
        self.assertEqual(self._params.max_nodes, 200000)
        self.assertEqual(self._params.neighbor_stencil, 'king8')

    def test_validation(self):
        for kwargs in (dict(h_coarse=0), dict(h_coarse=-1), dict(whitney_c=0), dict(whitney_c=1.5),
                       dict(max_nodes=1), dict(neighbor_stencil='hex6'), dict(max_depth=21),
                       dict(orphan_fraction=1.0)):
            with self.assertRaises(PreconditionError):
                GridParams(**kwargs)

    def test_replace(self):
        params = self._params.replace(h_coarse=0.1, max_depth=3)

        self.assertEqual(params.h_coarse, 0.1)
        self.assertEqual(params.max_depth, 3)
        self.assertEqual(params.whitney_c, self._params.whitney_c)
        self.assertEqual(self._params.h_coarse, 0.05)


class TestGraphBuilder(TestCase):
    def setUp(self):
        self._disk = Disk((0, 0), 1)
        self._params = GridParams(h_coarse=0.2, max_depth=3)
        self._graph = build_graph(self._disk, self._params)

    def tearDown(self):
        pass

    ### Tests
    def test_nodes_inside(self):
        graph = self._graph

        self.assertGreater(graph.node_count, 100)
        self.assertTrue(np.all(self._disk.contains_many(graph.points)))
        np.testing.assert_allclose(graph.delta, self._disk.boundary_gap_many(graph.points), rtol=1e-12)

    def test_whitney_cap(self):
        graph = self._graph
        cap = self._params.whitney_c * (graph.delta - graph.spacing * math.sqrt(2) / 2)

        self.assertTrue(np.all(graph.spacing <= cap + 1e-12))

    def test_edge_lengths(self):
        graph = self._graph
        euclid = np.hypot(*(graph.points[graph.rows] - graph.points[graph.indices]).T)

        np.testing.assert_allclose(graph.euclid, euclid, rtol=1e-12)
        self.assertTrue(np.all(graph.edges[:, 0] < graph.edges[:, 1]))

    def test_qh_weight_sandwich(self):
        graph = self._graph
        lo = graph.euclid / np.maximum(graph.delta[graph.rows], graph.delta[graph.indices])
        hi = graph.euclid / np.minimum(graph.delta[graph.rows], graph.delta[graph.indices])

        self.assertTrue(np.all(lo <= graph.qh * (1 + 1e-12)))
        self.assertTrue(np.all(graph.qh <= hi * (1 + 1e-12)))

    def test_immutable(self):
        with self.assertRaises(ValueError):
            self._graph.points[0, 0] = 5.0

        with self.assertRaises(ValueError):
            self._graph.qh[0] = 0.0

    def test_neighbors_sorted_and_symmetric(self):
        graph = self._graph
        for node in (0, graph.node_count // 2, graph.node_count - 1):
            nbrs = graph.neighbors(node)
            self.assertTrue(np.all(np.diff(nbrs) > 0))
            for other in nbrs:
                self.assertIn(node, graph.neighbors(other))

    def test_matrix(self):
        matrix = self._graph.matrix('qh')

        self.assertEqual(matrix.shape, (self._graph.node_count, self._graph.node_count))
        self.assertIs(matrix, self._graph.matrix('qh'))
        self.assertEqual(matrix.nnz, 2 * self._graph.edge_count)

    def test_unknown_weight(self):
        with self.assertRaises(PreconditionError):
            self._graph.weights('hyperbolic')

    def test_events(self):
        builder = GraphBuilder(self._disk, self._params)
        on_level = Mock()
        on_built = Mock()
        builder.on_level += on_level
        builder.on_built += on_built

        graph = builder.build()

        self.assertEqual(on_level.call_count, self._params.max_depth + 1)
        self.assertEqual(on_level.call_args_list[0][1]['level'], 0)
        on_built.assert_called_once_with(builder, graph=graph)

    def test_node_budget(self):
        with self.assertRaises(NodeBudgetError):
            build_graph(self._disk, GridParams(h_coarse=0.2, max_depth=3, max_nodes=10))

    def test_too_coarse(self):
        with self.assertRaises(DisconnectedGraphError):
            build_graph(self._disk, GridParams(h_coarse=10.0, max_depth=0))

    def test_deterministic(self):
        again = build_graph(self._disk, self._params)

        np.testing.assert_array_equal(again.points, self._graph.points)
        np.testing.assert_array_equal(again.edges, self._graph.edges)

    def test_comb_is_connected_around_slits(self):
        comb = Comb(1)
        graph = build_graph(comb, GridParams(h_coarse=0.1, max_depth=4))

        self.assertTrue(np.any(graph.points[:, 0] < 0.5))
        self.assertTrue(np.any(graph.points[:, 0] > 0.625))

        # No edge crosses a slit.
        u, v = graph.edges.T
        self.assertTrue(np.all(comb.segments_clear(graph.points[u], graph.points[v])))

    def test_stencils(self):
        square = Rectangle((0, 0), (1, 1))
        axis = build_graph(square, GridParams(h_coarse=0.1, max_depth=2, neighbor_stencil='axis4'))
        king = build_graph(square, GridParams(h_coarse=0.1, max_depth=2, neighbor_stencil='king8'))

        self.assertEqual(axis.node_count, king.node_count)
        self.assertLess(axis.edge_count, king.edge_count)

    def test_dump(self):
        fd, path = tempfile.mkstemp(suffix='.json')
        os.close(fd)
        try:
            self._graph.dump(path)
            with open(path) as f:
                data = json.load(f)
        finally:
            os.remove(path)

        self.assertEqual(data['schema'], GRAPH_SCHEMA)
        self.assertEqual(data['domain'], self._disk.dict())
        self.assertEqual(len(data['nodes']), self._graph.node_count)
        self.assertEqual(len(data['edges']), self._graph.edge_count)

    def test_refine(self):
        finer = refine(self._graph, 2)

        self.assertIsInstance(finer, MetricGraph)
        self.assertGreater(finer.node_count, self._graph.node_count)
        self.assertEqual(finer.params.h_coarse, 0.1)

        with self.assertRaises(PreconditionError):
            refine(self._graph, 1)

    def test_refine_does_not_lengthen(self):
        x, y = (-0.5, 0.0), (0.5, 0.0)
        coarse = quasihyperbolic_distance(self._graph, x, y)
        fine = quasihyperbolic_distance(refine(self._graph, 2), x, y)

        self.assertLessEqual(fine, coarse * (1 + 1e-3))
        self.assertGreaterEqual(fine, 2 * math.log(2.0) - 1e-9)

    def test_scale_invariance(self):
        scaled = build_graph(self._disk.scaled(2.0), self._params.replace(h_coarse=0.4))
        x, y = np.array([-0.5, 0.1]), np.array([0.6, -0.2])

        self.assertEqual(scaled.node_count, self._graph.node_count)
        self.assertAlmostEqual(quasihyperbolic_distance(scaled, 2 * x, 2 * y),
                               quasihyperbolic_distance(self._graph, x, y), places=9)

    def test_error_hierarchy(self):
        self.assertTrue(issubclass(DisconnectedGraphError, GraphBuildError))
        self.assertTrue(issubclass(NodeBudgetError, GraphBuildError))
