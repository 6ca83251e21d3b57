import math
from unittest import TestCase
from mock import Mock
from nose.plugins.attrib import attr

import numpy as np

from qhgeo.conditions import (CigarReport, PairRecord, UniformityEstimate, UniformityEstimator, cigar_coefficient,
                              estimate_uniformity, turning_coefficient, PAIR_FIELDS)
from qhgeo.discretize import GridParams, build_graph, refine
from qhgeo.domains import Comb, Disk
from qhgeo.metrics import PathRecord
from qhgeo.util import DegeneratePairError, EmptyPathError, PreconditionError


class TestPathCoefficients(TestCase):
    def setUp(self):
        self._straight = PathRecord([(0, 0.5), (0.5, 0.5), (1, 0.5)], [0.5, 0.25, 0.5])
        self._corner = PathRecord([(0, 0), (1, 0), (1, 1)], [1, 1, 1])

    def tearDown(self):
        pass

    ### Tests
    def test_cigar_straight(self):
        report = cigar_coefficient(self._straight)

        self.assertIsInstance(report, CigarReport)
        self.assertAlmostEqual(report.coefficient, 2.0)
        self.assertEqual(report.witness, 1)
        self.assertAlmostEqual(cigar_coefficient(self._straight, 'diameter').coefficient, 2.0)

    def test_cigar_length_dominates_diameter(self):
        path = PathRecord([(0, 0), (1, 0), (0, 0), (1, 0), (0, 0)], [1, 1, 1, 1, 1])

        self.assertAlmostEqual(cigar_coefficient(path, 'length').coefficient, 2.0)
        self.assertAlmostEqual(cigar_coefficient(path, 'diameter').coefficient, 1.0)

    def test_cigar_short_path(self):
        self.assertEqual(cigar_coefficient(PathRecord([(0, 0), (1, 0)], [1, 1])).coefficient, 0.0)

    def test_cigar_errors(self):
        with self.assertRaises(EmptyPathError):
            cigar_coefficient(None)

        with self.assertRaises(PreconditionError):
            cigar_coefficient(self._straight, 'width')

    def test_turning(self):
        self.assertAlmostEqual(turning_coefficient(self._straight), 1.0)
        self.assertAlmostEqual(turning_coefficient(self._corner), math.sqrt(2))
        self.assertAlmostEqual(turning_coefficient(self._corner, denominator=4.0), 0.5)

    def test_turning_degenerate(self):
        with self.assertRaises(DegeneratePairError):
            turning_coefficient(PathRecord([(0, 0), (1, 0), (0, 0)], [1, 1, 1]))

        with self.assertRaises(DegeneratePairError):
            turning_coefficient(PathRecord([(0.5, 0.5)], [0.5]))

    def test_pair_record(self):
        john = PairRecord('disk', 'john', (0, 0), (1, 1), 3.0, None)
        uniform = PairRecord('disk', 'uniform', (0, 0), (1, 1), 3.0, 4.5)

        self.assertEqual(john.M, 3.0)
        self.assertEqual(uniform.M, 4.5)
        self.assertEqual(len(uniform.row()), len(PAIR_FIELDS))
        self.assertEqual(john.row()[5], '')

    def test_empty_estimate(self):
        estimate = UniformityEstimate('uniform', [], skipped=3)

        self.assertIsNone(estimate.M_hat)
        self.assertIsNone(estimate.dict()['worst_pair'])
        self.assertEqual(estimate.skipped, 3)


class TestUniformityEstimator(TestCase):
    def setUp(self):
        self._graph = build_graph(Disk((0, 0), 1), GridParams(h_coarse=0.1, max_depth=3))

    def tearDown(self):
        pass

    ### Tests
    def test_disk_uniform(self):
        estimate = estimate_uniformity(self._graph, 'uniform', 20, 1, workers=1)

        self.assertEqual(estimate.pair_count + estimate.skipped, 20)
        self.assertGreater(estimate.pair_count, 0)
        self.assertGreaterEqual(estimate.M_hat, 1.0)
        self.assertLess(estimate.M_hat, 20.0)
        self.assertEqual(estimate.M_hat, max(1.0, max(r.M for r in estimate.records)))

    def test_seeded(self):
        a = estimate_uniformity(self._graph, 'john', 10, 7, workers=1)
        b = estimate_uniformity(self._graph, 'john', 10, 7, workers=2)

        self.assertEqual(a.M_hat, b.M_hat)
        self.assertTrue(all(r.turning is None for r in a.records))

    def test_events(self):
        estimator = UniformityEstimator(self._graph, 'uniform', workers=1)
        on_pair = Mock()
        on_skip = Mock()
        estimator.on_pair += on_pair
        estimator.on_skip += on_skip

        estimate = estimator.estimate(pair_points=[[(0.0, 0.0), (0.5, 0.2)], [(0.2, 0.2), (2.0, 2.0)]])

        self.assertEqual(estimate.pair_count, 1)
        self.assertEqual(on_pair.call_count, 1)
        on_skip.assert_called_once_with(estimator, pair=((0.2, 0.2), (2.0, 2.0)), reason='unresolved')

    def test_no_usable_pairs(self):
        estimate = estimate_uniformity(self._graph, 'uniform', None, 0, pair_points=[[(0.1, 0.1), (0.1, 0.1)]])

        self.assertIsNone(estimate.M_hat)
        self.assertEqual(estimate.skipped, 1)

    def test_inner_uniform(self):
        estimate = estimate_uniformity(self._graph, 'inner_uniform', None, 0,
                                       pair_points=[[(-0.5, 0.0), (0.5, 0.0)]])
        record = estimate.records[0]

        self.assertGreaterEqual(record.turning, 1.0 - 1e-9)
        self.assertEqual(record.M, max(record.cigar, record.turning))

    def test_invalid(self):
        with self.assertRaises(PreconditionError):
            UniformityEstimator(self._graph, 'quasiconvex')

        with self.assertRaises(PreconditionError):
            estimate_uniformity(self._graph, 'john', 0, 0)

    def test_comb_turning(self):
        graph = build_graph(Comb(1), GridParams(h_coarse=0.1, max_depth=5))
        estimate = estimate_uniformity(graph, 'uniform', None, 0, pair_points=[[(0.9, 0.5), (0.375, 0.5)]])
        record = estimate.records[0]

        self.assertEqual(estimate.M_hat, max(1.0, record.M))
        self.assertGreater(record.turning, 1.3)
        self.assertTrue(np.isfinite(record.cigar))

    def test_mode_ordering(self):
        graph = build_graph(Comb(2), GridParams(h_coarse=0.1, max_depth=5))
        john = estimate_uniformity(graph, 'john', 40, 3)
        inner = estimate_uniformity(graph, 'inner_uniform', 40, 3)
        uniform = estimate_uniformity(graph, 'uniform', 40, 3)

        self.assertLessEqual(john.M_hat, inner.M_hat + 1e-9)
        self.assertLessEqual(inner.M_hat, uniform.M_hat + 1e-9)
        for a, b, c in zip(john.records, inner.records, uniform.records):
            self.assertLessEqual(a.M, b.M + 1e-9)
            self.assertLessEqual(b.M, c.M + 1e-9)

    def test_stable_under_refinement(self):
        coarse = estimate_uniformity(self._graph, 'uniform', 60, 4)
        fine = estimate_uniformity(refine(self._graph, 2), 'uniform', 60, 4)

        self.assertLessEqual(abs(fine.M_hat - coarse.M_hat), 0.25 * coarse.M_hat)


class TestJohnDivergence(TestCase):
    def setUp(self):
        self._params = GridParams(h_coarse=0.1, max_depth=7)

    def tearDown(self):
        pass

    ### Tests
    @attr('slow')
    def test_comb_john_grows_with_teeth(self):
        values = [estimate_uniformity(build_graph(Comb(teeth), self._params), 'john', 300, 1).M_hat
                  for teeth in range(1, 6)]

        self.assertTrue(all(b > a for a, b in zip(values, values[1:])), values)
        self.assertGreaterEqual(values[-1], 5.0 * values[0])
