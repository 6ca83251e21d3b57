from unittest import TestCase
from nose.plugins.attrib import attr

import numpy as np

from qhgeo.conditions import estimate_uniformity
from qhgeo.discretize import GridParams, build_graph
from qhgeo.domains import Annulus, Comb, Disk, Rectangle, SlitPolygon
from qhgeo.inequalities import (BALL_SCALES, CHECKS, RECORD_FIELDS, InequalityRecord, InequalityReport,
                                _point_pairs, check_cone_curves, check_distance_inequalities, check_small_ball,
                                check_uniform_bound, run_inequalities)
from qhgeo.util import PreconditionError


class TestInequalityRecord(TestCase):
    def setUp(self):
        pass

    def tearDown(self):
        pass

    ### Tests
    def test_lower_bound(self):
        record = InequalityRecord('path', (0, 0), (1, 0), 2.0, 1.5, True, 0.0)

        self.assertEqual(record.residual, 0.5)
        self.assertTrue(record.ok)

    def test_upper_bound_with_tolerance(self):
        record = InequalityRecord('small_ball', (0, 0), (1, 0), 2.0, 1.9, False, 0.15)

        self.assertAlmostEqual(record.residual, -0.1)
        self.assertTrue(record.ok)
        self.assertFalse(InequalityRecord('small_ball', (0, 0), (1, 0), 2.0, 1.5, False, 0.15).ok)

    def test_row(self):
        row = InequalityRecord('path', (0, 0), (1, 0), 1.0, 2.0, True, 0.1).row()

        self.assertEqual(len(row), len(RECORD_FIELDS))
        self.assertEqual(row[-1], 'false')

    def test_report(self):
        good = InequalityRecord('path', (0, 0), (1, 0), 2.0, 1.0, True, 0.0)
        bad = InequalityRecord('small_ball', (0, 0), (1, 0), 2.0, 1.0, False, 0.0)
        report = InequalityReport([good], 1) + InequalityReport([bad], 2)

        self.assertEqual(report.skipped, 3)
        self.assertFalse(report.ok)
        self.assertEqual(report.violations, [bad])
        self.assertEqual(report.by_check('path'), [good])
        self.assertEqual(report.dict()['violations'], 1)


def _domains():
    return (('disk', Disk((0, 0), 1)),
            ('annulus', Annulus((0, 0), 0.5, 1.0)),
            ('rectangle', Rectangle((0, 0), (2, 1))),
            ('comb', Comb(3)),
            ('slit_square', SlitPolygon([(0, 0), (1, 0), (1, 1), (0, 1)], [[(0.5, 0), (0.5, 0.5)]])))


class TestInequalityChecks(TestCase):
    def setUp(self):
        self._disk = build_graph(Disk((0, 0), 1), GridParams(h_coarse=0.1, max_depth=3))

    def tearDown(self):
        pass

    ### Tests
    def test_disk(self):
        report = run_inequalities(self._disk, 10, 0)

        self.assertTrue(report.ok)
        self.assertEqual(set(r.check for r in report.records), set(CHECKS))
        self.assertEqual(report.rows()[0], list(RECORD_FIELDS))
        self.assertEqual(len(report.rows()), len(report.records) + 1)

    def test_annulus(self):
        graph = build_graph(Annulus((0, 0), 0.5, 1.0), GridParams(h_coarse=0.05, max_depth=3))
        report = check_distance_inequalities(graph, 10, 1) + check_uniform_bound(graph, 10, 1)

        self.assertTrue(report.ok)
        self.assertGreater(len(report.records), 0)

    def test_every_domain(self):
        params = {'comb': GridParams(h_coarse=0.1, max_depth=5), 'slit_square': GridParams(h_coarse=0.05, max_depth=4)}

        for name, domain in _domains():
            graph = build_graph(domain, params.get(name, GridParams(h_coarse=0.1, max_depth=3)))
            report = run_inequalities(graph, 12, 2)

            self.assertTrue(report.ok, '{0}: {1}'.format(name, report.violations))
            self.assertGreater(len(report.records), 0, name)

    def test_small_ball(self):
        report = check_small_ball(self._disk, 6, 2)

        self.assertEqual(len(report.records) + report.skipped, 18)
        self.assertTrue(report.ok)

    def test_uniform_bound_uses_given_coefficient(self):
        loose = check_uniform_bound(self._disk, 10, 4, M_hat=1.0)
        tight = check_uniform_bound(self._disk, 10, 4, M_hat=0.05)

        self.assertTrue(loose.ok)
        self.assertFalse(tight.ok)
        for record in loose.records:
            self.assertGreater(record.rhs, 0.0)
            self.assertAlmostEqual(tight.records[loose.records.index(record)].rhs, record.rhs * 0.0025)

    def test_uniform_bound_estimates_coefficient(self):
        xs, ys = _point_pairs(self._disk, 10, 4)
        M_hat = estimate_uniformity(self._disk, 'uniform', None, 4, pair_points=np.stack([xs, ys], axis=1)).M_hat

        default = check_uniform_bound(self._disk, 10, 4)
        given = check_uniform_bound(self._disk, 10, 4, M_hat=M_hat)

        self.assertEqual([r.rhs for r in default.records], [r.rhs for r in given.records])

    def test_seeded(self):
        a = check_distance_inequalities(self._disk, 5, 3)
        b = check_distance_inequalities(self._disk, 5, 3)

        self.assertEqual([r.lhs for r in a.records], [r.lhs for r in b.records])

    def test_invalid_counts(self):
        with self.assertRaises(PreconditionError):
            check_distance_inequalities(self._disk, 0, 0)

        with self.assertRaises(PreconditionError):
            check_small_ball(self._disk, 0, 0)


class TestInequalitySuite(TestCase):
    def setUp(self):
        self._params = {'comb': GridParams(h_coarse=0.05, max_depth=5)}

    def tearDown(self):
        pass

    def _graph(self, name, domain):
        return build_graph(domain, self._params.get(name, GridParams(h_coarse=0.05, max_depth=4)))

    ### Tests
    @attr('slow')
    def test_distance_inequalities(self):
        for name, domain in _domains():
            report = check_distance_inequalities(self._graph(name, domain), 1000, 1)

            self.assertEqual(len(report.records) + 2 * report.skipped, 2000, name)
            self.assertEqual(report.violations, [], name)

    @attr('slow')
    def test_lemma_bounds(self):
        disk = self._graph('disk', Disk((0, 0), 1))
        M_hat = estimate_uniformity(disk, 'uniform', 200, 1).M_hat

        small_ball = check_small_ball(disk, 200, 1)
        cone = check_cone_curves(disk, 100, 1)
        uniform = check_uniform_bound(disk, 200, 1, M_hat=M_hat)

        self.assertEqual(len(small_ball.records) + small_ball.skipped, 200 * len(BALL_SCALES))
        self.assertEqual(len(cone.records) + cone.skipped, 100)
        self.assertEqual(len(uniform.records) + uniform.skipped, 200)
        for report in (small_ball, cone, uniform):
            self.assertTrue(report.ok, report.violations)
