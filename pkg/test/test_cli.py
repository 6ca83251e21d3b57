import io
import json
import math
import os
import shutil
import tempfile
from unittest import TestCase

from qhgeo.cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, build_parser, load_config, main
from qhgeo.conditions import PAIR_FIELDS
from qhgeo.config import ExperimentConfig
from qhgeo.util import ConfigError, UsageError


class TestCli(TestCase):
    def setUp(self):
        self._dir = tempfile.mkdtemp()
        self._domain = os.path.join(self._dir, 'disk.json')
        with io.open(self._domain, 'w', encoding='utf-8') as f:
            f.write(json.dumps({'kind': 'disk', 'center': [0, 0], 'radius': 1}))

        self._stdout = io.StringIO()
        self._stderr = io.StringIO()

    def tearDown(self):
        shutil.rmtree(self._dir)

    def _run(self, *argv):
        return main(list(argv), self._stdout, self._stderr)

    def _grid(self):
        return ['--domain', self._domain, '--h', '0.1', '--max-depth', '3']

    ### Tests
    def test_constants(self):
        status = self._run('constants', '--M', '36', '--C', '37')
        data = json.loads(self._stdout.getvalue())

        self.assertEqual(status, EXIT_OK)
        self.assertEqual(data['logC1'], dict(level=0, mantissa=7096896.0))
        self.assertIn('7096896', self._stdout.getvalue())

    def test_constants_monotonicity(self):
        status = self._run('constants', '--M', '36', '--C', '37', '--monotonicity')

        self.assertEqual(status, EXIT_OK)
        self.assertTrue(json.loads(self._stdout.getvalue())['monotone'])

    def test_constants_constraint(self):
        self.assertEqual(self._run('constants', '--M', '30', '--C', '37'), EXIT_CHECK_FAILED)
        self.assertIn('ConstraintError', self._stderr.getvalue())

    def test_constants_bad_eta(self):
        self.assertEqual(self._run('constants', '--M', '36', '--C', '37', '--eta', 'exp:1:1'), EXIT_USAGE)

    def test_usage_errors(self):
        self.assertEqual(self._run('nosuch'), EXIT_USAGE)
        self.assertEqual(self._run(), EXIT_USAGE)
        self.assertEqual(self._run('dist', '--domain', self._domain), EXIT_USAGE)
        self.assertIn('qhgeo:', self._stderr.getvalue())

    def test_missing_domain(self):
        status = self._run('dist', '--domain', os.path.join(self._dir, 'missing.json'), '--from', '0,0',
                           '--to', '0.1,0')

        self.assertEqual(status, EXIT_USAGE)
        self.assertIn('Cannot read domain', self._stderr.getvalue())

    def test_dist(self):
        status = self._run('dist', '--from', '-0.3,-0.3', '--to', '0.3,0.3', *self._grid())

        self.assertEqual(status, EXIT_OK)
        self.assertAlmostEqual(float(self._stdout.getvalue()), math.sqrt(0.72), delta=0.05)

    def test_dist_json(self):
        status = self._run('dist', '--metric', 'qh', '--from', '0,0', '--to', '0.5,0', '--format', 'json',
                           *self._grid())
        data = json.loads(self._stdout.getvalue())

        self.assertEqual(status, EXIT_OK)
        self.assertEqual(data['metric'], 'quasihyperbolic')
        self.assertAlmostEqual(data['distance'], math.log(2.0), delta=0.1)

    def test_dist_bad_point(self):
        self.assertEqual(self._run('dist', '--from', 'a,b', '--to', '0,0', *self._grid()), EXIT_USAGE)

    def test_dist_outside(self):
        status = self._run('dist', '--from', '0,0', '--to', '2,0', *self._grid())

        self.assertEqual(status, EXIT_CHECK_FAILED)
        self.assertIn('PointOutsideDomainError', self._stderr.getvalue())

    def test_deformed_requires_epsilon(self):
        status = self._run('dist', '--metric', 'deformed', '--from', '0,0', '--to', '0.5,0', *self._grid())

        self.assertEqual(status, EXIT_USAGE)
        self.assertIn('--epsilon', self._stderr.getvalue())

    def test_geodesic(self):
        status = self._run('geodesic', '--from', '-0.5,0', '--to', '0.5,0', *self._grid())
        data = json.loads(self._stdout.getvalue())

        self.assertEqual(status, EXIT_OK)
        self.assertEqual(data['points'][0], [-0.5, 0.0])
        self.assertEqual(data['points'][-1], [0.5, 0.0])

    def test_domain_info(self):
        status = self._run('domain', 'info', *self._grid())
        data = json.loads(self._stdout.getvalue())

        self.assertEqual(status, EXIT_OK)
        self.assertEqual(data['domain']['kind'], 'disk')
        self.assertGreater(data['nodes'], 0)

    def test_uniformity_csv(self):
        status = self._run('uniformity', '--pairs', '10', '--format', 'csv', *self._grid())
        lines = self._stdout.getvalue().splitlines()

        self.assertEqual(status, EXIT_OK)
        self.assertEqual(lines[0], ','.join(PAIR_FIELDS))

    def test_output_file(self):
        path = os.path.join(self._dir, 'delta.json')
        status = self._run('delta', '--quadruples', '100', '--pool', '16', '--output', path, *self._grid())

        with io.open(path, encoding='utf-8') as f:
            data = json.load(f)

        self.assertEqual(self._stdout.getvalue(), '')
        self.assertIn(status, (EXIT_OK, EXIT_CHECK_FAILED))
        self.assertEqual(data['quadruple_count'], 100)

    def test_visual_csv(self):
        status = self._run('visual', '--anchors', '6', *self._grid())
        lines = self._stdout.getvalue().splitlines()

        self.assertEqual(status, EXIT_OK)
        self.assertEqual(len(lines), 7)
        self.assertTrue(lines[0].startswith('x,y,rho_0'))

    def test_seeded_rerun_is_identical(self):
        commands = (['uniformity', '--pairs', '10', '--seed', '3', '--format', 'csv'],
                    ['delta', '--quadruples', '100', '--pool', '16', '--seed', '3'],
                    ['inequalities', '--pairs', '5', '--seed', '3'])

        for command in commands:
            outputs = []
            for _ in range(2):
                stdout = io.StringIO()
                main(command + self._grid(), stdout, io.StringIO())
                outputs.append(stdout.getvalue())

            self.assertNotEqual(outputs[0], '')
            self.assertEqual(outputs[0], outputs[1])

    def test_usage_error_is_config_error(self):
        self.assertTrue(issubclass(UsageError, ConfigError))
        self.assertEqual(self._run('dist', '--metric'), EXIT_USAGE)

    def test_config_file(self):
        path = os.path.join(self._dir, 'config.json')
        with io.open(path, 'w', encoding='utf-8') as f:
            f.write(json.dumps({'domain': self._domain, 'grid': {'h_coarse': 0.1, 'max_depth': 3}, 'pairs': 12}))

        args = build_parser().parse_args(['uniformity', '--config', path, '--seed', '5'])
        config = load_config(args)

        self.assertIsInstance(config, ExperimentConfig)
        self.assertEqual(config.pairs, 12)
        self.assertEqual(config.seed, 5)
        self.assertEqual(config.grid.h_coarse, 0.1)

    def test_bad_config_file(self):
        path = os.path.join(self._dir, 'config.json')
        with io.open(path, 'w', encoding='utf-8') as f:
            f.write(json.dumps({'colour': 'red'}))

        self.assertEqual(self._run('domain', 'info', '--config', path), EXIT_USAGE)
        self.assertIn('colour', self._stderr.getvalue())
