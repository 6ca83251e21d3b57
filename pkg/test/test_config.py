import io
import json
import os
import tempfile
from unittest import TestCase

from qhgeo.config import ExperimentConfig, Thresholds
from qhgeo.discretize import GridParams
from qhgeo.util import ConfigError


class TestThresholds(TestCase):
    def setUp(self):
        self._thresholds = Thresholds()

    def tearDown(self):
        pass

    ### Tests
    def test_defaults(self):
        self.assertEqual(self._thresholds.uniformity, 10.0)
        self.assertEqual(self._thresholds.tolerance, 0.15)
        self.assertEqual(self._thresholds.tau_cap, 1.0)

    def test_override(self):
        thresholds = Thresholds(delta='2.5')

        self.assertEqual(thresholds.delta, 2.5)
        self.assertEqual(thresholds.dict()['delta'], 2.5)

    def test_invalid(self):
        for kwargs in (dict(colour=1), dict(delta='big'), dict(delta=0), dict(envelope_cap=float('inf'))):
            with self.assertRaises(ConfigError):
                Thresholds(**kwargs)


class TestExperimentConfig(TestCase):
    def setUp(self):
        self._config = ExperimentConfig()

    def tearDown(self):
        pass

    ### Tests
    def test_defaults(self):
        self.assertIsNone(self._config.domain)
        self.assertIsInstance(self._config.grid, GridParams)
        self.assertIsInstance(self._config.thresholds, Thresholds)
        self.assertEqual(self._config.pairs, 200)
        self.assertEqual(self._config.tau, 0.2)

    def test_nested(self):
        config = ExperimentConfig(grid={'h_coarse': 0.1}, thresholds={'tau_cap': 2.0}, tau=1.5)

        self.assertEqual(config.grid.h_coarse, 0.1)
        self.assertEqual(config.tau, 1.5)

    def test_invalid(self):
        for kwargs in (dict(colour='red'), dict(pairs=0), dict(pairs=True), dict(seed=1.5), dict(anchors=1),
                       dict(tau=2.0), dict(grid={'h_coarse': -1}), dict(grid={'size': 3})):
            with self.assertRaises(ConfigError):
                ExperimentConfig(**kwargs)

    def test_update(self):
        config = self._config.update(grid={'h_coarse': 0.2, 'max_depth': None}, seed=9, pairs=None)

        self.assertIs(config, self._config)
        self.assertEqual(config.grid.h_coarse, 0.2)
        self.assertEqual(config.grid.max_depth, GridParams.max_depth)
        self.assertEqual(config.seed, 9)
        self.assertEqual(config.pairs, 200)

        with self.assertRaises(ConfigError):
            self._config.update(grid={'h_coarse': 0})

    def test_from_file(self):
        fd, path = tempfile.mkstemp(suffix='.json')
        os.close(fd)
        try:
            with io.open(path, 'w', encoding='utf-8') as f:
                f.write(json.dumps({'domain': 'disk.json', 'seed': 3, 'thresholds': {'delta': 1.0}}))
            config = ExperimentConfig.from_file(path)

            with io.open(path, 'w', encoding='utf-8') as f:
                f.write('[1, 2]')
            with self.assertRaises(ConfigError):
                ExperimentConfig.from_file(path)
        finally:
            os.remove(path)

        self.assertEqual(config.domain, 'disk.json')
        self.assertEqual(config.seed, 3)
        self.assertEqual(config.thresholds.delta, 1.0)

        with self.assertRaises(ConfigError):
            ExperimentConfig.from_file(path)

    def test_dict(self):
        data = self._config.dict()

        self.assertEqual(set(data), set(ExperimentConfig.KEYS))
        self.assertEqual(data['grid'], self._config.grid.dict())
