"""
Experiment configuration: verdict thresholds and the experiment file read by
the command line runner.

.. moduleauthor:: qhgeo developers
"""

import io
import json
import math

from .discretize import GridParams
from .util import ConfigError, PreconditionError


class Thresholds(object):
    """
    Pass limits for the property verdicts, and the discretization tolerance
    used by inequality checks.
    """

    uniformity = 10.0
    """Largest accepted uniformity estimate of the target domain."""
    quasihyperbolicity = 2.0
    """Largest accepted quasihyperbolicity coefficient."""
    delta = 5.0
    """Largest accepted hyperbolicity estimate."""
    envelope_cap = 1e6
    """Largest accepted value of the quasisymmetry majorant."""
    tolerance = 0.15
    """Relative discretization tolerance."""
    tau_cap = 1.0
    """Largest admissible visual parameter."""

    FIELDS = ('uniformity', 'quasihyperbolicity', 'delta', 'envelope_cap', 'tolerance', 'tau_cap')

    def __init__(self, **kwargs):
        """
        Constructor

        :raises: :py:class:`~qhgeo.util.ConfigError`
        """
        for name, value in kwargs.items():
            if name not in self.FIELDS:
                raise ConfigError('Unknown threshold: {0}'.format(name))
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ConfigError('Threshold {0} must be a number: {1!r}'.format(name, value))
            if not (math.isfinite(value) and value > 0):
                raise ConfigError('Threshold {0} must be positive: {1!r}'.format(name, value))
            setattr(self, name, value)

    def __repr__(self):
        return 'Thresholds({0})'.format(self.dict())

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        values = dict((name, getattr(self, name)) for name in self.FIELDS)
        values.update(kwargs)
        return values


class ExperimentConfig(object):
    """
    Settings shared by every subcommand, read from one JSON object.  Command
    line flags override file values.
    """

    domain = None
    """Path of the domain file."""
    target = None
    """Path of the target domain file for map checks."""
    map = None
    """Path of the sampled map file."""
    grid = None
    """:py:class:`~qhgeo.discretize.GridParams`"""
    thresholds = None
    """:py:class:`Thresholds`"""
    seed = 0
    """Seed for every random draw."""
    pairs = 200
    """Sampled pairs for pair-based estimates."""
    quadruples = 2000
    """Sampled quadruples for hyperbolicity estimates."""
    triples = 2000
    """Sampled triples for quasisymmetry envelopes."""
    anchors = 32
    """Boundary anchors for visual tables."""
    approach_depth = 4
    """Dyadic approach steps towards each anchor."""
    tau = 0.2
    """Visual parameter."""
    bins = 60
    """Envelope bins."""
    output = None
    """Output path; standard output when unset."""

    KEYS = ('domain', 'target', 'map', 'grid', 'thresholds', 'seed', 'pairs', 'quadruples', 'triples',
            'anchors', 'approach_depth', 'tau', 'bins', 'output')

    def __init__(self, **kwargs):
        """
        Constructor

        :raises: :py:class:`~qhgeo.util.ConfigError`
        """
        unknown = set(kwargs) - set(self.KEYS)
        if unknown:
            raise ConfigError('Unknown configuration key: {0}'.format(sorted(unknown)[0]))

        grid = kwargs.pop('grid', None) or {}
        thresholds = kwargs.pop('thresholds', None) or {}

        try:
            self.grid = grid if isinstance(grid, GridParams) else GridParams(**grid)
        except (TypeError, ValueError, PreconditionError) as err:
            raise ConfigError('Invalid grid parameters: {0}'.format(err))

        self.thresholds = thresholds if isinstance(thresholds, Thresholds) else Thresholds(**thresholds)

        for name, value in kwargs.items():
            if value is not None:
                setattr(self, name, value)

        self.validate()

    @classmethod
    def from_file(cls, path):
        """
        Reads a configuration file.

        :param path: JSON file
        :type path: string

        :returns: :py:class:`ExperimentConfig`

        :raises: :py:class:`~qhgeo.util.ConfigError`
        """
        try:
            with io.open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (IOError, OSError, ValueError) as err:
            raise ConfigError('Cannot read configuration {0}: {1}'.format(path, err))

        if not isinstance(data, dict):
            raise ConfigError('Configuration {0} must hold one JSON object'.format(path))

        return cls(**data)

    def validate(self):
        """
        :raises: :py:class:`~qhgeo.util.ConfigError`
        """
        for name in ('seed', 'pairs', 'quadruples', 'triples', 'anchors', 'approach_depth', 'bins'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError('{0} must be an integer: {1!r}'.format(name, value))

        for name in ('pairs', 'quadruples', 'triples', 'approach_depth', 'bins'):
            if getattr(self, name) < 1:
                raise ConfigError('{0} must be at least 1: {1}'.format(name, getattr(self, name)))

        if self.anchors < 2:
            raise ConfigError('anchors must be at least 2: {0}'.format(self.anchors))

        if not isinstance(self.tau, (int, float)) or not 0 < self.tau <= self.thresholds.tau_cap:
            raise ConfigError('tau must lie in (0, {0}]: {1!r}'.format(self.thresholds.tau_cap, self.tau))

    def update(self, **kwargs):
        """
        Applies overrides, ignoring ``None`` values.
        """
        grid = dict((k, v) for k, v in kwargs.pop('grid', {}).items() if v is not None)
        if grid:
            try:
                self.grid = self.grid.replace(**grid)
            except PreconditionError as err:
                raise ConfigError('Invalid grid parameters: {0}'.format(err))

        for name, value in kwargs.items():
            if name not in self.KEYS:
                raise ConfigError('Unknown configuration key: {0}'.format(name))
            if value is not None:
                setattr(self, name, value)

        self.validate()
        return self

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            domain          = self.domain,
            target          = self.target,
            map             = self.map,
            grid            = self.grid.dict(),
            thresholds      = self.thresholds.dict(),
            seed            = self.seed,
            pairs           = self.pairs,
            quadruples      = self.quadruples,
            triples         = self.triples,
            anchors         = self.anchors,
            approach_depth  = self.approach_depth,
            tau             = self.tau,
            bins            = self.bins,
            output          = self.output,
            **kwargs
        )
