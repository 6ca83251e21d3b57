"""
Seeded batch checks of the standard quasihyperbolic estimates on a
discretized domain.  Every check produces residual records; a record is
satisfied when its residual is at least ``-tol``.

.. moduleauthor:: qhgeo developers
"""

import logging
import math

import numpy as np

from .conditions import estimate_uniformity
from .metrics import engine_for, geodesic, inner_distance, quasihyperbolic_distance
from .util import PointOutsideDomainError, PreconditionError, TooFewPairsError, UnreachableNodeError, make_rng
from .variants import QUASIHYPERBOLIC, UNIFORM

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 0.15
"""Relative discretization tolerance."""

BALL_SCALES = (2, 4, 8)
"""Ratios ``a`` for the small-ball bound."""

RECORD_FIELDS = ('check', 'x_0', 'x_1', 'y_0', 'y_1', 'lhs', 'rhs', 'residual', 'ok')

PATH = 'path'
DISTANCE_LOG = 'distance_log'
DISTANCE_RATIO = 'distance_ratio'
SMALL_BALL = 'small_ball'
CONE_CURVE = 'cone_curve'
UNIFORM_BOUND = 'uniform_bound'

CHECKS = (PATH, DISTANCE_LOG, DISTANCE_RATIO, SMALL_BALL, CONE_CURVE, UNIFORM_BOUND)


class InequalityRecord(object):
    """
    One evaluated inequality.  ``residual`` is ``lhs - rhs`` for lower bounds
    and ``rhs - lhs`` for upper bounds.
    """

    def __init__(self, check, x, y, lhs, rhs, lower, tol):
        self.check = check
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.lhs = float(lhs)
        self.rhs = float(rhs)
        self.residual = self.lhs - self.rhs if lower else self.rhs - self.lhs
        self.tol = float(tol)
        self.ok = self.residual >= -self.tol

    def __repr__(self):
        return 'InequalityRecord({0}, residual={1:.6g}, ok={2})'.format(self.check, self.residual, self.ok)

    def row(self):
        return [self.check, repr(float(self.x[0])), repr(float(self.x[1])), repr(float(self.y[0])),
                repr(float(self.y[1])), repr(self.lhs), repr(self.rhs), repr(self.residual),
                'true' if self.ok else 'false']

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            check       = self.check,
            x           = self.x.tolist(),
            y           = self.y.tolist(),
            lhs         = self.lhs,
            rhs         = self.rhs,
            residual    = self.residual,
            tol         = self.tol,
            ok          = self.ok,
            **kwargs
        )


class InequalityReport(object):
    """
    Records of a batch of checks and the number of samples that could not be
    evaluated.
    """

    def __init__(self, records, skipped=0):
        self.records = list(records)
        self.skipped = int(skipped)

    def __repr__(self):
        return 'InequalityReport(records={0}, violations={1}, skipped={2})'.format(
            len(self.records), len(self.violations), self.skipped)

    def __add__(self, other):
        return InequalityReport(self.records + other.records, self.skipped + other.skipped)

    @property
    def violations(self):
        return [r for r in self.records if not r.ok]

    @property
    def ok(self):
        return not self.violations

    def by_check(self, check):
        return [r for r in self.records if r.check == check]

    def rows(self):
        """
        CSV rows with a header.
        """
        return [list(RECORD_FIELDS)] + [r.row() for r in self.records]

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            ok          = self.ok,
            skipped     = self.skipped,
            violations  = len(self.violations),
            records     = [r.dict() for r in self.records],
            **kwargs
        )


def _point_pairs(graph, pairs, seed):
    if pairs < 1:
        raise PreconditionError('pairs must be at least 1: {0}'.format(pairs))
    points = graph.spec.sample_interior(2 * pairs, make_rng(seed))
    return points[0::2], points[1::2]


def check_distance_inequalities(graph, pairs, seed, tolerance=DEFAULT_TOLERANCE):
    """
    Checks on sampled point pairs that ``k(x, y) >= log(1 + s(x, y) / min d)``
    with s the inner distance, and ``k(x, y) >= |log(d(x) / d(y))|``, where d
    is the boundary distance.

    :returns: :py:class:`InequalityReport`
    """
    records = []
    skipped = 0
    spec = graph.spec

    for x, y in zip(*_point_pairs(graph, pairs, seed)):
        try:
            k = quasihyperbolic_distance(graph, x, y)
            sigma = inner_distance(graph, x, y)
        except (PointOutsideDomainError, UnreachableNodeError):
            skipped += 1
            continue

        dx, dy = spec.boundary_distance(x), spec.boundary_distance(y)
        rhs = math.log1p(sigma / min(dx, dy))
        records.append(InequalityRecord(DISTANCE_LOG, x, y, k, rhs, True, tolerance * rhs))

        rhs = abs(math.log(dx / dy))
        records.append(InequalityRecord(DISTANCE_RATIO, x, y, k, rhs, True, tolerance * max(1.0, rhs)))

    return InequalityReport(records, skipped)


def check_path_inequality(graph, pairs, seed, tolerance=DEFAULT_TOLERANCE):
    """
    Checks on quasihyperbolic geodesics of sampled pairs that the path's
    quasihyperbolic length is at least ``log(1 + l / min d)``, with l its
    Euclidean length and d the boundary distance at the endpoints.

    :returns: :py:class:`InequalityReport`
    """
    records = []
    skipped = 0

    for x, y in zip(*_point_pairs(graph, pairs, seed)):
        try:
            path = geodesic(graph, x, y, QUASIHYPERBOLIC)
        except (PointOutsideDomainError, UnreachableNodeError):
            skipped += 1
            continue

        rhs = math.log1p(path.inner_len / min(path.deltas[0], path.deltas[-1]))
        records.append(InequalityRecord(PATH, x, y, path.qh_len, rhs, True, tolerance * rhs))

    return InequalityReport(records, skipped)


def check_small_ball(graph, count, seed, scales=BALL_SCALES, tolerance=DEFAULT_TOLERANCE):
    """
    For sampled centers x and partners y with ``|x - y| <= d(x) / a``, checks
    ``k(x, y) <= a |x - y| / ((a - 1) d(x))``.

    :returns: :py:class:`InequalityReport`
    """
    if count < 1:
        raise PreconditionError('count must be at least 1: {0}'.format(count))

    rng = make_rng(seed)
    spec = graph.spec
    centers = spec.sample_interior(count * len(scales), rng)
    angles = rng.uniform(0.0, 2.0 * math.pi, len(centers))
    fractions = rng.uniform(0.05, 1.0, len(centers))

    records = []
    skipped = 0
    for i, x in enumerate(centers):
        a = float(scales[i % len(scales)])
        dx = spec.boundary_distance(x)
        d = fractions[i] * dx / a
        y = x + d * np.array([math.cos(angles[i]), math.sin(angles[i])])

        try:
            k = quasihyperbolic_distance(graph, x, y)
        except (PointOutsideDomainError, UnreachableNodeError):
            skipped += 1
            continue

        rhs = a * d / ((a - 1.0) * dx)
        records.append(InequalityRecord(SMALL_BALL, x, y, k, rhs, False, tolerance * max(1.0, rhs)))

    return InequalityReport(records, skipped)


def check_cone_curves(graph, count, seed, tolerance=DEFAULT_TOLERANCE):
    """
    Takes quasihyperbolic geodesics of sampled pairs as curves, finds the
    smallest ``a >= 1`` with ``l(path[x1, x]) <= a d(x)`` at every vertex, and
    checks that the quasihyperbolic length is at most ``4 a log(1 + l / d(x1))``.

    :returns: :py:class:`InequalityReport`
    """
    records = []
    skipped = 0

    for x, y in zip(*_point_pairs(graph, count, seed)):
        try:
            path = geodesic(graph, x, y, QUASIHYPERBOLIC)
        except (PointOutsideDomainError, UnreachableNodeError):
            skipped += 1
            continue

        if len(path) < 2:
            skipped += 1
            continue

        arc = np.concatenate(([0.0], np.cumsum(path.segment_euclid)))
        a = max(1.0, float(np.max(arc / path.deltas)))
        rhs = 4.0 * a * math.log1p(path.inner_len / path.deltas[0])
        records.append(InequalityRecord(CONE_CURVE, x, y, path.qh_len, rhs, False, tolerance * max(1.0, rhs)))

    return InequalityReport(records, skipped)


def check_uniform_bound(graph, pairs, seed, tolerance=DEFAULT_TOLERANCE, M_hat=None):
    """
    For sampled node pairs joined by their quasihyperbolic geodesic, checks
    ``k(x, y) <= 4 M**2 log(1 + |x - y| / min d)`` with M the uniformity
    estimate of the whole domain.

    :param M_hat: uniformity coefficient; estimated from the same pairs and
                  seed when omitted
    :type M_hat: float

    :returns: :py:class:`InequalityReport`

    :raises: :py:class:`~qhgeo.util.TooFewPairsError`
    """
    engine = engine_for(graph)
    xs, ys = _point_pairs(graph, pairs, seed)

    if M_hat is None:
        M_hat = estimate_uniformity(graph, UNIFORM, pairs, seed, pair_points=np.stack([xs, ys], axis=1)).M_hat
        if M_hat is None:
            raise TooFewPairsError('No usable pair to estimate the uniformity coefficient')

    a_nodes = engine.snap(xs)
    b_nodes = engine.snap(ys)

    records = []
    skipped = 0
    for a, b in zip(a_nodes, b_nodes):
        if a < 0 or b < 0 or a == b:
            skipped += 1
            continue

        try:
            path = engine.node_geodesic(a, b, QUASIHYPERBOLIC)
        except UnreachableNodeError:
            skipped += 1
            continue

        rhs = 4.0 * M_hat ** 2 * math.log1p(path.euclid_chord / min(graph.delta[a], graph.delta[b]))
        records.append(InequalityRecord(UNIFORM_BOUND, graph.points[a], graph.points[b], path.qh_len, rhs, False,
                                        tolerance * max(1.0, rhs)))

    logger.debug('Uniform bound with M = %.4g', M_hat)
    return InequalityReport(records, skipped)


def run_inequalities(graph, pairs, seed, tolerance=DEFAULT_TOLERANCE, M_hat=None):
    """
    Runs every check with the same pair count and seed.

    :param graph: metric graph
    :type graph: :py:class:`~qhgeo.discretize.MetricGraph`
    :param pairs: samples per check
    :type pairs: int
    :param seed: random seed
    :type seed: int
    :param tolerance: relative tolerance
    :type tolerance: float
    :param M_hat: uniformity coefficient for the uniform bound
    :type M_hat: float

    :returns: :py:class:`InequalityReport`
    """
    report = check_path_inequality(graph, pairs, seed, tolerance)
    report += check_distance_inequalities(graph, pairs, seed, tolerance)
    report += check_small_ball(graph, pairs, seed, tolerance=tolerance)
    report += check_cone_curves(graph, pairs, seed, tolerance)
    report += check_uniform_bound(graph, pairs, seed, tolerance, M_hat)

    logger.debug('%d inequality records, %d violations, %d skipped',
                 len(report.records), len(report.violations), report.skipped)
    return report
