"""
Cigar and turning conditions on paths, and sampled estimates of the John,
uniformity and inner-uniformity coefficients of a discretized domain.

.. moduleauthor:: qhgeo developers
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .event import event
from .metrics import engine_for
from .util import EmptyPathError, DegeneratePairError, PreconditionError, make_rng, worker_count
from .variants import LENGTH, DIAMETER, CIGAR_VARIANTS, JOHN, UNIFORM, INNER_UNIFORM, MODES, QUASIHYPERBOLIC

logger = logging.getLogger(__name__)

PAIR_FIELDS = ('domain', 'mode', 'x', 'y', 'cigar', 'turning', 'M')
"""CSV columns of per-pair records."""

CHUNK = 64
"""Pairs whose distance tables are computed together."""


class CigarReport(object):
    """
    Smallest cigar constant of one path.
    """

    coefficient = 0.0
    """Smallest M for which the path satisfies the M-cigar condition."""
    witness = 0
    """Index of the vertex attaining it."""
    variant = LENGTH
    """``length`` or ``diameter``."""

    def __init__(self, coefficient, witness, variant):
        self.coefficient = float(coefficient)
        self.witness = int(witness)
        self.variant = variant

    def __repr__(self):
        return 'CigarReport({0})'.format(self.dict())

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            coefficient     = self.coefficient,
            witness         = self.witness,
            variant         = self.variant,
            **kwargs
        )


def _prefix_diameters(points):
    diam = np.zeros(len(points))
    for z in range(1, len(points)):
        reach = np.max(np.hypot(*(points[:z] - points[z]).T))
        diam[z] = max(diam[z - 1], reach)
    return diam


def cigar_coefficient(path, variant=LENGTH):
    """
    Largest ratio, over interior vertices z, of the shorter arm of the path at
    z to the boundary distance of z.  Arms are measured by length or by
    Euclidean diameter.

    :param path: path to evaluate
    :type path: :py:class:`~qhgeo.metrics.PathRecord`
    :param variant: ``length`` or ``diameter``
    :type variant: string

    :returns: :py:class:`CigarReport`

    :raises: :py:class:`~qhgeo.util.EmptyPathError`
    """
    if path is None or len(path) == 0:
        raise EmptyPathError('Path has no nodes')
    if variant not in CIGAR_VARIANTS:
        raise PreconditionError('Unknown cigar variant: {0}'.format(variant))

    n = len(path)
    if n <= 2:
        return CigarReport(0.0, 0, variant)

    if variant == LENGTH:
        prefix = np.concatenate(([0.0], np.cumsum(path.segment_euclid)))
        suffix = prefix[-1] - prefix
    else:
        prefix = _prefix_diameters(path.points)
        suffix = _prefix_diameters(path.points[::-1])[::-1]

    ratio = np.minimum(prefix, suffix)[1:-1] / path.deltas[1:-1]
    witness = int(np.argmax(ratio)) + 1

    return CigarReport(ratio[witness - 1], witness, variant)


def turning_coefficient(path, denominator=None):
    """
    Path length over endpoint distance.

    :param path: path to evaluate
    :type path: :py:class:`~qhgeo.metrics.PathRecord`
    :param denominator: endpoint distance to use instead of the chord, such as
                        the inner distance
    :type denominator: float

    :returns: float

    :raises: :py:class:`~qhgeo.util.DegeneratePairError`
    """
    if path is None or len(path) == 0:
        raise EmptyPathError('Path has no nodes')

    denom = path.euclid_chord if denominator is None else float(denominator)
    if len(path) < 2 or not denom > 0:
        raise DegeneratePairError('Path endpoints coincide')

    return path.inner_len / denom


class PairRecord(object):
    """
    Coefficients measured on one sampled pair.
    """

    def __init__(self, domain, mode, x, y, cigar, turning):
        self.domain = domain
        self.mode = mode
        self.x = tuple(float(c) for c in x)
        self.y = tuple(float(c) for c in y)
        self.cigar = cigar
        self.turning = turning
        self.M = cigar if mode == JOHN else max(cigar, turning)

    def __repr__(self):
        return 'PairRecord({0})'.format(self.dict())

    def row(self):
        """
        CSV row in :py:data:`PAIR_FIELDS` order.
        """
        return [self.domain, self.mode, '{0!r},{1!r}'.format(*self.x), '{0!r},{1!r}'.format(*self.y),
                repr(self.cigar), '' if self.turning is None else repr(self.turning), repr(self.M)]

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            domain      = self.domain,
            mode        = self.mode,
            x           = list(self.x),
            y           = list(self.y),
            cigar       = self.cigar,
            turning     = self.turning,
            M           = self.M,
            **kwargs
        )


class UniformityEstimate(object):
    """
    Sampled maximum of per-pair coefficients; a lower bound on the true
    coefficient of the domain.
    """

    M_hat = None
    """Estimated coefficient (at least 1), or None when no pair was usable."""
    pair_count = 0
    """Number of usable pairs."""
    worst_pair = None
    """Pair attaining the estimate."""
    mode = UNIFORM
    """``john``, ``uniform`` or ``inner_uniform``."""
    skipped = 0
    """Number of pairs skipped as degenerate or unresolved."""

    def __init__(self, mode, records, skipped=0):
        self.mode = mode
        self.records = records
        self.pair_count = len(records)
        self.skipped = skipped

        if records:
            worst = max(records, key=lambda r: r.M)
            self.M_hat = max(1.0, worst.M)
            self.worst_pair = (worst.x, worst.y)

    def __repr__(self):
        return 'UniformityEstimate({0})'.format(self.dict())

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            mode            = self.mode,
            M_hat           = self.M_hat,
            pair_count      = self.pair_count,
            skipped         = self.skipped,
            worst_pair      = None if self.worst_pair is None else [list(p) for p in self.worst_pair],
            **kwargs
        )


class UniformityEstimator(object):
    """
    Evaluates cigar and turning coefficients along quasihyperbolic geodesics
    between sampled point pairs.
    """

    on_pair = event.Event("This event is called for each evaluated pair.\n\n**Callback definition:** *def callback(estimator, record)*")
    on_skip = event.Event("This event is called for each skipped pair.\n\n**Callback definition:** *def callback(estimator, pair, reason)*")

    def __init__(self, graph, mode=UNIFORM, workers=None, domain_id=None):
        """
        Constructor

        :param graph: metric graph
        :type graph: :py:class:`~qhgeo.discretize.MetricGraph`
        :param mode: ``john``, ``uniform`` or ``inner_uniform``
        :type mode: string
        :param workers: worker threads; defaults to ``QHGEO_THREADS``
        :type workers: int
        :param domain_id: label written to pair records
        :type domain_id: string
        """
        if mode not in MODES:
            raise PreconditionError('Unknown mode: {0}'.format(mode))

        self.graph = graph
        self.mode = mode
        self.workers = workers if workers is not None else worker_count()
        self.domain_id = domain_id if domain_id is not None else graph.spec.kind
        self.engine = engine_for(graph)

    def sample_pairs(self, pairs, seed):
        """
        Seeded continuum pairs drawn uniformly from the domain.

        :returns: array of shape (pairs, 2, 2)
        """
        rng = make_rng(seed)
        pool = self.graph.spec.sample_interior(2 * pairs, rng)
        return pool.reshape(pairs, 2, 2)

    def estimate(self, pairs=None, seed=0, pair_points=None):
        """
        Runs the estimate on seeded pairs or on explicit pair points.

        :param pairs: number of seeded pairs
        :type pairs: int
        :param seed: random seed
        :type seed: int
        :param pair_points: explicit pairs, overriding sampling
        :type pair_points: sequence of (point, point)

        :returns: :py:class:`UniformityEstimate`
        """
        if pair_points is None:
            if pairs is None or pairs < 1:
                raise PreconditionError('pairs must be at least 1: {0}'.format(pairs))
            pair_points = self.sample_pairs(pairs, seed)

        pair_points = np.asarray(pair_points, dtype=float).reshape(-1, 2, 2)
        g = self.graph
        snapped = self.engine.snap(pair_points.reshape(-1, 2)).reshape(-1, 2)

        jobs = []
        skipped = 0
        for (x, y), (a, b) in zip(pair_points, snapped):
            if a < 0 or b < 0:
                skipped += 1
                self.on_skip(pair=(tuple(x), tuple(y)), reason='unresolved')
                continue

            cells = 2.0 * max(g.spacing[a], g.spacing[b])
            if a == b or np.hypot(*(x - y)) < cells:
                skipped += 1
                self.on_skip(pair=(tuple(x), tuple(y)), reason='degenerate')
                continue

            jobs.append((x, y, int(a), int(b)))

        records = []
        for start in range(0, len(jobs), CHUNK):
            chunk = jobs[start:start + CHUNK]
            sources = sorted(set(j[2] for j in chunk) | set(j[3] for j in chunk))
            self.engine.tables('qh', sources)
            if self.mode == INNER_UNIFORM:
                self.engine.tables('euclid', sources)

            if self.workers > 1 and len(chunk) > 1:
                with ThreadPoolExecutor(max_workers=self.workers) as pool:
                    results = list(pool.map(self._evaluate, chunk))
            else:
                results = [self._evaluate(job) for job in chunk]

            for record in results:
                records.append(record)
                self.on_pair(record=record)

        logger.debug('%s estimate on %s: %d pairs, %d skipped', self.mode, self.domain_id, len(records), skipped)
        return UniformityEstimate(self.mode, records, skipped)

    def _evaluate(self, job):
        x, y, a, b = job
        path = self.engine.node_geodesic(a, b, QUASIHYPERBOLIC)
        cigar = cigar_coefficient(path, LENGTH).coefficient

        turning = None
        if self.mode == UNIFORM:
            turning = turning_coefficient(path)
        elif self.mode == INNER_UNIFORM:
            turning = turning_coefficient(path, self.engine.table('euclid', a)[b])

        return PairRecord(self.domain_id, self.mode, x, y, cigar, turning)


def estimate_uniformity(graph, mode, pairs, seed, pair_points=None, workers=None):
    """
    Estimates the John, uniformity or inner-uniformity coefficient of the
    discretized domain from seeded pairs.  Candidate curves are
    quasihyperbolic geodesics.  Pairs closer than two cells or not resolved by
    the graph are skipped and counted.

    :param graph: metric graph
    :type graph: :py:class:`~qhgeo.discretize.MetricGraph`
    :param mode: ``john``, ``uniform`` or ``inner_uniform``
    :type mode: string
    :param pairs: number of seeded pairs
    :type pairs: int
    :param seed: random seed
    :type seed: int

    :returns: :py:class:`UniformityEstimate`
    """
    return UniformityEstimator(graph, mode, workers).estimate(pairs, seed, pair_points)
