"""
Analysis of sampled maps between two discretized domains: quasihyperbolicity,
rough quasi-isometry fits, quasisymmetry envelopes, pulled-back geodesics and
the Property A / Property B verdicts.

.. moduleauthor:: qhgeo developers
"""

import io
import json
import logging
import math

import numpy as np
from scipy.spatial import cKDTree

from .conditions import cigar_coefficient, estimate_uniformity
from .config import Thresholds
from .gromov import approach_anchor, choose_base_point, estimate_delta, visual_table
from .lognumber import LogNumber
from .metrics import engine_for
from .util import (ConfigError, PreconditionError, TooFewPairsError, TooFewPointsError, UnmatchedWaypointError,
                   make_rng)
from .variants import (LENGTH, DIAMETER, UNIFORM, PASS, FAIL, INCONCLUSIVE, PROPERTY_A, PROPERTY_B,
                       QUASIHYPERBOLIC)

logger = logging.getLogger(__name__)

L_GRID = 1.0 + 0.01 * np.arange(901)
"""Candidate multiplicative constants for rough quasi-isometry fits."""

ENVELOPE_RANGE = (1e-3, 1e3)
"""Range of distance ratios covered by envelope bins."""

RESOLUTION_EDGES = 3.0
"""Pairs closer than this many longest edges are below resolution."""


class SampledMap(object):
    """
    A map between two domains known on finitely many interior and boundary
    points.
    """

    label = ''
    """Free-form description."""

    def __init__(self, interior_pairs, boundary_pairs=None, label=''):
        """
        Constructor

        :param interior_pairs: (source, image) pairs of interior points
        :type interior_pairs: array of shape (n, 2, 2)
        :param boundary_pairs: (source, image) pairs of boundary points
        :type boundary_pairs: array of shape (m, 2, 2)
        :param label: description
        :type label: string

        :raises: :py:class:`~qhgeo.util.PreconditionError`
        """
        self.interior_pairs = self._pairs(interior_pairs, 'interior_pairs')
        self.boundary_pairs = self._pairs(boundary_pairs, 'boundary_pairs')
        self.label = label

    @staticmethod
    def _pairs(pairs, field):
        if pairs is None or len(pairs) == 0:
            return np.zeros((0, 2, 2))

        try:
            arr = np.asarray(pairs, dtype=float).reshape(-1, 2, 2)
        except ValueError:
            raise PreconditionError('{0}: expected pairs of coordinate pairs'.format(field))

        if not np.all(np.isfinite(arr)):
            raise PreconditionError('{0}: coordinates must be finite'.format(field))

        if len(np.unique(arr[:, 0, :], axis=0)) != len(arr):
            raise PreconditionError('{0}: duplicated source points'.format(field))

        return arr

    def __repr__(self):
        return 'SampledMap(label={0!r}, interior={1}, boundary={2})'.format(
            self.label, len(self.interior_pairs), len(self.boundary_pairs))

    @classmethod
    def from_file(cls, path):
        """
        Reads a map file: a JSON object with ``interior_pairs`` and
        ``boundary_pairs`` arrays of ``[[x, y], [x', y']]`` and an optional
        ``label``.

        :raises: :py:class:`~qhgeo.util.ConfigError`
        """
        try:
            with io.open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (IOError, OSError, ValueError) as err:
            raise ConfigError('Cannot read map {0}: {1}'.format(path, err))

        if not isinstance(data, dict) or 'interior_pairs' not in data:
            raise ConfigError('Map {0} needs an interior_pairs array'.format(path))

        try:
            return cls(data['interior_pairs'], data.get('boundary_pairs'), data.get('label', ''))
        except PreconditionError as err:
            raise ConfigError('Map {0}: {1}'.format(path, err))

    @classmethod
    def identity(cls, source, target, points=None, count=64, boundary_count=32, seed=0):
        """
        Identity-style correspondence: interior points of the source lying in
        the target map to themselves, boundary points map to the nearest
        boundary point of the target.

        :param source: source domain
        :type source: :py:class:`~qhgeo.domains.Domain`
        :param target: target domain
        :type target: :py:class:`~qhgeo.domains.Domain`
        :param points: interior points to use instead of a seeded sample
        :type points: array of shape (n, 2)

        :returns: :py:class:`SampledMap`
        """
        if points is None:
            points = source.sample_interior(count, make_rng(seed))
        points = np.asarray(points, dtype=float)
        points = points[target.contains_many(points)]

        boundary = source.boundary_sample(boundary_count, seed)
        images = target.nearest_boundary_point(boundary)

        return cls(np.stack((points, points), axis=1), np.stack((boundary, images), axis=1), 'identity')

    @classmethod
    def similarity(cls, source, factor, points=None, count=64, boundary_count=32, seed=0):
        """
        Correspondence of x -> factor * x onto ``source.scaled(factor)``.

        :returns: :py:class:`SampledMap`
        """
        if points is None:
            points = source.sample_interior(count, make_rng(seed))
        points = np.asarray(points, dtype=float)
        boundary = source.boundary_sample(boundary_count, seed)

        return cls(np.stack((points, factor * points), axis=1),
                   np.stack((boundary, factor * boundary), axis=1), 'similarity x{0!r}'.format(factor))

    def dict(self, **kwargs):
        """
        Dictionary representation, as written to map files.
        """
        return dict(
            label           = self.label,
            interior_pairs  = self.interior_pairs.tolist(),
            boundary_pairs  = self.boundary_pairs.tolist(),
            **kwargs
        )


def _snapped_pairs(graphG, graphY, pairs):
    nodesG = engine_for(graphG).snap(pairs[:, 0, :])
    nodesY = engine_for(graphY).snap(pairs[:, 1, :])
    ok = (nodesG >= 0) & (nodesY >= 0)
    return nodesG[ok], nodesY[ok]


def quasihyperbolicity_coefficient(graphG, graphY, m):
    """
    Smallest L >= 1 with ``k_G / L <= k_Y <= L k_G`` over all pairs of sampled
    interior points.  Pairs below either graph's resolution floor are skipped.

    :param graphG: source graph
    :type graphG: :py:class:`~qhgeo.discretize.MetricGraph`
    :param graphY: target graph
    :type graphY: :py:class:`~qhgeo.discretize.MetricGraph`
    :param m: sampled map
    :type m: :py:class:`SampledMap`

    :returns: float

    :raises: :py:class:`~qhgeo.util.TooFewPairsError`
    """
    if len(m.interior_pairs) < 2:
        raise TooFewPairsError('Need at least 2 interior pairs, got {0}'.format(len(m.interior_pairs)))

    nodesG, nodesY = _snapped_pairs(graphG, graphY, m.interior_pairs)
    if len(nodesG) < 2:
        raise TooFewPairsError('Fewer than 2 interior pairs are resolved by both graphs')

    kG = engine_for(graphG).tables('qh', nodesG)[:, nodesG]
    kY = engine_for(graphY).tables('qh', nodesY)[:, nodesY]
    i, j = np.triu_indices(len(nodesG), k=1)
    kG = kG[i, j]
    kY = kY[i, j]

    usable = (kG >= RESOLUTION_EDGES * graphG.max_edge_qh) & (kY >= RESOLUTION_EDGES * graphY.max_edge_qh)
    if not np.any(usable):
        raise TooFewPairsError('No sampled pair is above the resolution floor')

    ratio = kY[usable] / kG[usable]
    return float(max(1.0, np.max(np.maximum(ratio, 1.0 / ratio))))


def _pair_vectors(distsX, distsY):
    X = np.asarray(distsX, dtype=float)
    Y = np.asarray(distsY, dtype=float)
    if X.shape != Y.shape:
        raise PreconditionError('Distance tables differ in shape: {0} vs {1}'.format(X.shape, Y.shape))

    if X.ndim == 2:
        if X.shape[0] != X.shape[1] or len(X) < 2:
            raise TooFewPairsError('Need a square table over at least 2 indices')
        i, j = np.triu_indices(len(X), k=1)
        return X[i, j], Y[i, j]

    if X.size < 1:
        raise TooFewPairsError('No pairs given')
    return X.reshape(-1), Y.reshape(-1)


def rough_qi_parameters(distsX, distsY):
    """
    Fits ``d / L - K <= d' <= L d + K``.  For each L on a grid over [1, 10]
    the smallest K is found, and the pair minimizing ``K + (L - 1) * median(d)``
    is returned (ties go to the smaller L).

    :param distsX: source distances, a square table or a vector of pair distances
    :param distsY: image distances over the same pairs

    :returns: tuple (L, K)

    :raises: :py:class:`~qhgeo.util.TooFewPairsError`
    """
    d, dp = _pair_vectors(distsX, distsY)

    L = L_GRID[:, None]
    upper = np.max(dp[None, :] - L * d[None, :], axis=1)
    lower = np.max(d[None, :] / L - dp[None, :], axis=1)
    K = np.maximum(0.0, np.maximum(upper, lower))

    objective = K + (L_GRID - 1.0) * float(np.median(d))
    best = int(np.argmin(objective))
    return float(L_GRID[best]), float(K[best])


class QsEnvelope(object):
    """
    Binned empirical upper envelope of image distance ratios: for source
    ratios t in each logarithmic bin, the largest image ratio observed.
    """

    def __init__(self, edges, max_ratio, counts, triple_count, skipped):
        self.edges = np.asarray(edges, dtype=float)
        self.max_ratio = np.asarray(max_ratio, dtype=float)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.triple_count = int(triple_count)
        self.skipped = int(skipped)

    def __repr__(self):
        return 'QsEnvelope(bins={0}, populated={1}, triples={2})'.format(
            len(self.counts), int(np.count_nonzero(self.counts)), self.triple_count)

    @property
    def bins(self):
        """
        List of (t_low, t_high, max_ratio) with max_ratio None for empty bins.
        """
        return [(float(lo), float(hi), float(r) if c else None)
                for lo, hi, r, c in zip(self.edges[:-1], self.edges[1:], self.max_ratio, self.counts)]

    @property
    def populated(self):
        return self.counts > 0

    def eta_hat(self, t):
        """
        Envelope value at t: the bin maximum of t's bin, or None when empty or
        out of range.
        """
        idx = int(np.searchsorted(self.edges, t, side='right')) - 1
        if idx < 0 or idx >= len(self.counts) or not self.counts[idx]:
            return None
        return float(self.max_ratio[idx])

    def majorant(self):
        """
        Smallest nondecreasing function above every populated bin, evaluated
        at the populated bins.

        :returns: array of running maxima
        """
        return np.maximum.accumulate(self.max_ratio[self.populated])

    @property
    def finite(self):
        return bool(np.all(np.isfinite(self.max_ratio[self.populated])))

    def rows(self):
        """
        CSV rows with a header.
        """
        header = ['t_low', 't_high', 'count', 'max_ratio']
        body = [[repr(lo), repr(hi), str(int(c)), '' if r is None else repr(r)]
                for (lo, hi, r), c in zip(self.bins, self.counts)]
        return [header] + body

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            triple_count    = self.triple_count,
            skipped         = self.skipped,
            bins            = [dict(t_low=lo, t_high=hi, count=int(c), max_ratio=r)
                               for (lo, hi, r), c in zip(self.bins, self.counts)],
            **kwargs
        )


def _distinct_triples(rng, n, count):
    blocks = []
    drawn = 0
    while drawn < count:
        block = rng.integers(0, n, size=(max(1024, 2 * count), 3))
        block = block[(block[:, 0] != block[:, 1]) & (block[:, 1] != block[:, 2]) & (block[:, 0] != block[:, 2])]
        blocks.append(block)
        drawn += len(block)
    return np.vstack(blocks)[:count]


def qs_envelope(srcDists, dstDists, triples, seed, bins=60, t_range=ENVELOPE_RANGE):
    """
    Samples triples (a, x, b) of distinct indices and records, per logarithmic
    bin of ``t = d(a, x) / d(x, b)``, the largest ``t' = d'(a, x) / d'(x, b)``.
    Triples with ``d(x, b) = 0`` are skipped; a zero image denominator records
    an infinite ratio.

    :param srcDists: source distance table
    :type srcDists: square array
    :param dstDists: image distance table over the same indices
    :type dstDists: square array
    :param triples: number of triples
    :type triples: int
    :param seed: random seed
    :type seed: int
    :param bins: number of bins
    :type bins: int

    :returns: :py:class:`QsEnvelope`

    :raises: :py:class:`~qhgeo.util.TooFewPointsError`, :py:class:`~qhgeo.util.PreconditionError`
    """
    src = np.asarray(srcDists, dtype=float)
    dst = np.asarray(dstDists, dtype=float)
    if src.ndim != 2 or src.shape != dst.shape or src.shape[0] != src.shape[1]:
        raise PreconditionError('Distance tables must be square and equal in shape')
    if len(src) < 3:
        raise TooFewPointsError('Need at least 3 points, got {0}'.format(len(src)))
    if triples < 1:
        raise PreconditionError('triples must be at least 1: {0}'.format(triples))

    a, x, b = _distinct_triples(make_rng(seed), len(src), triples).T
    usable = src[x, b] > 0
    skipped = int(np.count_nonzero(~usable))
    a, x, b = a[usable], x[usable], b[usable]

    t = src[a, x] / src[x, b]
    with np.errstate(divide='ignore', invalid='ignore'):
        tp = np.where(dst[x, b] > 0, dst[a, x] / np.where(dst[x, b] > 0, dst[x, b], 1.0), np.inf)
    tp = np.where((dst[x, b] == 0) & (dst[a, x] == 0), 0.0, tp)

    edges = np.logspace(math.log10(t_range[0]), math.log10(t_range[1]), bins + 1)
    idx = np.searchsorted(edges, t, side='right') - 1
    inside = (idx >= 0) & (idx < bins)

    max_ratio = np.zeros(bins)
    counts = np.bincount(idx[inside], minlength=bins)
    np.maximum.at(max_ratio, idx[inside], tp[inside])

    return QsEnvelope(edges, max_ratio, counts, int(np.count_nonzero(inside)), skipped + int(np.count_nonzero(~inside)))


class PullbackSummary(object):
    """
    Cigar coefficients of pulled-back geodesics.
    """

    def __init__(self, records, within_ledger=None):
        self.records = records
        self.pair_count = len(records)
        self.max_length = max([r['length'] for r in records] or [0.0])
        self.max_diameter = max([r['diameter'] for r in records] or [0.0])
        self.within_ledger = within_ledger

    def __repr__(self):
        return 'PullbackSummary({0})'.format(self.dict())

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            pair_count      = self.pair_count,
            max_length      = self.max_length,
            max_diameter    = self.max_diameter,
            within_ledger   = self.within_ledger,
            records         = self.records,
            **kwargs
        )


def _log_coefficient(value):
    return LogNumber(0, math.log(value)) if value > 0 else None


def pullback_geodesic_cigar(graphG, graphY, m, pairs, seed, ledger=None, tolerance=None):
    """
    For seeded pairs of sampled images, takes the quasihyperbolic geodesic in
    the target, pulls every vertex back through the nearest sampled image,
    joins the pulled-back waypoints by source geodesics and measures both
    cigar coefficients of the resulting source path.

    :param ledger: constants to compare against
    :type ledger: :py:class:`~qhgeo.constants.ConstantLedger`
    :param tolerance: largest waypoint to image distance; 0.15 of the target
                      diameter when omitted
    :type tolerance: float

    :returns: :py:class:`PullbackSummary`

    :raises: :py:class:`~qhgeo.util.UnmatchedWaypointError`, :py:class:`~qhgeo.util.TooFewPairsError`
    """
    if pairs < 1:
        raise PreconditionError('pairs must be at least 1: {0}'.format(pairs))
    if len(m.interior_pairs) < 1:
        raise TooFewPairsError('Map has no interior pairs')

    engineG = engine_for(graphG)
    engineY = engine_for(graphY)
    tolerance = tolerance if tolerance is not None else 0.15 * graphY.spec.diameter_bound

    sources = m.interior_pairs[:, 0, :]
    images = m.interior_pairs[:, 1, :]
    image_tree = cKDTree(images)
    source_nodes = engineG.snap(sources)
    image_nodes = engineY.snap(images)

    usable = np.flatnonzero((source_nodes >= 0) & (image_nodes >= 0))
    if len(usable) == 0:
        raise TooFewPairsError('No sampled pair is resolved by both graphs')

    rng = make_rng(seed)
    records = []
    for i, j in usable[rng.integers(0, len(usable), size=(pairs, 2))]:
        record = dict(x=images[i].tolist(), y=images[j].tolist(), length=0.0, diameter=0.0)

        if image_nodes[i] != image_nodes[j]:
            pathY = engineY.node_geodesic(image_nodes[i], image_nodes[j], QUASIHYPERBOLIC)
            dist, nearest = image_tree.query(pathY.points)
            if np.any(dist > tolerance):
                worst = int(np.argmax(dist))
                raise UnmatchedWaypointError('Waypoint {0} is {1:.3g} from the nearest sampled image'
                                             .format(tuple(pathY.points[worst]), dist[worst]))

            waypoints = [source_nodes[k] for k in nearest if source_nodes[k] >= 0]
            waypoints = [w for n, w in enumerate(waypoints) if n == 0 or w != waypoints[n - 1]]
            if not waypoints:
                raise TooFewPairsError('No waypoint between {0} and {1} pulls back into the source graph'
                                       .format(record['x'], record['y']))

            nodes = [int(waypoints[0])]
            for a, b in zip(waypoints, waypoints[1:]):
                nodes.extend(engineG.node_geodesic(a, b, QUASIHYPERBOLIC).node_ids[1:])

            pathG = engineG.path_record(nodes)
            record['length'] = cigar_coefficient(pathG, LENGTH).coefficient
            record['diameter'] = cigar_coefficient(pathG, DIAMETER).coefficient

        records.append(record)

    within = None
    if ledger is not None:
        within = True
        for r in records:
            length = _log_coefficient(r['length'])
            diameter = _log_coefficient(r['diameter'])
            if length is not None and length > ledger.log_thm5_coeff:
                within = False
            if diameter is not None and diameter > ledger.logB0:
                within = False

    return PullbackSummary(records, within)


class PropertyVerdict(object):
    """
    Outcome of a property check: per-check records and the overall verdict.
    Any failed check fails the property; otherwise any check without enough
    data makes it inconclusive.
    """

    def __init__(self, prop):
        self.property = prop
        self.checks = []

    def add(self, name, status, measured, threshold, note=None):
        self.checks.append(dict(name=name, status=status, measured=measured, threshold=threshold, note=note))

    @property
    def overall(self):
        statuses = [c['status'] for c in self.checks]
        if FAIL in statuses:
            return FAIL
        if INCONCLUSIVE in statuses or not statuses:
            return INCONCLUSIVE
        return PASS

    @property
    def failed(self):
        return [c['name'] for c in self.checks if c['status'] == FAIL]

    def __repr__(self):
        return 'PropertyVerdict({0}, {1})'.format(self.property, self.overall)

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            property    = self.property,
            overall     = self.overall,
            checks      = self.checks,
            **kwargs
        )


def _limit_status(measured, threshold):
    return PASS if measured <= threshold else FAIL


def _envelope_check(verdict, name, envelope, cap):
    if not np.any(envelope.populated):
        verdict.add(name, INCONCLUSIVE, None, cap, 'no populated envelope bins')
        return

    majorant = envelope.majorant()
    measured = float(majorant[-1])
    verdict.add(name, _limit_status(measured, cap) if envelope.finite else FAIL, measured, cap)


def boundary_inner_distances(graph, points, approach_depth=3):
    """
    Inner distances between boundary points, through interior proxies found
    by walking in along the inward normal.

    :returns: square array
    """
    base = choose_base_point(graph)
    engine = engine_for(graph)
    approached = [approach_anchor(graph, base, p, approach_depth) for p in np.atleast_2d(points)]
    proxies = np.array([a[0] for a in approached])
    nodes = np.array([a[1] for a in approached], dtype=np.int64)

    offset = np.hypot(*(np.atleast_2d(points) - graph.points[nodes]).T)
    D = engine.tables('euclid', nodes)[:, nodes]
    D = np.minimum(D, D.T) + offset[:, None] + offset[None, :]
    np.fill_diagonal(D, 0.0)
    return D


def property_b_verdict(graphG, graphY, m, thresholds=None, pairs=200, seed=0, triples=2000, bins=60):
    """
    Checks Property B for a sampled map: the target is uniform, the map is
    quasihyperbolic, and its boundary correspondence is quasisymmetric from
    the inner-metric boundary of the source to the boundary of the target.

    :returns: :py:class:`PropertyVerdict`
    """
    thresholds = thresholds if thresholds is not None else Thresholds()
    verdict = PropertyVerdict(PROPERTY_B)

    estimate = estimate_uniformity(graphY, UNIFORM, pairs, seed)
    if estimate.M_hat is None:
        verdict.add('uniformity', INCONCLUSIVE, None, thresholds.uniformity, 'no usable pairs')
    else:
        verdict.add('uniformity', _limit_status(estimate.M_hat, thresholds.uniformity),
                    estimate.M_hat, thresholds.uniformity)

    try:
        L = quasihyperbolicity_coefficient(graphG, graphY, m)
        verdict.add('quasihyperbolicity', _limit_status(L, thresholds.quasihyperbolicity), L,
                    thresholds.quasihyperbolicity)
    except TooFewPairsError as err:
        verdict.add('quasihyperbolicity', INCONCLUSIVE, None, thresholds.quasihyperbolicity, str(err))

    if len(m.boundary_pairs) < 3:
        verdict.add('quasisymmetry', INCONCLUSIVE, None, thresholds.envelope_cap, 'missing boundary pairs')
    else:
        src = boundary_inner_distances(graphG, m.boundary_pairs[:, 0, :])
        images = m.boundary_pairs[:, 1, :]
        dst = np.hypot(images[:, None, 0] - images[None, :, 0], images[:, None, 1] - images[None, :, 1])
        _envelope_check(verdict, 'quasisymmetry', qs_envelope(src, dst, triples, seed, bins), thresholds.envelope_cap)

    logger.debug('Property B: %s', verdict.overall)
    return verdict


def property_a_verdict(graph, base, tau, anchors, thresholds=None, quadruples=2000, seed=0, triples=2000,
                       bins=60, approach_depth=4):
    """
    Checks Property A: the quasihyperbolic metric is Gromov hyperbolic, and
    the visual metametric on boundary anchors is quasisymmetrically
    equivalent to the inner metric on the same anchors.

    :returns: :py:class:`PropertyVerdict`

    :raises: :py:class:`~qhgeo.util.TooFewPointsError`, :py:class:`~qhgeo.util.PreconditionError`
    """
    thresholds = thresholds if thresholds is not None else Thresholds()
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    if len(anchors) < 4:
        raise TooFewPointsError('Need at least 4 anchors, got {0}'.format(len(anchors)))

    table = visual_table(graph, base, tau, anchors, approach_depth, thresholds.tau_cap)
    verdict = PropertyVerdict(PROPERTY_A)

    delta = estimate_delta(graph, quadruples, seed)
    verdict.add('hyperbolicity', _limit_status(delta.delta_hat, thresholds.delta), delta.delta_hat, thresholds.delta)

    sigma = boundary_inner_distances(graph, anchors, approach_depth)
    _envelope_check(verdict, 'natural_map', qs_envelope(table.rho, sigma, triples, seed, bins),
                    thresholds.envelope_cap)

    logger.debug('Property A: %s', verdict.overall)
    return verdict
