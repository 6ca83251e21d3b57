"""
Shortest-path engine over :py:class:`~qhgeo.discretize.MetricGraph`: inner
distance, quasihyperbolic distance, conformally deformed distance and
geodesic extraction.

Continuum query points are attached to the graph as virtual nodes joined to
every node within 1.5 local cells whose connecting segment stays inside the
domain.

.. moduleauthor:: qhgeo developers
"""

import collections
import logging
import math
import threading
import weakref

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .event import event
from .util import (PointOutsideDomainError, PreconditionError, UnreachableNodeError,
                   EmptyPathError, as_point)
from .variants import INNER, QUASIHYPERBOLIC, DEFORMED, METRIC_ALIASES, WEIGHTS

logger = logging.getLogger(__name__)

SNAP_CELLS = 1.5
"""Attachment radius in local cell sides."""

TIE_TOLERANCE = 1e-10
"""Relative slack under which two path lengths count as equal."""

_TINY = np.finfo(float).tiny


def resolve_metric(metric):
    """
    Normalizes a metric name (``qh`` is accepted for quasihyperbolic).

    :raises: :py:class:`~qhgeo.util.PreconditionError`
    """
    try:
        return METRIC_ALIASES[metric]
    except (KeyError, TypeError):
        raise PreconditionError('Unknown metric: {0}'.format(metric))


class DeformSpec(object):
    """
    Conformal deformation of the quasihyperbolic structure by the density
    ``exp(-epsilon * k(., base))``.
    """

    base = None
    """Base node id."""
    epsilon = None
    """Deformation strength, positive."""

    def __init__(self, base, epsilon):
        """
        Constructor

        :param base: base node id
        :type base: int
        :param epsilon: deformation strength
        :type epsilon: float

        :raises: :py:class:`~qhgeo.util.PreconditionError`
        """
        if not (isinstance(epsilon, (int, float, np.floating)) and math.isfinite(epsilon) and epsilon > 0):
            raise PreconditionError('epsilon must be positive: {0}'.format(epsilon))

        self.base = int(base)
        self.epsilon = float(epsilon)

    def __repr__(self):
        return 'DeformSpec(base={0}, epsilon={1})'.format(self.base, self.epsilon)

    @property
    def key(self):
        return (DEFORMED, self.base, self.epsilon)


class PathRecord(object):
    """
    A polygonal path with its per-node boundary distances and lengths under
    every metric.  Node ids are ``None`` for continuum endpoints that are not
    graph nodes.
    """

    metric = INNER
    """Metric the path was optimized for."""
    epsilon = None
    """Deformation strength for deformed paths."""
    base = None
    """Deformation base node for deformed paths."""

    def __init__(self, points, deltas, node_ids=None, metric=INNER, deform=None, base_distances=None):
        """
        Constructor

        :param points: path vertices
        :type points: array of shape (n, 2)
        :param deltas: boundary distance at each vertex
        :type deltas: array of shape (n,)
        :param node_ids: graph node ids (or None) per vertex
        :type node_ids: list
        :param metric: metric tag
        :type metric: string
        :param deform: deformation, for deformed paths
        :type deform: :py:class:`DeformSpec`
        :param base_distances: quasihyperbolic distance from the deformation base per vertex
        :type base_distances: array of shape (n,)

        :raises: :py:class:`~qhgeo.util.EmptyPathError`
        """
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.points.size == 0:
            raise EmptyPathError('Path has no nodes')

        self.deltas = np.asarray(deltas, dtype=float).reshape(-1)
        self.node_ids = list(node_ids) if node_ids is not None else [None] * len(self.points)
        self.metric = metric

        steps = np.diff(self.points, axis=0)
        self.segment_euclid = np.hypot(steps[:, 0], steps[:, 1])
        self.segment_qh = self.segment_euclid * 0.5 * (1.0 / self.deltas[:-1] + 1.0 / self.deltas[1:])

        self.euclid_chord = float(np.hypot(*(self.points[-1] - self.points[0])))
        self.inner_len = float(np.sum(self.segment_euclid))
        self.qh_len = float(np.sum(self.segment_qh))

        self.base_distances = None
        self.deformed_len = None
        if deform is not None:
            self.epsilon = deform.epsilon
            self.base = deform.base
            if base_distances is not None:
                self.base_distances = np.asarray(base_distances, dtype=float)
                decay = np.exp(-deform.epsilon * 0.5 * (self.base_distances[:-1] + self.base_distances[1:]))
                self.deformed_len = float(np.sum(self.segment_qh * decay))

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return 'PathRecord(metric={0}, nodes={1}, inner_len={2:.6g}, qh_len={3:.6g})'.format(
            self.metric, len(self), self.inner_len, self.qh_len)

    @property
    def length(self):
        """
        Length in the metric the path was optimized for.
        """
        if self.metric == INNER:
            return self.inner_len
        if self.metric == DEFORMED and self.deformed_len is not None:
            return self.deformed_len
        return self.qh_len

    def subpath(self, start, stop):
        """
        Vertices start..stop inclusive as a new record.
        """
        deform = DeformSpec(self.base, self.epsilon) if self.epsilon is not None else None
        base_distances = self.base_distances[start:stop + 1] if self.base_distances is not None else None
        return PathRecord(self.points[start:stop + 1], self.deltas[start:stop + 1], self.node_ids[start:stop + 1],
                          self.metric, deform, base_distances)

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            metric          = self.metric,
            epsilon         = self.epsilon,
            base            = self.base,
            nodes           = [None if n is None else int(n) for n in self.node_ids],
            points          = self.points.tolist(),
            deltas          = self.deltas.tolist(),
            euclid_chord    = self.euclid_chord,
            inner_len       = self.inner_len,
            qh_len          = self.qh_len,
            deformed_len    = self.deformed_len,
            **kwargs
        )


class Attachment(object):
    """
    A continuum point joined to nearby graph nodes.
    """

    def __init__(self, point, delta, nodes, euclid):
        self.point = point
        self.delta = delta
        self.nodes = nodes
        self.euclid = euclid
        self.radius = 0.0

    def qh(self, graph):
        return self.euclid * 0.5 * (1.0 / self.delta + 1.0 / graph.delta[self.nodes])


class MetricEngine(object):
    """
    Per-graph distance machinery with a bounded cache of single-source tables.
    Tables are computed once and published read-only.
    """

    on_table = event.Event("This event is called when distance tables are computed.\n\n**Callback definition:** *def callback(engine, weight, sources)*")

    cache_bytes = 256 * 1024 * 1024
    """Memory budget of the cached single-source tables, in bytes."""

    def __init__(self, graph):
        """
        Constructor

        :param graph: graph to query
        :type graph: :py:class:`~qhgeo.discretize.MetricGraph`
        """
        self.graph = graph
        self._tables = collections.OrderedDict()
        self._cached = 0
        self._columns = {}
        self._lock = threading.Lock()

    def column(self, key):
        """
        CSR-ordered edge weights for ``'euclid'``, ``'qh'`` or a
        :py:attr:`DeformSpec.key`.
        """
        if key in ('euclid', 'qh'):
            return self.graph.weights(key)

        with self._lock:
            if key in self._columns:
                return self._columns[key]

        _, base, epsilon = key
        k = self.table('qh', base)
        g = self.graph
        data = g.qh * np.exp(-epsilon * 0.5 * (k[g.rows] + k[g.indices]))
        data.setflags(write=False)

        with self._lock:
            self._columns[key] = data

        return data

    def _matrix(self, key):
        if key in ('euclid', 'qh'):
            return self.graph.matrix(key)

        n = self.graph.node_count
        return coo_matrix((self.column(key), (self.graph.rows, self.graph.indices)), shape=(n, n)).tocsr()

    def tables(self, key, sources):
        """
        Single-source distance tables, computing the missing ones in one batch.

        :param key: weight key
        :param sources: node ids
        :type sources: sequence of int

        :returns: array of shape (len(sources), N)
        """
        sources = [int(s) for s in sources]
        found = {}
        with self._lock:
            for s in sources:
                if (key, s) in self._tables:
                    found[s] = self._tables[(key, s)]
                    self._tables.move_to_end((key, s))

        missing = sorted(set(sources) - set(found))
        if missing:
            computed = np.atleast_2d(dijkstra(self._matrix(key), directed=True, indices=missing))
            computed.setflags(write=False)

            with self._lock:
                for s, row in zip(missing, computed):
                    found[s] = row
                    if (key, s) not in self._tables:
                        self._cached += row.nbytes
                    self._tables[(key, s)] = row
                while self._tables and self._cached > self.cache_bytes:
                    _, old = self._tables.popitem(last=False)
                    self._cached -= old.nbytes

            logger.debug('Computed %d %s tables', len(missing), key)
            self.on_table(weight=key, sources=missing)

        if not sources:
            return np.zeros((0, self.graph.node_count))

        return np.vstack([found[s] for s in sources])

    @property
    def cached_bytes(self):
        """
        Memory held by the cached tables, in bytes.
        """
        return self._cached

    def table(self, key, source):
        """
        Distance table from one node.
        """
        return self.tables(key, [source])[0]

    def attach(self, p):
        """
        Attaches a continuum point to the graph.

        :param p: point inside the domain
        :type p: sequence of two floats

        :returns: :py:class:`Attachment`

        :raises: :py:class:`~qhgeo.util.PointOutsideDomainError`
        """
        g = self.graph
        p = as_point(p)
        delta = g.spec.boundary_distance(p)

        dist, nearest = g.tree.query(p)
        radius = SNAP_CELLS * g.spacing[nearest]
        if dist > radius:
            raise PointOutsideDomainError('Point {0} is not resolved by the graph (nearest node at {1:.3g})'
                                          .format(tuple(p), dist))

        nodes = np.array(sorted(g.tree.query_ball_point(p, radius)), dtype=np.int64)
        euclid = np.hypot(*(g.points[nodes] - p).T)
        clear = euclid < np.maximum(delta, g.delta[nodes])
        pending = np.flatnonzero(~clear)
        if len(pending):
            clear[pending] = g.spec.segments_clear(np.repeat(p[None, :], len(pending), axis=0), g.points[nodes[pending]])

        if not np.any(clear):
            raise PointOutsideDomainError('Point {0} has no visible graph node'.format(tuple(p)))

        att = Attachment(p, delta, nodes[clear], np.maximum(euclid[clear], _TINY))
        att.radius = radius
        return att

    def snap(self, points):
        """
        Nearest visible node within the attachment radius for each point, or -1.

        :param points: continuum points
        :type points: array of shape (n, 2)

        :returns: int array of shape (n,)
        """
        g = self.graph
        points = np.atleast_2d(np.asarray(points, dtype=float))
        dist, nearest = g.tree.query(points)
        ok = g.spec.contains_many(points) & (dist <= SNAP_CELLS * g.spacing[nearest])

        far = ok & (dist >= np.maximum(g.spec.boundary_gap_many(points), g.delta[nearest]))
        idx = np.flatnonzero(far)
        if len(idx):
            ok[idx] = g.spec.segments_clear(points[idx], g.points[nearest[idx]])

        return np.where(ok, nearest, -1)

    def _base_distance(self, att, deform):
        k = self.table('qh', deform.base)
        return float(np.min(k[att.nodes] + att.qh(self.graph)))

    def _attachment_weights(self, att, key, deform):
        if key == 'euclid':
            return att.euclid

        qh = att.qh(self.graph)
        if deform is None:
            return qh

        k = self.table('qh', deform.base)
        kx = self._base_distance(att, deform)
        return qh * np.exp(-deform.epsilon * 0.5 * (kx + k[att.nodes]))

    def _direct_weight(self, ax, ay, key, deform):
        g = self.graph
        d = float(np.hypot(*(ax.point - ay.point)))
        if d > max(ax.radius, ay.radius):
            return None

        if not (d < max(ax.delta, ay.delta) or g.spec.segments_clear(ax.point[None, :], ay.point[None, :])[0]):
            return None

        if key == 'euclid':
            return max(d, _TINY)

        w = d * 0.5 * (1.0 / ax.delta + 1.0 / ay.delta)
        if deform is not None:
            w *= math.exp(-deform.epsilon * 0.5 * (self._base_distance(ax, deform) + self._base_distance(ay, deform)))

        return max(w, _TINY)

    def solve(self, x, y, metric, deform=None, walk=False):
        """
        Distance between two continuum points, optionally with the geodesic.

        :returns: tuple (distance, :py:class:`PathRecord` or None)

        :raises: :py:class:`~qhgeo.util.PointOutsideDomainError`, :py:class:`~qhgeo.util.UnreachableNodeError`
        """
        metric = resolve_metric(metric)
        if metric == DEFORMED:
            if deform is None:
                raise PreconditionError('Deformed metric needs a DeformSpec')
            key = deform.key
        else:
            key = WEIGHTS[metric]
            deform = None

        ax = self.attach(x)
        ay = self.attach(y)

        if np.array_equal(ax.point, ay.point):
            path = None
            if walk:
                base = [self._base_distance(ax, deform)] if deform is not None else None
                path = PathRecord(ax.point[None, :], [ax.delta], [None], metric, deform, base)
            return 0.0, path

        g = self.graph
        n = g.node_count
        data = self.column(key)
        wx = self._attachment_weights(ax, key, deform)
        wy = self._attachment_weights(ay, key, deform)
        direct = self._direct_weight(ax, ay, key, deform)

        rows = [g.rows, np.full(len(ax.nodes), n), ax.nodes, np.full(len(ay.nodes), n + 1), ay.nodes]
        cols = [g.indices, ax.nodes, np.full(len(ax.nodes), n), ay.nodes, np.full(len(ay.nodes), n + 1)]
        vals = [data, wx, wx, wy, wy]
        if direct is not None:
            rows.append(np.array([n, n + 1]))
            cols.append(np.array([n + 1, n]))
            vals.append(np.array([direct, direct]))

        mat = coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n + 2, n + 2)).tocsr()
        mat.sum_duplicates()

        sources = [n, n + 1] if walk else [n]
        dist = np.atleast_2d(dijkstra(mat, directed=True, indices=sources))
        total = float(dist[0, n + 1])

        if not math.isfinite(total):
            raise UnreachableNodeError('No path between {0} and {1}'.format(tuple(ax.point), tuple(ay.point)))

        if not walk:
            return total, None

        order = _walk(mat.indptr, mat.indices, mat.data, dist[0], dist[1], n, n + 1, total)

        points = np.vstack([ax.point if v == n else ay.point if v == n + 1 else g.points[v] for v in order])
        deltas = [ax.delta if v == n else ay.delta if v == n + 1 else g.delta[v] for v in order]
        ids = [None if v >= n else int(v) for v in order]

        base = None
        if deform is not None:
            k = self.table('qh', deform.base)
            kx = self._base_distance(ax, deform)
            ky = self._base_distance(ay, deform)
            base = [kx if v == n else ky if v == n + 1 else k[v] for v in order]

        return total, PathRecord(points, deltas, ids, metric, deform, base)

    def node_geodesic(self, a, b, metric=QUASIHYPERBOLIC, deform=None):
        """
        Geodesic between two graph nodes from cached tables.

        :returns: :py:class:`PathRecord`
        """
        metric = resolve_metric(metric)
        key = deform.key if metric == DEFORMED else WEIGHTS[metric]
        g = self.graph

        if a == b:
            base = [self.table('qh', deform.base)[a]] if metric == DEFORMED else None
            return PathRecord(g.points[a][None, :], [g.delta[a]], [int(a)], metric, deform, base)

        da, db = self.tables(key, [a, b])
        total = float(da[b])
        if not math.isfinite(total):
            raise UnreachableNodeError('No path between nodes {0} and {1}'.format(a, b))

        order = _walk(g.indptr, g.indices, self.column(key), da, db, a, b, total)

        base = None
        if metric == DEFORMED:
            base = self.table('qh', deform.base)[order]
        return PathRecord(g.points[order], g.delta[order], [int(v) for v in order], metric, deform, base)

    def path_record(self, nodes, metric=INNER):
        """
        Record of an explicit node sequence; consecutive nodes must be adjacent.

        :raises: :py:class:`~qhgeo.util.EmptyPathError`, :py:class:`~qhgeo.util.PreconditionError`
        """
        nodes = [int(v) for v in nodes]
        if not nodes:
            raise EmptyPathError('Path has no nodes')

        g = self.graph
        for a, b in zip(nodes, nodes[1:]):
            if b not in g.neighbors(a):
                raise PreconditionError('Nodes {0} and {1} are not adjacent'.format(a, b))

        return PathRecord(g.points[nodes], g.delta[nodes], nodes, resolve_metric(metric))


def _walk(indptr, indices, data, dist_from, dist_to, source, target, total):
    """
    Walks the lexicographically smallest shortest path: at each step the
    smallest-id neighbor that stays on a shortest path.
    """
    slack_tol = TIE_TOLERANCE * max(total, 1e-300)
    order = [int(source)]
    current = int(source)
    limit = len(dist_from)

    while current != target:
        lo, hi = indptr[current], indptr[current + 1]
        nbrs = indices[lo:hi]
        weights = data[lo:hi]

        slack = dist_from[current] + weights + dist_to[nbrs] - total
        closer = dist_to[nbrs] < dist_to[current]
        good = np.flatnonzero(closer & (np.abs(slack) <= slack_tol))

        if len(good):
            step = int(nbrs[good[np.argmin(nbrs[good])]])
        else:
            candidates = np.flatnonzero(closer)
            if not len(candidates):
                raise UnreachableNodeError('Geodesic walk stalled at node {0}'.format(current))
            step = int(nbrs[candidates[np.argmin(np.abs(slack[candidates]))]])

        order.append(step)
        current = step
        if len(order) > limit:
            raise UnreachableNodeError('Geodesic walk did not terminate')

    return order


_engines = weakref.WeakKeyDictionary()
_engines_lock = threading.Lock()


def engine_for(graph):
    """
    The shared :py:class:`MetricEngine` of a graph.
    """
    with _engines_lock:
        engine = _engines.get(graph)
        if engine is None:
            engine = _engines[graph] = MetricEngine(graph)
    return engine


def inner_distance(graph, x, y):
    """
    Inner (intrinsic Euclidean path) distance between two points.

    :param graph: metric graph
    :type graph: :py:class:`~qhgeo.discretize.MetricGraph`
    :param x: first point
    :type x: sequence of two floats
    :param y: second point
    :type y: sequence of two floats

    :returns: float

    :raises: :py:class:`~qhgeo.util.PointOutsideDomainError`
    """
    return engine_for(graph).solve(x, y, INNER)[0]


def quasihyperbolic_distance(graph, x, y):
    """
    Quasihyperbolic distance between two points.

    :returns: float

    :raises: :py:class:`~qhgeo.util.PointOutsideDomainError`
    """
    return engine_for(graph).solve(x, y, QUASIHYPERBOLIC)[0]


def deformed_distance(graph, deform, x, y):
    """
    Distance in the quasihyperbolic structure deformed by the density
    ``exp(-epsilon * k(., base))``.

    :param deform: deformation
    :type deform: :py:class:`DeformSpec`

    :returns: float
    """
    if not isinstance(deform, DeformSpec):
        raise PreconditionError('Expected a DeformSpec: {0!r}'.format(deform))
    return engine_for(graph).solve(x, y, DEFORMED, deform)[0]


def geodesic(graph, x, y, metric=INNER, deform=None):
    """
    Shortest path between two points in the given metric.  Among equal-length
    paths the one with the lexicographically smallest node sequence is taken.

    :param metric: ``inner``, ``quasihyperbolic`` (or ``qh``) or ``deformed``
    :type metric: string
    :param deform: deformation, required for the deformed metric
    :type deform: :py:class:`DeformSpec`

    :returns: :py:class:`PathRecord`
    """
    return engine_for(graph).solve(x, y, metric, deform, walk=True)[1]


def node_geodesic(graph, a, b, metric=QUASIHYPERBOLIC, deform=None):
    """
    Shortest path between two graph nodes.

    :returns: :py:class:`PathRecord`
    """
    return engine_for(graph).node_geodesic(a, b, metric, deform)


def quasigeodesic_ratio(graph, path):
    """
    Ratio of a path's quasihyperbolic length to the quasihyperbolic distance
    of its endpoints; a path is a lambda-quasigeodesic when this is at most lambda.

    :returns: float
    """
    if path.qh_len == 0.0:
        return 1.0

    k = quasihyperbolic_distance(graph, path.points[0], path.points[-1])
    if k == 0.0:
        return math.inf

    return path.qh_len / k
