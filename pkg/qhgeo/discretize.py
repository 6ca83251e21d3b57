"""
Boundary-adapted grid graphs over planar domains.

:py:class:`GraphBuilder` refines a dyadic quadtree over the domain's bounding
box until every retained cell is small compared to its distance from the
boundary, then joins the cell centers with stencil edges whose segments stay
inside the domain.  The result is an immutable :py:class:`MetricGraph`
carrying Euclidean and quasihyperbolic edge lengths.

.. moduleauthor:: qhgeo developers
"""

import io
import json
import logging
import math
import threading

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .event import event
from .util import (GraphBuildError, NodeBudgetError, DisconnectedGraphError,
                   PreconditionError)
from .variants import STENCILS, KING8

logger = logging.getLogger(__name__)

GRAPH_SCHEMA = 'qhgeo.graph/1'
"""Schema tag written to graph dumps."""

_LEVEL_SHIFT = 56
_INDEX_SHIFT = 28
_INDEX_LIMIT = 1 << _INDEX_SHIFT


class GridParams(object):
    """
    Discretization parameters.
    """

    h_coarse = 0.05
    """Side of the coarsest grid cells."""
    whitney_c = 0.5
    """Cap on cell side as a fraction of the cell's boundary distance, in (0, 1]."""
    max_nodes = 200000
    """Largest number of nodes a build may retain."""
    neighbor_stencil = KING8
    """Neighbor stencil: axis4, king8 or knight16."""
    max_depth = 6
    """Number of dyadic refinements below the coarse grid."""
    orphan_fraction = 0.001
    """Largest share of nodes that may be dropped as isolated specks."""

    def __init__(self, h_coarse=None, whitney_c=None, max_nodes=None, neighbor_stencil=None,
                 max_depth=None, orphan_fraction=None):
        """
        Constructor

        :param h_coarse: coarse grid spacing, positive
        :type h_coarse: float
        :param whitney_c: Whitney cap in (0, 1]
        :type whitney_c: float
        :param max_nodes: node budget, at least 2
        :type max_nodes: int
        :param neighbor_stencil: stencil name
        :type neighbor_stencil: string
        :param max_depth: refinement depth, 0 to 20
        :type max_depth: int
        :param orphan_fraction: tolerated share of discarded nodes, in [0, 1)
        :type orphan_fraction: float

        :raises: :py:class:`~qhgeo.util.PreconditionError`
        """
        if h_coarse is not None:
            self.h_coarse = float(h_coarse)
        if whitney_c is not None:
            self.whitney_c = float(whitney_c)
        if max_nodes is not None:
            self.max_nodes = int(max_nodes)
        if neighbor_stencil is not None:
            self.neighbor_stencil = neighbor_stencil
        if max_depth is not None:
            self.max_depth = int(max_depth)
        if orphan_fraction is not None:
            self.orphan_fraction = float(orphan_fraction)

        self.validate()

    def __repr__(self):
        return 'GridParams({0})'.format(self.dict())

    def __eq__(self, other):
        return isinstance(other, GridParams) and self.dict() == other.dict()

    def validate(self):
        """
        Checks every parameter against its range.

        :raises: :py:class:`~qhgeo.util.PreconditionError`
        """
        if not (math.isfinite(self.h_coarse) and self.h_coarse > 0):
            raise PreconditionError('h_coarse must be positive: {0}'.format(self.h_coarse))
        if not (0 < self.whitney_c <= 1):
            raise PreconditionError('whitney_c must lie in (0, 1]: {0}'.format(self.whitney_c))
        if self.max_nodes < 2:
            raise PreconditionError('max_nodes must be at least 2: {0}'.format(self.max_nodes))
        if self.neighbor_stencil not in STENCILS:
            raise PreconditionError('Unknown stencil: {0}'.format(self.neighbor_stencil))
        if not (0 <= self.max_depth <= 20):
            raise PreconditionError('max_depth must lie in [0, 20]: {0}'.format(self.max_depth))
        if not (0 <= self.orphan_fraction < 1):
            raise PreconditionError('orphan_fraction must lie in [0, 1): {0}'.format(self.orphan_fraction))

    def replace(self, **kwargs):
        """
        Copy with some parameters overridden.
        """
        values = self.dict()
        values.update(kwargs)
        return GridParams(**values)

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            h_coarse            = self.h_coarse,
            whitney_c           = self.whitney_c,
            max_nodes           = self.max_nodes,
            neighbor_stencil    = self.neighbor_stencil,
            max_depth           = self.max_depth,
            orphan_fraction     = self.orphan_fraction,
            **kwargs
        )


def _frozen(array):
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


class MetricGraph(object):
    """
    Immutable weighted graph over domain sample points.  Nodes are ordered by
    refinement level, then by cell index.  Adjacency is stored once in CSR
    form with parallel Euclidean and quasihyperbolic weight columns.
    """

    def __init__(self, spec, params, points, delta, spacing, levels, u, v):
        """
        Constructor

        :param spec: originating domain
        :type spec: :py:class:`~qhgeo.domains.Domain`
        :param params: build parameters
        :type params: :py:class:`GridParams`
        :param points: node coordinates
        :type points: array of shape (N, 2)
        :param delta: per-node boundary distance
        :type delta: array of shape (N,)
        :param spacing: per-node cell side
        :type spacing: array of shape (N,)
        :param levels: per-node refinement level
        :type levels: array of shape (N,)
        :param u: edge tails, u < v
        :type u: int array
        :param v: edge heads
        :type v: int array
        """
        self.spec = spec
        self.params = params
        self.points = _frozen(np.asarray(points, dtype=float))
        self.delta = _frozen(np.asarray(delta, dtype=float))
        self.spacing = _frozen(np.asarray(spacing, dtype=float))
        self.levels = _frozen(np.asarray(levels, dtype=np.int64))

        n = len(self.points)
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        self.edges = _frozen(np.column_stack((u, v)) if len(u) else np.zeros((0, 2), dtype=np.int64))

        rows = np.concatenate((u, v))
        cols = np.concatenate((v, u))
        order = np.lexsort((cols, rows))
        rows = rows[order]
        cols = cols[order]

        euclid = np.hypot(*(self.points[rows] - self.points[cols]).T)
        qh = euclid * 0.5 * (1.0 / self.delta[rows] + 1.0 / self.delta[cols])

        self.indptr = _frozen(np.concatenate(([0], np.cumsum(np.bincount(rows, minlength=n)))))
        self.rows = _frozen(rows)
        self.indices = _frozen(cols)
        self.euclid = _frozen(euclid)
        self.qh = _frozen(qh)

        self._matrices = {}
        self._tree = None
        self._lock = threading.Lock()

    def __repr__(self):
        return 'MetricGraph(spec={0!r}, nodes={1}, edges={2})'.format(self.spec, self.node_count, self.edge_count)

    @property
    def node_count(self):
        return len(self.points)

    @property
    def edge_count(self):
        return len(self.edges)

    @property
    def max_edge_qh(self):
        """
        Largest quasihyperbolic length of a single edge.
        """
        return float(self.qh.max()) if len(self.qh) else 0.0

    @property
    def tree(self):
        """
        KD-tree over node coordinates.
        """
        with self._lock:
            if self._tree is None:
                self._tree = cKDTree(self.points)
        return self._tree

    def weights(self, weight):
        """
        CSR-ordered weight column, ``'euclid'`` or ``'qh'``.
        """
        if weight == 'euclid':
            return self.euclid
        if weight == 'qh':
            return self.qh

        raise PreconditionError('Unknown weight: {0}'.format(weight))

    def matrix(self, weight):
        """
        Sparse adjacency matrix for a weight column, built once.

        :param weight: ``'euclid'`` or ``'qh'``
        :type weight: string

        :returns: :py:class:`scipy.sparse.csr_matrix`
        """
        with self._lock:
            if weight not in self._matrices:
                n = self.node_count
                self._matrices[weight] = csr_matrix((self.weights(weight), self.indices, self.indptr), shape=(n, n))
            return self._matrices[weight]

    def neighbors(self, node):
        """
        Neighbor ids of a node, ascending.
        """
        return self.indices[self.indptr[node]:self.indptr[node + 1]]

    def edge_slice(self, node):
        """
        CSR slice holding the node's outgoing entries.
        """
        return slice(self.indptr[node], self.indptr[node + 1])

    def dict(self, **kwargs):
        """
        Dictionary representation, as written by :py:meth:`dump`.
        """
        return dict(
            schema      = GRAPH_SCHEMA,
            domain      = self.spec.dict(),
            params      = self.params.dict(),
            nodes       = [[float(p[0]), float(p[1]), float(d)] for p, d in zip(self.points, self.delta)],
            edges       = [[int(a), int(b)] for a, b in self.edges],
            **kwargs
        )

    def dump(self, path):
        """
        Writes the graph as JSON: node coordinates with boundary distance
        (``[x, y, delta]``) and the undirected edge list.

        :param path: output file
        :type path: string
        """
        with io.open(path, 'w', encoding='utf-8') as f:
            json.dump(self.dict(), f, indent=2)
            f.write(u'\n')


class GraphBuilder(object):
    """
    Builds a :py:class:`MetricGraph` level by level.
    """

    on_level = event.Event("This event is called after each refinement level.\n\n**Callback definition:** *def callback(builder, level, cells, leaves)*")
    on_built = event.Event("This event is called when the graph is complete.\n\n**Callback definition:** *def callback(builder, graph)*")

    def __init__(self, spec, params=None):
        """
        Constructor

        :param spec: domain to discretize
        :type spec: :py:class:`~qhgeo.domains.Domain`
        :param params: grid parameters
        :type params: :py:class:`GridParams`
        """
        self.spec = spec
        self.params = params if params is not None else GridParams()
        self.params.validate()

    def build(self):
        """
        Runs the refinement and edge construction.

        :returns: :py:class:`MetricGraph`

        :raises: :py:class:`~qhgeo.util.NodeBudgetError`, :py:class:`~qhgeo.util.DisconnectedGraphError`
        """
        origin, nx, ny = self._coarse_grid()
        levels, ii, jj, centers, delta = self._refine(origin, nx, ny)

        if len(levels) < 2:
            raise DisconnectedGraphError('Retained {0} node(s); h_coarse {1} is too coarse or max_depth {2} too shallow'
                                         .format(len(levels), self.params.h_coarse, self.params.max_depth))

        u, v = self._edges(levels, ii, jj, centers, delta)
        keep, u, v = self._largest_component(len(levels), u, v)

        graph = MetricGraph(self.spec, self.params, centers[keep], delta[keep],
                            self.params.h_coarse / (2.0 ** levels[keep]), levels[keep], u, v)

        logger.debug('Built %d nodes, %d edges for %r', graph.node_count, graph.edge_count, self.spec)
        self.on_built(graph=graph)

        return graph

    def _coarse_grid(self):
        xmin, ymin, xmax, ymax = self.spec.bounds
        h = self.params.h_coarse
        nx = max(1, int(math.ceil((xmax - xmin) / h)))
        ny = max(1, int(math.ceil((ymax - ymin) / h)))

        if (max(nx, ny) + 2) * 2 ** self.params.max_depth >= _INDEX_LIMIT:
            raise NodeBudgetError('Grid of {0}x{1} cells at depth {2} is too large'.format(nx, ny, self.params.max_depth))

        # Center the grid on the bounding box.
        origin = np.array([0.5 * (xmin + xmax) - 0.5 * nx * h, 0.5 * (ymin + ymax) - 0.5 * ny * h])
        return origin, nx, ny

    def _refine(self, origin, nx, ny):
        p = self.params
        ii, jj = np.meshgrid(np.arange(nx, dtype=np.int64), np.arange(ny, dtype=np.int64), indexing='ij')
        ii = ii.ravel()
        jj = jj.ravel()

        out_levels, out_i, out_j, out_centers, out_delta = [], [], [], [], []
        total = 0

        for level in range(p.max_depth + 1):
            if len(ii) == 0:
                break

            side = p.h_coarse / 2.0 ** level
            half_diag = side * math.sqrt(2.0) / 2.0
            centers = origin + side * (np.column_stack((ii, jj)) + 0.5)

            inside = self.spec.contains_many(centers)
            gap = self.spec.boundary_gap_many(centers)

            leaf = inside & (side <= p.whitney_c * (gap - half_diag))
            split = ~leaf & (inside | (gap <= half_diag)) & (level < p.max_depth)

            count = int(np.count_nonzero(leaf))
            total += count
            if total > p.max_nodes:
                raise NodeBudgetError('Refinement passed the node budget of {0} at level {1}'.format(p.max_nodes, level))

            out_levels.append(np.full(count, level, dtype=np.int64))
            out_i.append(ii[leaf])
            out_j.append(jj[leaf])
            out_centers.append(centers[leaf])
            out_delta.append(gap[leaf])

            self.on_level(level=level, cells=len(ii), leaves=count)
            logger.debug('Level %d: %d cells, %d leaves, %d split', level, len(ii), count, np.count_nonzero(split))

            ii = ii[split]
            jj = jj[split]
            ii = np.repeat(2 * ii, 4) + np.tile([0, 0, 1, 1], len(ii))
            jj = np.repeat(2 * jj, 4) + np.tile([0, 1, 0, 1], len(jj))

        levels = np.concatenate(out_levels) if out_levels else np.zeros(0, dtype=np.int64)
        if len(levels) == 0:
            return levels, levels, levels, np.zeros((0, 2)), np.zeros(0)

        ii = np.concatenate(out_i)
        jj = np.concatenate(out_j)
        centers = np.vstack(out_centers)
        delta = np.concatenate(out_delta)

        order = np.argsort(_codes(levels, ii, jj), kind='stable')
        return levels[order], ii[order], jj[order], centers[order], delta[order]

    def _edges(self, levels, ii, jj, centers, delta):
        codes = _codes(levels, ii, jj)
        n = len(codes)
        nodes = np.arange(n, dtype=np.int64)
        tails, heads = [], []

        for di, dj in STENCILS[self.params.neighbor_stencil]:
            ti = ii + di
            tj = jj + dj
            valid = (ti >= 0) & (tj >= 0)

            for shift in range(int(levels.max()) + 1):
                mask = valid & (levels >= shift)
                if not np.any(mask):
                    break

                query = _codes(levels[mask] - shift, ti[mask] >> shift, tj[mask] >> shift)
                pos = np.minimum(np.searchsorted(codes, query), n - 1)
                hit = codes[pos] == query

                tails.append(nodes[mask][hit])
                heads.append(pos[hit])

        if not tails:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)

        u = np.concatenate(tails)
        v = np.concatenate(heads)
        u, v = np.minimum(u, v), np.maximum(u, v)
        distinct = u != v
        pairs = np.unique(u[distinct] * n + v[distinct])
        u = pairs // n
        v = pairs % n

        length = np.hypot(*(centers[u] - centers[v]).T)
        clear = length < np.maximum(delta[u], delta[v])
        pending = np.flatnonzero(~clear)
        if len(pending):
            clear[pending] = self.spec.segments_clear(centers[u[pending]], centers[v[pending]])

        logger.debug('Edges: %d candidates, %d rejected by clearance', len(u), np.count_nonzero(~clear))
        return u[clear], v[clear]

    def _largest_component(self, n, u, v):
        adjacency = csr_matrix((np.ones(len(u)), (u, v)), shape=(n, n))
        count, labels = connected_components(adjacency, directed=False)

        if count == 1:
            return np.arange(n), u, v

        sizes = np.bincount(labels)
        largest = int(np.argmax(sizes))
        dropped = n - int(sizes[largest])

        if dropped > self.params.orphan_fraction * n:
            raise DisconnectedGraphError('Retained nodes split into {0} components ({1} of {2} nodes outside the largest); '
                                         'reduce h_coarse or raise max_depth'.format(count, dropped, n))

        logger.debug('Dropping %d isolated nodes in %d components', dropped, count - 1)

        keep = np.flatnonzero(labels == largest)
        renumber = np.full(n, -1, dtype=np.int64)
        renumber[keep] = np.arange(len(keep))
        inside = (labels[u] == largest)

        return keep, renumber[u[inside]], renumber[v[inside]]


def _codes(levels, ii, jj):
    return (np.asarray(levels, dtype=np.int64) << _LEVEL_SHIFT) | (np.asarray(ii, dtype=np.int64) << _INDEX_SHIFT) | np.asarray(jj, dtype=np.int64)


def build_graph(spec, params=None):
    """
    Builds the metric graph of a domain.

    :param spec: domain
    :type spec: :py:class:`~qhgeo.domains.Domain`
    :param params: grid parameters
    :type params: :py:class:`GridParams`

    :returns: :py:class:`MetricGraph`

    :raises: :py:class:`~qhgeo.util.GraphBuildError`
    """
    return GraphBuilder(spec, params).build()


def refine(graph, factor):
    """
    Rebuilds a graph with the coarse spacing divided by factor.

    :param graph: graph to refine
    :type graph: :py:class:`MetricGraph`
    :param factor: refinement factor, greater than 1
    :type factor: float

    :returns: :py:class:`MetricGraph`

    :raises: :py:class:`~qhgeo.util.PreconditionError`
    """
    if not factor > 1:
        raise PreconditionError('Refinement factor must exceed 1: {0}'.format(factor))

    params = graph.params.replace(h_coarse=graph.params.h_coarse / float(factor))
    refined = build_graph(graph.spec, params)

    if refined.node_count <= graph.node_count:
        raise GraphBuildError('Refinement by {0} did not add nodes ({1} -> {2})'
                              .format(factor, graph.node_count, refined.node_count))

    return refined
