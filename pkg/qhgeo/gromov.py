"""
Gromov products, four-point hyperbolicity estimates, visual metametrics on
boundary anchors and rough-starlikeness probes, all in the quasihyperbolic
metric of a discretized domain.

.. moduleauthor:: qhgeo developers
"""

import logging
import math

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .discretize import MetricGraph
from .metrics import engine_for, quasihyperbolic_distance
from .util import AnchorApproachError, PreconditionError, TooFewPointsError, make_rng

logger = logging.getLogger(__name__)

DEFAULT_TAU = 0.2
"""Visual parameter used when none is given."""

DEFAULT_POOL = 64
"""Number of seeded points quadruples are drawn from."""

_BLOCK = 1024


class BasePoint(object):
    """
    The base node w0: the node farthest from the boundary.
    """

    def __init__(self, node, delta_sigma, point):
        self.node = int(node)
        self.delta_sigma = float(delta_sigma)
        self.point = tuple(float(c) for c in point)

    def __repr__(self):
        return 'BasePoint({0})'.format(self.dict())

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            node            = self.node,
            point           = list(self.point),
            delta_sigma     = self.delta_sigma,
            **kwargs
        )


def choose_base_point(graph):
    """
    Picks the node maximizing the boundary distance; ties go to the smallest id.

    :param graph: metric graph
    :type graph: :py:class:`~qhgeo.discretize.MetricGraph`

    :returns: :py:class:`BasePoint`
    """
    node = int(np.argmax(graph.delta))
    return BasePoint(node, graph.delta[node], graph.points[node])


def product_from_distances(dxp, dyp, dxy):
    """
    ``(x|y)_p`` from the three pairwise distances.
    """
    return 0.5 * (dxp + dyp - dxy)


def gromov_product(graph, p, x, y):
    """
    Gromov product ``(x|y)_p`` in the quasihyperbolic metric.

    :param graph: metric graph
    :type graph: :py:class:`~qhgeo.discretize.MetricGraph`
    :param p: base point
    :param x: first point
    :param y: second point

    :returns: float
    """
    dxp = quasihyperbolic_distance(graph, x, p)
    dyp = quasihyperbolic_distance(graph, y, p)
    dxy = quasihyperbolic_distance(graph, x, y)
    return product_from_distances(dxp, dyp, dxy)


class DeltaEstimate(object):
    """
    Sampled four-point hyperbolicity constant.
    """

    def __init__(self, delta_hat, quadruple_count, worst_quadruple):
        self.delta_hat = float(delta_hat)
        self.quadruple_count = int(quadruple_count)
        self.worst_quadruple = worst_quadruple

    def __repr__(self):
        return 'DeltaEstimate({0})'.format(self.dict())

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            delta_hat           = self.delta_hat,
            quadruple_count     = self.quadruple_count,
            worst_quadruple     = None if self.worst_quadruple is None else [int(v) for v in self.worst_quadruple],
            **kwargs
        )


def _quadruples(rng, n, count):
    """
    Index quadruples drawn in fixed blocks, so a smaller count yields a prefix
    of a larger one.
    """
    blocks = []
    drawn = 0
    while drawn < count:
        blocks.append(rng.integers(0, n, size=(_BLOCK, 4)))
        drawn += _BLOCK
    return np.vstack(blocks)[:count]


def delta_from_matrix(D, quadruples, seed):
    """
    Four-point estimate on an explicit symmetric distance matrix.

    :returns: tuple (delta_hat, worst quadruple as matrix indices)
    """
    D = np.asarray(D, dtype=float)
    D = np.minimum(D, D.T)
    quads = _quadruples(make_rng(seed), len(D), quadruples)
    x, y, z, p = quads.T

    xy = product_from_distances(D[x, p], D[y, p], D[x, y])
    xz = product_from_distances(D[x, p], D[z, p], D[x, z])
    zy = product_from_distances(D[z, p], D[y, p], D[z, y])

    residual = np.minimum(xz, zy) - xy
    worst = int(np.argmax(residual))
    return max(0.0, float(residual[worst])), quads[worst]


def sample_nodes(graph, count, seed):
    """
    Seeded continuum points snapped to nodes; unresolved points are dropped.

    :returns: int array of node ids (may contain repeats)
    """
    points = graph.spec.sample_interior(count, make_rng(seed))
    nodes = engine_for(graph).snap(points)
    return nodes[nodes >= 0]


def estimate_delta(source, quadruples, seed, pool=DEFAULT_POOL):
    """
    Estimates the Gromov hyperbolicity constant from seeded quadruples
    ``(x, y, z, p)`` as the largest ``min{(x|z)_p, (z|y)_p} - (x|y)_p``,
    floored at 0.  The source is either a metric graph (quasihyperbolic
    distances between a seeded pool of nodes) or a distance matrix.

    :param source: graph or square distance matrix
    :type source: :py:class:`~qhgeo.discretize.MetricGraph` or array
    :param quadruples: number of quadruples, at least 1
    :type quadruples: int
    :param seed: random seed
    :type seed: int
    :param pool: number of seeded points in graph mode
    :type pool: int

    :returns: :py:class:`DeltaEstimate`
    """
    if quadruples < 1:
        raise PreconditionError('quadruples must be at least 1: {0}'.format(quadruples))

    if isinstance(source, MetricGraph):
        nodes = sample_nodes(source, pool, seed)
        if len(nodes) == 0:
            raise TooFewPointsError('No sampled point is resolved by the graph')
        D = engine_for(source).tables('qh', nodes)[:, nodes]
        delta_hat, worst = delta_from_matrix(D, quadruples, seed)
        worst = nodes[worst]
    else:
        D = np.asarray(source, dtype=float)
        if D.ndim != 2 or D.shape[0] != D.shape[1] or len(D) == 0:
            raise PreconditionError('Distance matrix must be square and nonempty')
        delta_hat, worst = delta_from_matrix(D, quadruples, seed)

    logger.debug('delta_hat %.6g over %d quadruples', delta_hat, quadruples)
    return DeltaEstimate(delta_hat, quadruples, worst)


class VisualTable(object):
    """
    Gromov products of boundary anchors seen from the base node, with the
    visual metametric ``rho = exp(-tau * product)``.
    """

    def __init__(self, tau, anchors, proxies, proxy_nodes, depths, products):
        self.tau = float(tau)
        self.anchors = np.asarray(anchors, dtype=float)
        self.proxies = np.asarray(proxies, dtype=float)
        self.proxy_nodes = np.asarray(proxy_nodes, dtype=np.int64)
        self.depths = np.asarray(depths, dtype=np.int64)
        self.products = np.asarray(products, dtype=float)
        self.rho = np.exp(-self.tau * self.products)

    def __repr__(self):
        return 'VisualTable(tau={0}, anchors={1})'.format(self.tau, len(self.anchors))

    def rows(self):
        """
        CSV rows: a header, then one row per anchor with its coordinates
        followed by its rho row.
        """
        header = ['x', 'y'] + ['rho_{0}'.format(i) for i in range(len(self.anchors))]
        body = [[repr(float(a[0])), repr(float(a[1]))] + [repr(float(r)) for r in row]
                for a, row in zip(self.anchors, self.rho)]
        return [header] + body

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            tau         = self.tau,
            anchors     = self.anchors.tolist(),
            proxies     = self.proxies.tolist(),
            depths      = self.depths.tolist(),
            products    = self.products.tolist(),
            rho         = self.rho.tolist(),
            **kwargs
        )


def approach_anchor(graph, base, anchor, approach_depth):
    """
    Walks in from a boundary anchor along the inward normal at dyadic depths
    ``t0 * 2**-j`` (``t0`` half the base node's boundary distance) and returns
    the deepest proxy resolved by the graph.  On a slit both sides are tried
    and the side resolving more proxies wins.

    :returns: tuple (proxy point, node id, depth index)

    :raises: :py:class:`~qhgeo.util.AnchorApproachError`
    """
    spec = graph.spec
    engine = engine_for(graph)
    anchor = np.asarray(anchor, dtype=float)
    foot = spec.nearest_boundary_point(anchor[None, :])[0]
    normal = spec.inward_normals(anchor[None, :])[0]
    t0 = 0.5 * base.delta_sigma
    eps = 1e-9 * spec.diameter_bound

    best = None
    for sign in (1.0, -1.0):
        direction = sign * normal
        start = foot + eps * direction
        if not spec.contains(start):
            continue

        depths = t0 * 2.0 ** -np.arange(approach_depth)
        points = foot + depths[:, None] * direction
        inside = spec.contains_many(points)
        if np.any(inside):
            idx = np.flatnonzero(inside)
            clear = spec.segments_clear(np.repeat(start[None, :], len(idx), axis=0), points[idx])
            inside[idx[~clear]] = False

        nodes = np.where(inside, engine.snap(points), -1)
        resolved = np.flatnonzero(nodes >= 0)
        if len(resolved) and (best is None or len(resolved) > best[0]):
            j = int(resolved[-1])
            best = (len(resolved), points[j], int(nodes[j]), j)

        if sign > 0 and best is not None and best[0] == approach_depth:
            break

    if best is None:
        raise AnchorApproachError('No interior proxy for anchor {0}'.format(tuple(anchor)))

    return best[1], best[2], best[3]


def visual_table(graph, base, tau, anchors, approach_depth, tau_cap=1.0):
    """
    Builds the visual metametric table of boundary anchors.

    :param graph: metric graph
    :type graph: :py:class:`~qhgeo.discretize.MetricGraph`
    :param base: base node
    :type base: :py:class:`BasePoint`
    :param tau: visual parameter in (0, tau_cap]
    :type tau: float
    :param anchors: boundary points
    :type anchors: array of shape (m, 2)
    :param approach_depth: number of dyadic approach steps, at least 1
    :type approach_depth: int
    :param tau_cap: largest admissible tau
    :type tau_cap: float

    :returns: :py:class:`VisualTable`

    :raises: :py:class:`~qhgeo.util.PreconditionError`, :py:class:`~qhgeo.util.AnchorApproachError`
    """
    if not (math.isfinite(tau) and 0 < tau <= tau_cap):
        raise PreconditionError('tau must lie in (0, {0}]: {1}'.format(tau_cap, tau))
    if approach_depth < 1:
        raise PreconditionError('approach_depth must be at least 1: {0}'.format(approach_depth))

    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    approached = [approach_anchor(graph, base, a, approach_depth) for a in anchors]
    proxies = np.array([a[0] for a in approached])
    nodes = np.array([a[1] for a in approached], dtype=np.int64)
    depths = np.array([a[2] for a in approached], dtype=np.int64)

    engine = engine_for(graph)
    D = engine.tables('qh', nodes)[:, nodes]
    D = np.minimum(D, D.T)
    to_base = engine.table('qh', base.node)[nodes]

    products = product_from_distances(to_base[:, None], to_base[None, :], D)
    return VisualTable(tau, anchors, proxies, nodes, depths, products)


def ray_nodes(graph, base, anchors, approach_depth=4):
    """
    Node ids of the quasihyperbolic geodesics from the base node to each
    anchor's deepest proxy.

    :returns: list of int arrays, one per anchor
    """
    engine = engine_for(graph)
    rays = []
    for anchor in np.atleast_2d(np.asarray(anchors, dtype=float)):
        _, node, _ = approach_anchor(graph, base, anchor, approach_depth)
        path = engine.node_geodesic(base.node, node)
        rays.append(np.array(path.node_ids, dtype=np.int64))
    return rays


def starlikeness_probe(graph, base, anchors, samples, seed, approach_depth=4):
    """
    Estimates the rough-starlikeness constant: the largest quasihyperbolic
    distance from a sampled node to the nearest geodesic ray from the base
    node towards an anchor.

    :param samples: number of seeded points, at least 1
    :type samples: int

    :returns: float
    """
    if len(anchors) == 0:
        raise TooFewPointsError('No anchors given')
    if samples < 1:
        raise PreconditionError('samples must be at least 1: {0}'.format(samples))

    rays = ray_nodes(graph, base, anchors, approach_depth)
    on_rays = np.unique(np.concatenate(rays))
    reach = dijkstra(graph.matrix('qh'), directed=True, indices=on_rays, min_only=True)

    nodes = sample_nodes(graph, samples, seed)
    if len(nodes) == 0:
        raise TooFewPointsError('No sampled point is resolved by the graph')

    return float(np.max(reach[nodes]))
