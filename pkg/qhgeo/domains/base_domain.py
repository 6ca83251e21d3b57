"""
Base class for the planar domain family and the boundary components every
domain is assembled from.

.. moduleauthor:: qhgeo developers
"""

import json
import math

import numpy as np

from ..util import DomainSpecError, PointOutsideDomainError, as_point, make_rng
from .geometry import segment_projection


class CircleComponent(object):
    """
    A full circle of the boundary.
    """

    sides = 1
    """Number of accessible sides."""

    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)

    @property
    def length(self):
        return 2.0 * math.pi * self.radius

    def point_at(self, u):
        """
        Points at arclength fractions u in [0, 1).
        """
        angle = 2.0 * math.pi * np.asarray(u, dtype=float)
        return np.column_stack((self.center[0] + self.radius * np.cos(angle),
                                self.center[1] + self.radius * np.sin(angle)))

    def distance(self, points):
        rho = np.hypot(points[:, 0] - self.center[0], points[:, 1] - self.center[1])
        return np.abs(rho - self.radius)

    def project(self, points):
        """
        Nearest circle points and the unit radial directions at them.
        """
        d = points - self.center
        rho = np.hypot(d[:, 0], d[:, 1])
        radial = np.where(rho[:, None] > 0, d / np.where(rho > 0, rho, 1.0)[:, None], np.array([1.0, 0.0]))
        return self.center + self.radius * radial, radial


class PolylineComponent(object):
    """
    A polygonal boundary component: a closed outline or an open slit.
    """

    def __init__(self, vertices, closed=True, sides=1):
        self.vertices = np.asarray(vertices, dtype=float)
        self.closed = closed
        self.sides = sides

        if closed:
            self.starts = self.vertices
            self.ends = np.roll(self.vertices, -1, axis=0)
        else:
            self.starts = self.vertices[:-1]
            self.ends = self.vertices[1:]

        self._seg_lengths = np.hypot(*(self.ends - self.starts).T)

    @property
    def length(self):
        return float(np.sum(self._seg_lengths))

    @property
    def segments(self):
        return list(zip(self.starts, self.ends))

    def point_at(self, u):
        """
        Points at arclength fractions u in [0, 1).
        """
        s = np.asarray(u, dtype=float) * self.length
        cum = np.concatenate(([0.0], np.cumsum(self._seg_lengths)))
        idx = np.clip(np.searchsorted(cum, s, side='right') - 1, 0, len(self._seg_lengths) - 1)
        t = (s - cum[idx]) / self._seg_lengths[idx]
        return self.starts[idx] + t[:, None] * (self.ends[idx] - self.starts[idx])

    def distance(self, points):
        best = np.full(len(points), np.inf)
        for a, b in self.segments:
            _, dist = segment_projection(points, a, b)
            best = np.minimum(best, dist)
        return best

    def project(self, points):
        """
        Nearest outline points and unit normals of the nearest segments.
        """
        best = np.full(len(points), np.inf)
        nearest = np.zeros_like(points)
        normals = np.zeros_like(points)

        for a, b in self.segments:
            near, dist = segment_projection(points, a, b)
            better = dist < best
            best = np.where(better, dist, best)
            nearest[better] = near[better]
            tangent = (b - a) / np.hypot(*(b - a))
            normals[better] = np.array([-tangent[1], tangent[0]])

        return nearest, normals


class Domain(object):
    """
    Base class for bounded planar domains.  Subclasses supply the boundary
    components and the open outer region; membership, boundary distance and
    boundary sampling are shared.
    """

    kind = None
    """Tag used in domain files."""

    EPS = 1e-12
    """Points closer than this to the boundary count as outside."""

    def __init__(self):
        """
        Constructor
        """
        self._components = None

    def __repr__(self):
        return '{0}({1})'.format(self.__class__.__name__, json.dumps(self.dict()))

    def __eq__(self, other):
        return isinstance(other, Domain) and self.dict() == other.dict()

    def __hash__(self):
        return hash(json.dumps(self.dict(), sort_keys=True))

    @property
    def components(self):
        """
        Boundary components, built once.

        :returns: list of :py:class:`CircleComponent` or :py:class:`PolylineComponent`
        """
        if self._components is None:
            self._components = self._build_components()
        return self._components

    @property
    def bounds(self):
        """
        Bounding box (xmin, ymin, xmax, ymax).
        """
        raise NotImplementedError()

    @property
    def diameter_bound(self):
        xmin, ymin, xmax, ymax = self.bounds
        return math.hypot(xmax - xmin, ymax - ymin)

    def dict(self):
        """
        Dictionary representation, as written to domain files.
        """
        raise NotImplementedError()

    def scaled(self, factor):
        """
        Image of the domain under x -> factor * x.
        """
        raise NotImplementedError()

    def _build_components(self):
        raise NotImplementedError()

    def _inside_outer_many(self, points):
        raise NotImplementedError()

    def boundary_gap_many(self, points):
        """
        Unsigned Euclidean distance from each point to the boundary set
        (outer boundary and slits).  Defined everywhere in the plane.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        gap = np.full(len(points), np.inf)
        for component in self.components:
            gap = np.minimum(gap, component.distance(points))
        return gap

    def contains_many(self, points):
        """
        Vectorized open-set membership.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        finite = np.all(np.isfinite(points), axis=1)
        safe = np.where(finite[:, None], points, 0.0)
        return finite & self._inside_outer_many(safe) & (self.boundary_gap_many(safe) > self.EPS)

    def contains(self, p):
        """
        Whether p lies in the open domain, strictly off every slit and boundary.

        :param p: point
        :type p: sequence of two floats

        :returns: bool
        """
        return bool(self.contains_many(as_point(p)[None, :])[0])

    def boundary_distance(self, p):
        """
        Euclidean distance from p to the topological boundary.

        :param p: point inside the domain
        :type p: sequence of two floats

        :returns: float

        :raises: :py:class:`~qhgeo.util.PointOutsideDomainError`
        """
        p = as_point(p)
        if not self.contains(p):
            raise PointOutsideDomainError('Point {0} is outside {1}'.format(tuple(p), self.kind))

        return float(self.boundary_gap_many(p[None, :])[0])

    def boundary_sample(self, count, seed):
        """
        Seeded sample of boundary points, arclength-stratified within each
        component.  Slits are weighted by both sides.  When count allows,
        every component receives at least one point.

        :param count: number of points, at least 2
        :type count: int
        :param seed: random seed
        :type seed: int

        :returns: array of shape (count, 2)
        """
        if count < 2:
            raise DomainSpecError('count: must be at least 2')

        rng = make_rng(seed)
        comps = self.components
        weights = np.array([c.length * c.sides for c in comps])

        base = np.zeros(len(comps), dtype=int)
        remaining = count
        if count >= len(comps):
            base[:] = 1
            remaining -= len(comps)

        share = remaining * weights / weights.sum()
        alloc = base + np.floor(share).astype(int)
        leftover = count - alloc.sum()
        order = np.argsort(-(share - np.floor(share)), kind='stable')
        alloc[order[:leftover]] += 1

        samples = []
        for component, n in zip(comps, alloc):
            if n == 0:
                continue
            u = (np.arange(n) + rng.random(n)) / n
            samples.append(component.point_at(u))

        return np.vstack(samples)

    def nearest_boundary_point(self, points):
        """
        Nearest boundary points.

        :returns: array of shape (N, 2)
        """
        nearest, _ = self._project(points)
        return nearest

    def inward_normals(self, points):
        """
        Unit normals at (or near) boundary points, oriented into the domain
        where exactly one side is inside.  On a slit both sides are inside and
        the normal keeps the segment's left orientation.

        :returns: array of shape (N, 2)
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        nearest, normals = self._project(points)
        probe = 1e-6 * self.diameter_bound
        forward = self.contains_many(nearest + probe * normals)
        backward = self.contains_many(nearest - probe * normals)
        flip = backward & ~forward
        normals[flip] *= -1.0
        return normals

    def _project(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        best = np.full(len(points), np.inf)
        nearest = np.zeros_like(points)
        normals = np.zeros_like(points)

        for component in self.components:
            near, normal = component.project(points)
            dist = np.hypot(*(points - near).T)
            better = dist < best
            best = np.where(better, dist, best)
            nearest[better] = near[better]
            normals[better] = normal[better]

        return nearest, normals

    def segments_clear(self, P, Q):
        """
        For segments whose endpoints lie inside the domain, whether the open
        segment avoids the boundary.  Convex domains need no test.

        :returns: bool array
        """
        return np.ones(len(np.atleast_2d(P)), dtype=bool)

    def sample_interior(self, count, rng, min_delta=0.0):
        """
        Rejection-samples points uniformly from the domain.

        :param count: number of points
        :type count: int
        :param rng: random generator
        :type rng: :py:class:`numpy.random.Generator`
        :param min_delta: minimum boundary distance of accepted points
        :type min_delta: float

        :returns: array of shape (count, 2)
        """
        xmin, ymin, xmax, ymax = self.bounds
        accepted = []
        total = 0

        while total < count:
            batch = rng.random((max(64, 2 * (count - total)), 2))
            batch = np.column_stack((xmin + (xmax - xmin) * batch[:, 0],
                                     ymin + (ymax - ymin) * batch[:, 1]))
            keep = self.contains_many(batch)
            if min_delta > 0:
                keep &= self.boundary_gap_many(batch) >= min_delta
            batch = batch[keep]
            accepted.append(batch)
            total += len(batch)

        return np.vstack(accepted)[:count]


def read_point(value, field):
    """
    Validates a coordinate pair from a domain description.

    :raises: :py:class:`~qhgeo.util.DomainSpecError`
    """
    try:
        arr = np.asarray(value, dtype=float).reshape(-1)
    except (TypeError, ValueError):
        raise DomainSpecError('{0}: expected a pair of numbers, got {1!r}'.format(field, value))

    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise DomainSpecError('{0}: expected a pair of finite numbers, got {1!r}'.format(field, value))

    return arr


def read_positive(value, field):
    """
    Validates a strictly positive finite number.

    :raises: :py:class:`~qhgeo.util.DomainSpecError`
    """
    if isinstance(value, bool):
        raise DomainSpecError('{0}: expected a number, got {1!r}'.format(field, value))

    try:
        number = float(value)
    except (TypeError, ValueError):
        raise DomainSpecError('{0}: expected a number, got {1!r}'.format(field, value))

    if not math.isfinite(number) or number <= 0:
        raise DomainSpecError('{0}: must be positive and finite, got {1!r}'.format(field, value))

    return number
