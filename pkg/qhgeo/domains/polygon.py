"""
Simple polygon with slits removed.

.. moduleauthor:: qhgeo developers
"""

import numpy as np

from .base_domain import Domain, PolylineComponent, read_point
from .geometry import points_in_polygon, polygon_area, segments_intersect
from ..util import DomainSpecError


class SlitPolygon(Domain):
    """
    The interior of a simple polygon minus a finite set of closed segments.
    Each slit has two accessible sides.
    """

    kind = 'slit_polygon'

    outer = None
    """Vertices of the outer polygon, not repeated at the end."""
    slits = None
    """List of slit segments, each a (2, 2) array."""

    def __init__(self, outer, slits=None):
        """
        Constructor

        :param outer: outer polygon vertices
        :type outer: list of coordinate pairs
        :param slits: slit segments
        :type slits: list of pairs of coordinate pairs

        :raises: :py:class:`~qhgeo.util.DomainSpecError`
        """
        Domain.__init__(self)

        if not isinstance(outer, (list, tuple, np.ndarray)) or len(outer) < 3:
            raise DomainSpecError('outer: expected at least 3 vertices')

        self.outer = np.array([read_point(v, 'outer[{0}]'.format(i)) for i, v in enumerate(outer)])

        if abs(polygon_area(self.outer)) <= 0.0:
            raise DomainSpecError('outer: polygon has zero area')

        self.slits = []
        for i, slit in enumerate(slits or []):
            field = 'slits[{0}]'.format(i)
            if not isinstance(slit, (list, tuple, np.ndarray)) or len(slit) != 2:
                raise DomainSpecError('{0}: expected two endpoints'.format(field))

            a = read_point(slit[0], field)
            b = read_point(slit[1], field)
            if np.array_equal(a, b):
                raise DomainSpecError('{0}: endpoints coincide'.format(field))

            self.slits.append(np.array([a, b]))

        self._edges = None

    @property
    def bounds(self):
        lo = self.outer.min(axis=0)
        hi = self.outer.max(axis=0)
        return (lo[0], lo[1], hi[0], hi[1])

    def _build_components(self):
        components = [PolylineComponent(self.outer, closed=True)]
        components.extend(PolylineComponent(s, closed=False, sides=2) for s in self.slits)
        return components

    def _inside_outer_many(self, points):
        return points_in_polygon(points, self.outer)

    @property
    def edges(self):
        """
        Every boundary segment: outer edges followed by slits.
        """
        if self._edges is None:
            edges = [(self.outer[i], self.outer[(i + 1) % len(self.outer)]) for i in range(len(self.outer))]
            edges.extend((s[0], s[1]) for s in self.slits)
            self._edges = edges

        return self._edges

    def segments_clear(self, P, Q):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        clear = np.ones(len(P), dtype=bool)

        for a, b in self.edges:
            clear &= ~segments_intersect(P, Q, a, b)

        return clear

    def scaled(self, factor):
        return SlitPolygon(self.outer * factor, [s * factor for s in self.slits])

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            kind        = SlitPolygon.kind,
            outer       = self.outer.tolist(),
            slits       = [s.tolist() for s in self.slits],
            **kwargs
        )
