"""
Open axis-parallel rectangle.

.. moduleauthor:: qhgeo developers
"""

import numpy as np

from .base_domain import Domain, PolylineComponent, read_point
from ..util import DomainSpecError


class Rectangle(Domain):
    """
    The open box between two strictly ordered corners.
    """

    kind = 'rectangle'

    min_corner = None
    """Lower-left corner."""
    max_corner = None
    """Upper-right corner."""

    def __init__(self, min_corner=(0.0, 0.0), max_corner=(1.0, 1.0)):
        """
        Constructor

        :param min_corner: lower-left corner
        :type min_corner: sequence of two floats
        :param max_corner: upper-right corner
        :type max_corner: sequence of two floats

        :raises: :py:class:`~qhgeo.util.DomainSpecError`
        """
        Domain.__init__(self)

        self.min_corner = read_point(min_corner, 'min_corner')
        self.max_corner = read_point(max_corner, 'max_corner')

        if not np.all(self.min_corner < self.max_corner):
            raise DomainSpecError('max_corner: must exceed min_corner in every coordinate')

    @property
    def bounds(self):
        return (self.min_corner[0], self.min_corner[1], self.max_corner[0], self.max_corner[1])

    @property
    def vertices(self):
        x0, y0, x1, y1 = self.bounds
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])

    def _build_components(self):
        return [PolylineComponent(self.vertices, closed=True)]

    def _inside_outer_many(self, points):
        return np.all((points > self.min_corner) & (points < self.max_corner), axis=1)

    def boundary_gap_many(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        inside = self._inside_outer_many(points)
        closed_form = np.min(np.minimum(points - self.min_corner, self.max_corner - points), axis=1)

        # Outside the box the closed form is wrong, use the outline distance.
        if np.all(inside):
            return closed_form

        return np.where(inside, closed_form, Domain.boundary_gap_many(self, points))

    def scaled(self, factor):
        corners = sorted([tuple(self.min_corner * factor), tuple(self.max_corner * factor)])
        return Rectangle(np.minimum(*corners), np.maximum(*corners))

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            kind        = self.kind,
            min_corner  = [float(c) for c in self.min_corner],
            max_corner  = [float(c) for c in self.max_corner],
            **kwargs
        )
