"""
Open round annulus.

.. moduleauthor:: qhgeo developers
"""

import numpy as np

from .base_domain import Domain, CircleComponent, read_point, read_positive
from .geometry import segment_point_distance
from ..util import DomainSpecError


class Annulus(Domain):
    """
    The open ring ``r_inner < |x - center| < r_outer``.
    """

    kind = 'annulus'

    center = None
    """Common center of both circles."""
    r_inner = 0.5
    """Radius of the hole."""
    r_outer = 1.0
    """Outer radius."""

    def __init__(self, center=(0.0, 0.0), r_inner=0.5, r_outer=1.0):
        """
        Constructor

        :param center: common center
        :type center: sequence of two floats
        :param r_inner: inner radius, positive
        :type r_inner: float
        :param r_outer: outer radius, larger than r_inner
        :type r_outer: float

        :raises: :py:class:`~qhgeo.util.DomainSpecError`
        """
        Domain.__init__(self)

        self.center = read_point(center, 'center')
        self.r_inner = read_positive(r_inner, 'r_inner')
        self.r_outer = read_positive(r_outer, 'r_outer')

        if self.r_inner >= self.r_outer:
            raise DomainSpecError('r_outer: must exceed r_inner ({0} >= {1})'.format(self.r_inner, self.r_outer))

    @property
    def bounds(self):
        cx, cy = self.center
        r = self.r_outer
        return (cx - r, cy - r, cx + r, cy + r)

    def _build_components(self):
        return [CircleComponent(self.center, self.r_outer), CircleComponent(self.center, self.r_inner)]

    def _radii(self, points):
        return np.hypot(points[:, 0] - self.center[0], points[:, 1] - self.center[1])

    def _inside_outer_many(self, points):
        rho = self._radii(points)
        return (rho > self.r_inner) & (rho < self.r_outer)

    def boundary_gap_many(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rho = self._radii(points)
        return np.minimum(np.abs(rho - self.r_inner), np.abs(self.r_outer - rho))

    def segments_clear(self, P, Q):
        # Chords of the outer circle stay inside it; only the hole can block.
        return segment_point_distance(P, Q, self.center) > self.r_inner + self.EPS

    def scaled(self, factor):
        return Annulus(self.center * factor, self.r_inner * abs(factor), self.r_outer * abs(factor))

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            kind        = self.kind,
            center      = [float(c) for c in self.center],
            r_inner     = self.r_inner,
            r_outer     = self.r_outer,
            **kwargs
        )
