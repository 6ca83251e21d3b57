"""
Open Euclidean disk.

.. moduleauthor:: qhgeo developers
"""

import numpy as np

from .base_domain import Domain, CircleComponent, read_point, read_positive


class Disk(Domain):
    """
    The open disk ``|x - center| < radius``.
    """

    kind = 'disk'

    center = None
    """Center of the disk."""
    radius = 1.0
    """Radius of the disk."""

    def __init__(self, center=(0.0, 0.0), radius=1.0):
        """
        Constructor

        :param center: disk center
        :type center: sequence of two floats
        :param radius: radius, positive
        :type radius: float

        :raises: :py:class:`~qhgeo.util.DomainSpecError`
        """
        Domain.__init__(self)

        self.center = read_point(center, 'center')
        self.radius = read_positive(radius, 'radius')

    @property
    def bounds(self):
        cx, cy = self.center
        r = self.radius
        return (cx - r, cy - r, cx + r, cy + r)

    def _build_components(self):
        return [CircleComponent(self.center, self.radius)]

    def _inside_outer_many(self, points):
        return np.hypot(points[:, 0] - self.center[0], points[:, 1] - self.center[1]) < self.radius

    def boundary_gap_many(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.abs(self.radius - np.hypot(points[:, 0] - self.center[0], points[:, 1] - self.center[1]))

    def scaled(self, factor):
        return Disk(self.center * factor, self.radius * abs(factor))

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            kind        = self.kind,
            center      = [float(c) for c in self.center],
            radius      = self.radius,
            **kwargs
        )
