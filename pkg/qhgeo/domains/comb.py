"""
The comb family: the unit square with interleaved slits accumulating at the
left side.  It is John but not bounded in its inner metric.

.. moduleauthor:: qhgeo developers
"""

from .polygon import SlitPolygon
from ..util import DomainSpecError


def comb_slits(teeth):
    """
    Slits of the comb with the given number of teeth.  Tooth n contributes
    ``L_n = {x = 1/2^n, 0 < y <= 2/3}`` and
    ``K_n = {x = 1/2^n + 1/2^(n+2), 1/3 <= y < 1}``.

    :returns: list of ((x, y), (x, y)) pairs, lower slits first
    """
    lower = []
    upper = []
    for n in range(1, teeth + 1):
        x_low = 1.0 / 2 ** n
        x_up = x_low + 1.0 / 2 ** (n + 2)
        lower.append(((x_low, 0.0), (x_low, 2.0 / 3.0)))
        upper.append(((x_up, 1.0 / 3.0), (x_up, 1.0)))

    slits = []
    for pair in zip(lower, upper):
        slits.extend(pair)

    return slits


class Comb(SlitPolygon):
    """
    Unit square minus the lower slits L_n and the upper slits K_n, n = 1..teeth.
    """

    kind = 'comb'

    teeth = 1
    """Number of teeth."""

    def __init__(self, teeth=1):
        """
        Constructor

        :param teeth: number of teeth, at least 1
        :type teeth: int

        :raises: :py:class:`~qhgeo.util.DomainSpecError`
        """
        if isinstance(teeth, bool) or not isinstance(teeth, int) or teeth < 1:
            raise DomainSpecError('teeth: expected a positive integer, got {0!r}'.format(teeth))

        # Slits narrower than float resolution cannot be represented.
        if teeth > 40:
            raise DomainSpecError('teeth: at most 40 supported, got {0}'.format(teeth))

        self.teeth = teeth
        SlitPolygon.__init__(self, [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], comb_slits(teeth))

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            kind        = self.kind,
            teeth       = self.teeth,
            **kwargs
        )
