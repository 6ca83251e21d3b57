"""
Positive reals far beyond floating-point range, stored as an iterated
exponential ``exp(exp(...exp(mantissa)))`` with ``level`` exponentials.

.. moduleauthor:: qhgeo developers
"""

import functools
import math

OVERFLOW = 1e300
"""Largest mantissa kept at the current level."""
LOG_OVERFLOW = math.log(OVERFLOW)
"""Mantissas at or below this are lowered one level."""


@functools.total_ordering
class LogNumber(object):
    """
    A number ``exp^level(mantissa)`` in canonical form: level 0 holds every
    value up to 1e300, and a mantissa above a positive level lies in
    ``(log(1e300), 1e300]``.  Canonical forms order by ``(level, mantissa)``.
    """

    __slots__ = ('level', 'mantissa')

    def __init__(self, level=0, mantissa=0.0):
        """
        Constructor

        :param level: number of exponentials
        :type level: int
        :param mantissa: innermost value
        :type mantissa: float
        """
        level = int(level)
        mantissa = float(mantissa)

        if level < 0 or math.isnan(mantissa) or (level > 0 and math.isinf(mantissa)):
            raise ValueError('Invalid LogNumber({0}, {1})'.format(level, mantissa))

        while mantissa > OVERFLOW and not math.isinf(mantissa):
            mantissa = math.log(mantissa)
            level += 1
        while level > 0 and mantissa <= LOG_OVERFLOW:
            mantissa = math.exp(mantissa)
            level -= 1

        self.level = level
        self.mantissa = mantissa

    @classmethod
    def coerce(cls, value):
        if isinstance(value, LogNumber):
            return value
        return cls(0, value)

    def __repr__(self):
        return 'LogNumber({0}, {1!r})'.format(self.level, self.mantissa)

    def __float__(self):
        return self.mantissa if self.level == 0 else math.inf

    def __eq__(self, other):
        other = LogNumber.coerce(other)
        return (self.level, self.mantissa) == (other.level, other.mantissa)

    def __lt__(self, other):
        other = LogNumber.coerce(other)
        return (self.level, self.mantissa) < (other.level, other.mantissa)

    def __hash__(self):
        return hash((self.level, self.mantissa))

    @property
    def finite(self):
        return not math.isinf(self.mantissa)

    def log(self):
        """
        Natural logarithm.

        :raises: :py:class:`ValueError` for nonpositive values
        """
        if self.level > 0:
            return LogNumber(self.level - 1, self.mantissa)
        if self.mantissa <= 0:
            raise ValueError('Logarithm of nonpositive value {0}'.format(self.mantissa))
        return LogNumber(0, math.log(self.mantissa))

    def exp(self):
        """
        Natural exponential.
        """
        if self.level == 0 and self.mantissa <= LOG_OVERFLOW:
            return LogNumber(0, math.exp(self.mantissa))
        return LogNumber(self.level + 1, self.mantissa)

    def __add__(self, other):
        other = LogNumber.coerce(other)
        big, small = (self, other) if other <= self else (other, self)

        if big.level == 0:
            return LogNumber(0, big.mantissa + small.mantissa)

        # A summand at least exp(exp(log 1e300)) absorbs anything smaller.
        if big.level >= 2:
            return big

        if small.level == 0 and small.mantissa <= 0:
            if small.mantissa == 0:
                return big
            raise ValueError('Addition of negative values beyond float range')

        log_big = big.mantissa
        log_small = small.log().mantissa if small.level <= 1 else log_big
        return LogNumber(1, log_big + math.log1p(math.exp(log_small - log_big)))

    __radd__ = __add__

    def __mul__(self, other):
        other = LogNumber.coerce(other)
        if self.level == 0 and other.level == 0:
            product = self.mantissa * other.mantissa
            if abs(product) <= OVERFLOW:
                return LogNumber(0, product)

        if self.mantissa <= 0 or other.mantissa <= 0:
            if self.mantissa == 0 or other.mantissa == 0:
                return LogNumber(0, 0.0)
            raise ValueError('Multiplication of negative values beyond float range')

        return (self.log() + other.log()).exp()

    __rmul__ = __mul__

    def __pow__(self, exponent):
        """
        ``self ** exponent`` for positive self.
        """
        if self.level == 0 and self.mantissa == 1.0:
            return LogNumber(0, 1.0)
        return (LogNumber.coerce(exponent) * self.log()).exp()

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            level       = self.level,
            mantissa    = self.mantissa,
            **kwargs
        )
