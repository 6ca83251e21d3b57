"""
The constant ledger: the chain C1, M2, M1, M0, B0, A0 and the cigar and
inner-uniformity coefficients built from base parameters M and C and a
distortion function eta.  Every value is held as its logarithm in
:py:class:`~qhgeo.lognumber.LogNumber` form.

.. moduleauthor:: qhgeo developers
"""

import math

from .lognumber import LogNumber
from .util import ConstraintError, ConfigError, EtaInversionError

LOG8 = LogNumber(0, math.log(8.0))
LOG10 = LogNumber(0, math.log(10.0))
LOG20 = LogNumber(0, math.log(20.0))
LOG32 = LogNumber(0, math.log(32.0))

LEDGER_FIELDS = ('logC1', 'logM2', 'logM1', 'logM0', 'logB0', 'logA0', 'log_thm5_coeff', 'log_thm7_coeff')
"""Ledger entries in evaluation order."""


class PowerLaw(object):
    """
    ``eta(t) = a * t**b`` with a, b >= 1.
    """

    kind = 'pow'

    def __init__(self, a=1.0, b=1.0):
        """
        :raises: :py:class:`~qhgeo.util.ConstraintError`
        """
        self.a = float(a)
        self.b = float(b)
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a >= 1 and self.b >= 1):
            raise ConstraintError('pow eta needs a >= 1 and b >= 1: a={0}, b={1}'.format(a, b))

    def __call__(self, t):
        return self.a * t ** self.b

    def log_eta(self, log_t):
        """
        ``log eta(t)`` from ``log t``.
        """
        return math.log(self.a) + self.b * log_t

    def log_inverse_reciprocal(self, log_recip_s):
        """
        ``log(1 / eta^-1(s))`` from ``log(1 / s)``.
        """
        return (math.log(self.a) + log_recip_s) * (1.0 / self.b)

    def dict(self):
        return dict(kind=self.kind, a=self.a, b=self.b)

    def __str__(self):
        return 'pow:{0!r}:{1!r}'.format(self.a, self.b)


class Affine(object):
    """
    ``eta(t) = a * t + c`` with a >= 1, c >= 0.
    """

    kind = 'affine'

    def __init__(self, a=1.0, c=0.0):
        """
        :raises: :py:class:`~qhgeo.util.ConstraintError`
        """
        self.a = float(a)
        self.c = float(c)
        if not (math.isfinite(self.a) and math.isfinite(self.c) and self.a >= 1 and self.c >= 0):
            raise ConstraintError('affine eta needs a >= 1 and c >= 0: a={0}, c={1}'.format(a, c))

    def __call__(self, t):
        return self.a * t + self.c

    def log_eta(self, log_t):
        scaled = math.log(self.a) + log_t
        if self.c == 0:
            return scaled
        return (scaled.exp() + self.c).log()

    def log_inverse_reciprocal(self, log_recip_s):
        if self.c == 0:
            return math.log(self.a) + log_recip_s

        s = math.exp(-float(log_recip_s)) if log_recip_s.level == 0 else 0.0
        if s <= self.c:
            raise EtaInversionError('affine eta cannot be inverted at {0!r} (c = {1})'.format(s, self.c))

        return LogNumber(0, math.log(self.a) - math.log(s - self.c))

    def dict(self):
        return dict(kind=self.kind, a=self.a, c=self.c)

    def __str__(self):
        return 'affine:{0!r}:{1!r}'.format(self.a, self.c)


def parse_eta(text):
    """
    Parses ``pow:a:b`` or ``affine:a:c``.

    :raises: :py:class:`~qhgeo.util.ConfigError`
    """
    parts = str(text).split(':')
    kinds = {PowerLaw.kind: PowerLaw, Affine.kind: Affine}
    if len(parts) != 3 or parts[0] not in kinds:
        raise ConfigError('eta must be pow:a:b or affine:a:c, got {0!r}'.format(text))

    try:
        first, second = float(parts[1]), float(parts[2])
    except ValueError:
        raise ConfigError('eta parameters must be numbers, got {0!r}'.format(text))

    return kinds[parts[0]](first, second)


class ConstantLedger(object):
    """
    Log-space constants for one choice of (M, C, eta).
    """

    def __init__(self, M, C, eta, values):
        self.M = M
        self.C = C
        self.eta = eta
        for name in LEDGER_FIELDS:
            setattr(self, name, values[name])

    def __repr__(self):
        return 'ConstantLedger(M={0}, C={1}, eta={2})'.format(self.M, self.C, self.eta)

    def values(self):
        """
        Entries in evaluation order.
        """
        return [(name, getattr(self, name)) for name in LEDGER_FIELDS]

    def dict(self, **kwargs):
        """
        Dictionary representation with level-tagged log values.
        """
        result = dict(M=self.M, C=self.C, eta=str(self.eta))
        for name, value in self.values():
            result[name] = value.dict()
        result.update(kwargs)
        return result


def check_inputs(M, C, eta):
    """
    :raises: :py:class:`~qhgeo.util.ConstraintError`
    """
    if not (math.isfinite(M) and math.isfinite(C) and 37 <= M + 1 <= C):
        raise ConstraintError('Inputs must satisfy 37 <= M + 1 <= C: M={0}, C={1}'.format(M, C))

    if eta(1.0) < 1:
        raise ConstraintError('eta(1) must be at least 1: {0}'.format(eta(1.0)))


def compute_ledger(M, C, eta):
    """
    Evaluates the ledger bottom-up in log space.

    :param M: uniformity parameter
    :type M: float
    :param C: curve constant, at least M + 1
    :type C: float
    :param eta: distortion function
    :type eta: :py:class:`PowerLaw` or :py:class:`Affine`

    :returns: :py:class:`ConstantLedger`

    :raises: :py:class:`~qhgeo.util.ConstraintError`, :py:class:`~qhgeo.util.EtaInversionError`
    """
    check_inputs(M, C, eta)
    v = {}

    # C1 = exp(4 (CM)^2)
    v['logC1'] = LogNumber(0, 4.0 * (C * M) ** 2)

    # M2 = 10 C1^4 eta(C1) max{1, 1/eta^-1(C^-3 / 5)}
    log_recip_s = LogNumber(0, math.log(5.0) + 3.0 * math.log(C))
    inverse_term = max(LogNumber(0, 0.0), eta.log_inverse_reciprocal(log_recip_s))
    v['logM2'] = LOG10 + 4 * v['logC1'] + eta.log_eta(v['logC1']) + inverse_term

    # M1 = max{eta(M2^5), exp(M M2^5), M2 / eta^-1(1 / M2)}
    five_logM2 = 5 * v['logM2']
    v['logM1'] = max(eta.log_eta(five_logM2),
                     M * five_logM2.exp(),
                     eta.log_inverse_reciprocal(v['logM2']) + v['logM2'])

    # M0 = max{exp(C1 M1), eta(C1 M1^2)}
    v['logM0'] = max((v['logC1'] + v['logM1']).exp(),
                     eta.log_eta(v['logC1'] + 2 * v['logM1']))

    # B0 = 20 M0^2
    v['logB0'] = LOG20 + 2 * v['logM0']

    # A0 = max{exp(B0^2 M0), (M1 eta(B0^2))^M0}
    two_logB0 = 2 * v['logB0']
    v['logA0'] = max((two_logB0 + v['logM0']).exp(),
                     (v['logM0'] + (v['logM1'] + eta.log_eta(two_logB0)).log()).exp())

    v['log_thm5_coeff'] = LOG8 + v['logA0'] + v['logB0']
    v['log_thm7_coeff'] = LOG32 + v['logA0'] + 2 * v['logB0']

    for name in LEDGER_FIELDS:
        if not (v[name].finite and v[name] > 0):
            raise ConstraintError('Ledger value {0} is not finite and positive: {1!r}'.format(name, v[name]))

    return ConstantLedger(M, C, eta, v)


class MonotonicityReport(object):
    """
    Ledger rows over a grid of (M, C), with every violation of
    monotonicity in M and C.
    """

    def __init__(self, rows, violations):
        self.rows = rows
        self.violations = violations

    @property
    def monotone(self):
        return not self.violations

    def dict(self, **kwargs):
        """
        Dictionary representation.
        """
        return dict(
            monotone        = self.monotone,
            violations      = [list(v) for v in self.violations],
            rows            = [r.dict() for r in self.rows],
            **kwargs
        )


def ledger_monotonicity_report(grid, eta=None):
    """
    Computes the ledger at every grid point and checks that each entry is
    nondecreasing in M and in C.

    :param grid: (M, C) points
    :type grid: sequence of pairs
    :param eta: distortion function, identity when omitted
    :type eta: :py:class:`PowerLaw` or :py:class:`Affine`

    :returns: :py:class:`MonotonicityReport`

    :raises: :py:class:`~qhgeo.util.ConstraintError`
    """
    eta = eta if eta is not None else PowerLaw(1.0, 1.0)
    rows = [compute_ledger(M, C, eta) for M, C in grid]

    violations = []
    for lo in rows:
        for hi in rows:
            if lo is hi or not (lo.M <= hi.M and lo.C <= hi.C):
                continue
            for name in LEDGER_FIELDS:
                if getattr(hi, name) < getattr(lo, name):
                    violations.append(((lo.M, lo.C), (hi.M, hi.C), name))

    return MonotonicityReport(rows, violations)
