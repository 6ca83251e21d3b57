"""
Tagged variants shared by the modules: stencils, metrics, estimation modes and
verdict outcomes.

.. moduleauthor:: qhgeo developers
"""

AXIS4 = 'axis4'
KING8 = 'king8'
KNIGHT16 = 'knight16'

STENCILS = {
    AXIS4: ((1, 0), (-1, 0), (0, 1), (0, -1)),
    KING8: ((1, 0), (-1, 0), (0, 1), (0, -1),
            (1, 1), (1, -1), (-1, 1), (-1, -1)),
    KNIGHT16: ((1, 0), (-1, 0), (0, 1), (0, -1),
               (1, 1), (1, -1), (-1, 1), (-1, -1),
               (1, 2), (2, 1), (-1, 2), (-2, 1),
               (1, -2), (2, -1), (-1, -2), (-2, -1)),
}

INNER = 'inner'
QUASIHYPERBOLIC = 'quasihyperbolic'
DEFORMED = 'deformed'

METRICS = (INNER, QUASIHYPERBOLIC, DEFORMED)

# Edge weight column backing each metric.
WEIGHTS = {
    INNER: 'euclid',
    QUASIHYPERBOLIC: 'qh',
}

METRIC_ALIASES = {
    'inner': INNER,
    'qh': QUASIHYPERBOLIC,
    'quasihyperbolic': QUASIHYPERBOLIC,
    'deformed': DEFORMED,
}

LENGTH = 'length'
DIAMETER = 'diameter'

CIGAR_VARIANTS = (LENGTH, DIAMETER)

JOHN = 'john'
UNIFORM = 'uniform'
INNER_UNIFORM = 'inner_uniform'

MODES = (JOHN, UNIFORM, INNER_UNIFORM)

PASS = 'pass'
FAIL = 'fail'
INCONCLUSIVE = 'inconclusive'

PROPERTY_A = 'A'
PROPERTY_B = 'B'
