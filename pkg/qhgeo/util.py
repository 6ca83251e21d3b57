"""
Provides the exception types and small shared helpers used throughout `qhgeo`.

.. moduleauthor:: qhgeo developers
"""

import os

import numpy as np


class DomainSpecError(Exception):
    """
    The domain description was malformed.  The message names the offending field.
    """
    pass


class PointOutsideDomainError(Exception):
    """
    A point is not inside the domain, or is not resolved by the discretization.
    """
    pass


class GraphBuildError(Exception):
    """
    Generic graph construction error.
    """
    pass


class NodeBudgetError(GraphBuildError):
    """
    Refinement would exceed the configured node budget.
    """
    pass


class DisconnectedGraphError(GraphBuildError):
    """
    The retained nodes split into several components.
    """
    pass


class PreconditionError(Exception):
    """
    A parameter violates the precondition of the requested operation.
    """
    pass


class UnreachableNodeError(Exception):
    """
    A node could not be reached on a graph that should be connected.
    """
    pass


class EmptyPathError(Exception):
    """
    The path has no nodes.
    """
    pass


class DegeneratePairError(Exception):
    """
    The two endpoints of a pair coincide.
    """
    pass


class TooFewPairsError(Exception):
    """
    Not enough pairs were supplied for the requested estimate.
    """
    pass


class TooFewPointsError(TooFewPairsError):
    """
    Not enough points were supplied for the requested estimate.
    """
    pass


class AnchorApproachError(Exception):
    """
    No interior proxy could be found for a boundary anchor.
    """
    pass


class UnmatchedWaypointError(Exception):
    """
    A waypoint has no sampled image within tolerance.
    """
    pass


class ConstraintError(Exception):
    """
    The constant ledger inputs violate 37 <= M + 1 <= C or eta(1) >= 1.
    """
    pass


class EtaInversionError(Exception):
    """
    The distortion function could not be inverted on the needed range.
    """
    pass


class ConfigError(Exception):
    """
    The experiment configuration or command line usage was invalid.
    """
    pass


class UsageError(ConfigError):
    """
    The command line arguments could not be parsed.
    """
    pass


def make_rng(seed):
    """
    Creates the seeded random generator used by every sampling routine.

    :param seed: seed value
    :type seed: int

    :returns: :py:class:`numpy.random.Generator`
    """
    return np.random.default_rng(int(seed))


def parse_point(text):
    """
    Parses a point given as ``"x,y"``.

    :param text: comma separated coordinates
    :type text: string

    :returns: tuple of floats

    :raises: :py:class:`~qhgeo.util.ConfigError`
    """
    try:
        coords = tuple(float(c) for c in text.split(','))
    except (AttributeError, ValueError):
        raise ConfigError('Invalid point: {0}'.format(text))

    if len(coords) != 2 or not all(np.isfinite(coords)):
        raise ConfigError('Invalid point: {0}'.format(text))

    return coords


def as_point(p):
    """
    Converts a coordinate pair into a float array, rejecting non-finite values.

    :param p: coordinates
    :type p: sequence of float

    :returns: :py:class:`numpy.ndarray` of shape (2,)
    """
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise PointOutsideDomainError('Point must have two finite coordinates: {0}'.format(p))

    return arr


def worker_count():
    """
    Number of worker threads allowed by ``QHGEO_THREADS`` (0 or unset = auto).

    :returns: int
    """
    try:
        value = int(os.environ.get('QHGEO_THREADS', '0'))
    except ValueError:
        value = 0

    if value <= 0:
        value = os.cpu_count() or 1

    return value
