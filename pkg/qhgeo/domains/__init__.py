"""
The domain zoo and its file format.

.. moduleauthor:: qhgeo developers
"""

import io
import json

from .base_domain import Domain
from .disk import Disk
from .rectangle import Rectangle
from .annulus import Annulus
from .polygon import SlitPolygon
from .comb import Comb
from ..util import DomainSpecError


DOMAIN_KINDS = {
    Disk.kind: (Disk, ('center', 'radius')),
    Rectangle.kind: (Rectangle, ('min_corner', 'max_corner')),
    Annulus.kind: (Annulus, ('center', 'r_inner', 'r_outer')),
    SlitPolygon.kind: (SlitPolygon, ('outer', 'slits')),
    Comb.kind: (Comb, ('teeth',)),
}


def parse_domain(data):
    """
    Builds a validated domain from its dictionary description.

    :param data: description with a ``kind`` field
    :type data: dict

    :returns: :py:class:`~qhgeo.domains.Domain`

    :raises: :py:class:`~qhgeo.util.DomainSpecError`
    """
    if isinstance(data, Domain):
        return data

    if not isinstance(data, dict):
        raise DomainSpecError('kind: domain description must be an object')

    kind = data.get('kind')
    if kind not in DOMAIN_KINDS:
        raise DomainSpecError('kind: unknown domain kind {0!r}'.format(kind))

    cls, fields = DOMAIN_KINDS[kind]
    required = tuple(f for f in fields if f != 'slits')

    for field in required:
        if field not in data:
            raise DomainSpecError('{0}: missing'.format(field))

    unknown = set(data) - set(fields) - {'kind'}
    if unknown:
        raise DomainSpecError('{0}: unknown field'.format(sorted(unknown)[0]))

    return cls(**{f: data[f] for f in fields if f in data})


def load_domain(path):
    """
    Reads a domain file (UTF-8 JSON, one object).

    :param path: file path
    :type path: string

    :returns: :py:class:`~qhgeo.domains.Domain`

    :raises: :py:class:`~qhgeo.util.DomainSpecError`
    """
    try:
        with io.open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except ValueError as err:
        raise DomainSpecError('kind: invalid JSON in {0}: {1}'.format(path, err))

    return parse_domain(data)


__all__ = ['Domain', 'Disk', 'Rectangle', 'Annulus', 'SlitPolygon', 'Comb',
           'DOMAIN_KINDS', 'parse_domain', 'load_domain']
