from qhgeo.domains import Disk, Rectangle, Annulus, SlitPolygon, Comb, parse_domain, load_domain
from qhgeo.discretize import GridParams, MetricGraph, build_graph
from qhgeo.metrics import inner_distance, quasihyperbolic_distance, deformed_distance, geodesic
import qhgeo.conditions
import qhgeo.constants
import qhgeo.domains
import qhgeo.discretize
import qhgeo.gromov
import qhgeo.inequalities
import qhgeo.maps
import qhgeo.metrics
import qhgeo.util

__all__ = ['Disk', 'Rectangle', 'Annulus', 'SlitPolygon', 'Comb', 'parse_domain', 'load_domain',
           'GridParams', 'MetricGraph', 'build_graph',
           'inner_distance', 'quasihyperbolic_distance', 'deformed_distance', 'geodesic',
           'conditions', 'constants', 'domains', 'discretize', 'gromov', 'inequalities', 'maps', 'metrics', 'util']
