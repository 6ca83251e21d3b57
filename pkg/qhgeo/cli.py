"""
Command line experiment runner.

Exit status is 0 when the run succeeds and its checks pass, 1 when a check
fails (or cannot be established) or a computation raises, and 2 on usage or
configuration errors.

.. moduleauthor:: qhgeo developers
"""

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from . import constants as ledger
from .conditions import PAIR_FIELDS, UniformityEstimator
from .config import ExperimentConfig
from .discretize import GraphBuilder
from .domains import load_domain
from .gromov import choose_base_point, estimate_delta, visual_table
from .inequalities import run_inequalities
from .maps import SampledMap, boundary_inner_distances, property_a_verdict, property_b_verdict, qs_envelope
from .metrics import DeformSpec, engine_for, resolve_metric
from .util import (AnchorApproachError, ConfigError, ConstraintError, DegeneratePairError, DomainSpecError,
                   EmptyPathError, EtaInversionError, GraphBuildError, PointOutsideDomainError, PreconditionError,
                   TooFewPairsError, UnmatchedWaypointError, UnreachableNodeError, UsageError, parse_point)
from .variants import DEFORMED, METRIC_ALIASES, METRICS, MODES, PASS, STENCILS, UNIFORM

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

MODULE_ERRORS = (GraphBuildError, PointOutsideDomainError, PreconditionError, UnreachableNodeError,
                 EmptyPathError, DegeneratePairError, TooFewPairsError, AnchorApproachError,
                 UnmatchedWaypointError, ConstraintError, EtaInversionError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='experiment configuration file (JSON)')
    common.add_argument('--domain', help='domain file (JSON)')
    common.add_argument('--h', dest='h_coarse', type=float, help='coarse grid spacing')
    common.add_argument('--whitney', dest='whitney_c', type=float, help='Whitney constant')
    common.add_argument('--stencil', dest='neighbor_stencil', choices=sorted(STENCILS), help='neighbor stencil')
    common.add_argument('--max-depth', dest='max_depth', type=int, help='maximum refinement depth')
    common.add_argument('--max-nodes', dest='max_nodes', type=int, help='node budget')
    common.add_argument('--seed', type=int, help='random seed')
    common.add_argument('--output', help='output file; standard output when omitted')
    common.add_argument('--format', dest='fmt', choices=('json', 'csv', 'text'), help='output format')
    common.add_argument('--verbose', action='store_true', help='log progress to standard error')
    return common


def build_parser():
    """
    Creates the argument parser with every subcommand.

    :returns: :py:class:`argparse.ArgumentParser`
    """
    common = _common_options()
    parser = _Parser(prog='qhgeo', description='Quasihyperbolic geometry experiments on planar domains.')
    commands = parser.add_subparsers(dest='command', parser_class=_Parser)
    commands.required = True

    sub = commands.add_parser('domain', parents=[common], help='describe a domain or dump its graph')
    sub.add_argument('action', choices=('info', 'graph'))

    for name in ('dist', 'geodesic'):
        sub = commands.add_parser(name, parents=[common], help='distance or geodesic between two points')
        sub.add_argument('--metric', default='inner', choices=sorted(set(METRICS) | set(METRIC_ALIASES)))
        sub.add_argument('--from', dest='source', required=True, help='first point x,y')
        sub.add_argument('--to', dest='target_point', required=True, help='second point x,y')
        sub.add_argument('--epsilon', type=float, help='deformation strength')
        sub.add_argument('--base', help='deformation base point x,y; the deepest node when omitted')

    sub = commands.add_parser('uniformity', parents=[common], help='estimate a John or uniformity coefficient')
    sub.add_argument('--mode', default=UNIFORM, choices=MODES)
    sub.add_argument('--pairs', type=int)

    sub = commands.add_parser('delta', parents=[common], help='estimate the hyperbolicity constant')
    sub.add_argument('--quadruples', type=int)
    sub.add_argument('--pool', type=int, default=64, help='number of sampled points')

    sub = commands.add_parser('visual', parents=[common], help='visual metametric table of boundary anchors')
    sub.add_argument('--tau', type=float)
    sub.add_argument('--anchors', type=int)
    sub.add_argument('--approach-depth', dest='approach_depth', type=int)

    for name in ('qs-check', 'property-b'):
        sub = commands.add_parser(name, parents=[common], help='checks of a sampled map')
        sub.add_argument('--target', help='target domain file; the source domain when omitted')
        sub.add_argument('--map', help='sampled map file; the identity correspondence when omitted')
        sub.add_argument('--pairs', type=int)
        sub.add_argument('--triples', type=int)
        sub.add_argument('--bins', type=int)

    sub = commands.add_parser('property-a', parents=[common], help='hyperbolicity and natural map check')
    sub.add_argument('--tau', type=float)
    sub.add_argument('--anchors', type=int)
    sub.add_argument('--approach-depth', dest='approach_depth', type=int)
    sub.add_argument('--quadruples', type=int)
    sub.add_argument('--triples', type=int)
    sub.add_argument('--bins', type=int)

    sub = commands.add_parser('constants', parents=[common], help='evaluate the constant ledger')
    sub.add_argument('--M', dest='M', type=float, required=True)
    sub.add_argument('--C', dest='C', type=float, required=True)
    sub.add_argument('--eta', default='pow:1:1', help='pow:a:b or affine:a:c')
    sub.add_argument('--monotonicity', action='store_true', help='also check monotonicity on a 4-point grid')

    sub = commands.add_parser('inequalities', parents=[common], help='batch checks of quasihyperbolic estimates')
    sub.add_argument('--pairs', type=int)
    sub.add_argument('--tolerance', type=float)

    return parser


def load_config(args):
    """
    Reads the configuration file, if any, and applies command line overrides.

    :returns: :py:class:`~qhgeo.config.ExperimentConfig`

    :raises: :py:class:`~qhgeo.util.ConfigError`
    """
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()

    overrides = dict((name, getattr(args, name, None)) for name in
                     ('domain', 'target', 'map', 'seed', 'pairs', 'quadruples', 'triples', 'anchors',
                      'approach_depth', 'tau', 'bins', 'output'))
    grid = dict((name, getattr(args, name, None)) for name in
                ('h_coarse', 'whitney_c', 'neighbor_stencil', 'max_depth', 'max_nodes'))

    return config.update(grid=grid, **overrides)


class Runner(object):
    """
    Executes one parsed invocation.
    """

    def __init__(self, args, config, stdout=None):
        """
        Constructor

        :param args: parsed arguments
        :type args: :py:class:`argparse.Namespace`
        :param config: experiment configuration
        :type config: :py:class:`~qhgeo.config.ExperimentConfig`
        :param stdout: stream used when no output file is configured
        """
        self.args = args
        self.config = config
        self.stdout = stdout if stdout is not None else sys.stdout
        self._graphs = {}

    def run(self):
        handler = getattr(self, 'cmd_' + self.args.command.replace('-', '_'))
        return handler()

    ### Helpers
    def domain(self, path=None):
        path = path if path is not None else self.config.domain
        if not path:
            raise ConfigError('A domain file is required (--domain or the configuration file)')

        try:
            return load_domain(path)
        except (IOError, OSError) as err:
            raise ConfigError('Cannot read domain {0}: {1}'.format(path, err))

    def graph(self, path=None):
        path = path if path is not None else self.config.domain
        if path not in self._graphs:
            builder = GraphBuilder(self.domain(path), self.config.grid)
            if self.args.verbose:
                builder.on_level += self._on_level
                builder.on_built += self._on_built
            self._graphs[path] = builder.build()
        return self._graphs[path]

    def _on_level(self, builder, level, cells, leaves):
        logger.info('level %d: %d cells, %d leaves', level, cells, leaves)

    def _on_built(self, builder, graph):
        logger.info('graph: %d nodes, %d edges', graph.node_count, graph.edge_count)

    def sampled_map(self):
        graphG = self.graph()
        graphY = self.graph(self.config.target) if self.config.target else graphG

        if self.config.map:
            return graphG, graphY, SampledMap.from_file(self.config.map)

        m = SampledMap.identity(graphG.spec, graphY.spec, count=max(16, self.config.pairs // 4),
                                boundary_count=self.config.anchors, seed=self.config.seed)
        return graphG, graphY, m

    def anchors(self, graph):
        return graph.spec.boundary_sample(self.config.anchors, self.config.seed)

    def fmt(self, default):
        return self.args.fmt or default

    def emit(self, payload=None, rows=None, text=None):
        """
        Writes JSON, CSV rows or plain text to the output file or stream.
        """
        buf = io.StringIO()
        if rows is not None:
            writer = csv.writer(buf, lineterminator='\n')
            writer.writerows(rows)
        elif text is not None:
            buf.write(text + '\n')
        else:
            buf.write(json.dumps(payload, indent=2, sort_keys=True) + '\n')

        if self.config.output:
            with io.open(self.config.output, 'w', encoding='utf-8', newline='') as f:
                f.write(buf.getvalue())
        else:
            self.stdout.write(buf.getvalue())

    def _deform(self, graph, metric):
        if metric != DEFORMED:
            return None
        if self.args.epsilon is None:
            raise ConfigError('--epsilon is required for the deformed metric')

        if self.args.base:
            node = int(engine_for(graph).snap([parse_point(self.args.base)])[0])
            if node < 0:
                raise ConfigError('Base point {0} is not resolved by the graph'.format(self.args.base))
        else:
            node = choose_base_point(graph).node

        return DeformSpec(node, self.args.epsilon)

    ### Subcommands
    def cmd_domain(self):
        if self.args.action == 'graph':
            self.emit(self.graph().dict())
            return EXIT_OK

        spec = self.domain()
        graph = self.graph()
        self.emit(dict(
            domain          = spec.dict(),
            bounds          = list(spec.bounds),
            diameter_bound  = spec.diameter_bound,
            components      = len(spec.components),
            nodes           = graph.node_count,
            edges           = graph.edge_count,
            grid            = graph.params.dict(),
        ))
        return EXIT_OK

    def cmd_dist(self):
        graph = self.graph()
        metric = resolve_metric(self.args.metric)
        x, y = parse_point(self.args.source), parse_point(self.args.target_point)
        distance, _ = engine_for(graph).solve(x, y, metric, self._deform(graph, metric))

        if self.fmt('text') == 'text':
            self.emit(text=repr(distance))
        else:
            self.emit(dict(metric=metric, x=list(x), y=list(y), distance=distance))
        return EXIT_OK

    def cmd_geodesic(self):
        graph = self.graph()
        metric = resolve_metric(self.args.metric)
        x, y = parse_point(self.args.source), parse_point(self.args.target_point)
        _, path = engine_for(graph).solve(x, y, metric, self._deform(graph, metric), walk=True)
        self.emit(path.dict())
        return EXIT_OK

    def cmd_uniformity(self):
        graph = self.graph()
        estimator = UniformityEstimator(graph, self.args.mode)
        estimate = estimator.estimate(self.config.pairs, self.config.seed)

        if self.fmt('json') == 'csv':
            self.emit(rows=[list(PAIR_FIELDS)] + [r.row() for r in estimate.records])
        else:
            self.emit(estimate.dict(threshold=self.config.thresholds.uniformity))

        if estimate.M_hat is None or estimate.M_hat > self.config.thresholds.uniformity:
            logger.warning('Estimated coefficient %s exceeds %s', estimate.M_hat, self.config.thresholds.uniformity)
            return EXIT_CHECK_FAILED
        return EXIT_OK

    def cmd_delta(self):
        estimate = estimate_delta(self.graph(), self.config.quadruples, self.config.seed, self.args.pool)
        self.emit(estimate.dict(threshold=self.config.thresholds.delta))
        return EXIT_OK if estimate.delta_hat <= self.config.thresholds.delta else EXIT_CHECK_FAILED

    def cmd_visual(self):
        graph = self.graph()
        table = visual_table(graph, choose_base_point(graph), self.config.tau, self.anchors(graph),
                             self.config.approach_depth, self.config.thresholds.tau_cap)

        if self.fmt('csv') == 'csv':
            self.emit(rows=table.rows())
        else:
            self.emit(table.dict())
        return EXIT_OK

    def cmd_qs_check(self):
        graphG, graphY, m = self.sampled_map()
        if len(m.boundary_pairs) < 3:
            raise TooFewPairsError('The map needs at least 3 boundary pairs')

        src = boundary_inner_distances(graphG, m.boundary_pairs[:, 0, :], self.config.approach_depth)
        images = m.boundary_pairs[:, 1, :]
        dst = np.hypot(images[:, None, 0] - images[None, :, 0], images[:, None, 1] - images[None, :, 1])
        envelope = qs_envelope(src, dst, self.config.triples, self.config.seed, self.config.bins)

        if self.fmt('csv') == 'csv':
            self.emit(rows=envelope.rows())
        else:
            self.emit(envelope.dict())

        majorant = envelope.majorant()
        if not envelope.finite or (len(majorant) and majorant[-1] > self.config.thresholds.envelope_cap):
            return EXIT_CHECK_FAILED
        return EXIT_OK

    def cmd_property_b(self):
        graphG, graphY, m = self.sampled_map()
        verdict = property_b_verdict(graphG, graphY, m, self.config.thresholds, self.config.pairs,
                                     self.config.seed, self.config.triples, self.config.bins)
        self.emit(verdict.dict())
        return EXIT_OK if verdict.overall == PASS else EXIT_CHECK_FAILED

    def cmd_property_a(self):
        graph = self.graph()
        verdict = property_a_verdict(graph, choose_base_point(graph), self.config.tau, self.anchors(graph),
                                     self.config.thresholds, self.config.quadruples, self.config.seed,
                                     self.config.triples, self.config.bins, self.config.approach_depth)
        self.emit(verdict.dict())
        return EXIT_OK if verdict.overall == PASS else EXIT_CHECK_FAILED

    def cmd_constants(self):
        eta = ledger.parse_eta(self.args.eta)
        M, C = self.args.M, self.args.C
        result = ledger.compute_ledger(M, C, eta).dict()

        status = EXIT_OK
        if self.args.monotonicity:
            report = ledger.ledger_monotonicity_report([(M, C), (M, C + 1), (M + 1, C + 1), (M + 1, C + 2)], eta)
            result['monotone'] = report.monotone
            result['violations'] = [list(v) for v in report.violations]
            if not report.monotone:
                status = EXIT_CHECK_FAILED

        self.emit(result)
        return status

    def cmd_inequalities(self):
        tolerance = self.args.tolerance if self.args.tolerance is not None else self.config.thresholds.tolerance
        report = run_inequalities(self.graph(), self.config.pairs, self.config.seed, tolerance)

        if self.fmt('csv') == 'csv':
            self.emit(rows=report.rows())
        else:
            self.emit(report.dict())
        return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def main(argv=None, stdout=None, stderr=None):
    """
    Entry point.

    :param argv: arguments without the program name
    :type argv: list of strings

    :returns: exit status
    """
    stderr = stderr if stderr is not None else sys.stderr

    try:
        args = build_parser().parse_args(argv)
    except UsageError as err:
        stderr.write('qhgeo: {0}\n'.format(err))
        return EXIT_USAGE

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=stderr, format='%(name)s %(levelname)s: %(message)s')

    try:
        config = load_config(args)
        return Runner(args, config, stdout).run()
    except (ConfigError, DomainSpecError) as err:
        stderr.write('qhgeo {0}: {1}\n'.format(args.command, err))
        return EXIT_USAGE
    except MODULE_ERRORS as err:
        stderr.write('qhgeo {0}: {1}: {2}\n'.format(args.command, type(err).__name__, err))
        return EXIT_CHECK_FAILED


if __name__ == '__main__':
    sys.exit(main())
