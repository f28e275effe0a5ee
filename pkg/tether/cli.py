'''
Command line interface. Call it like this::

    python -m tether.cli fit --edges graph.tsv --features nodes.csv --k 2 --out results/
    python -m tether.cli baseline --method sc --edges graph.tsv --k 2 --out results/
    python -m tether.cli simulate --grid desk --methods jcdc_w5,sc,km --seed 7 --out results/
    python -m tether.cli verify --r 0.25 --out results/

Every command accepts ``--config FILE.yaml``; flags given on the command line
override the values in the file. Every command writes ``manifest.yaml`` next to
its outputs.

Exit codes: 0 success, 1 failed verification, 2 unreadable input,
3 graph and feature dimensions disagree, 4 invalid flags or configuration.
'''

import argparse
import logging
import os
import sys
import time
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from ruamel.yaml import YAMLError

from ._yaml import get_yaml
from .baselines import kmeans, spectral_clustering
from .errors import ConfigurationError, DimensionMismatch, InvalidGraph, ParseError, VerificationFailed
from .features import build_similarities, expand_categorical, parse_kinds, read_features
from .graph import drop_isolated, read_edge_list
from .harness import emit_heatmap_data, run_grid, write_summary
from .manifest import save_manifest, start_manifest
from .metrics import nmi
from .optimizer import fit_similarities
from .policy import DEFAULT_STARTS, FitPolicy, Initializer
from .serializers import (
    BaselineSerializer, CheckReportSerializer, FitOutputSerializer, FitSerializer, SimulateSerializer,
    VerifySerializer, render_json,
)
from .types import FeatureTable, Graph, Partition, SpectralConfig
from .verify import run_verification

# Django is configured once .serializers is imported
from rest_framework.exceptions import ValidationError  # noqa: E402

logger = logging.getLogger('tether.cli')

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_FLAGS = 4

RESULT_NAME = 'result.json'
SUMMARY_NAME = 'summary.json'
REPORT_NAME = 'report.json'

#: Keys naming files or directories rather than configuration values
PATH_KEYS = ('edges', 'features', 'reference', 'out')

INITIALIZERS = {
    'joint': lambda: DEFAULT_STARTS,
    'spectral': lambda: (Initializer.Spectral(fallback=Initializer.RandomBalanced()),),
    'kmeans': lambda: (Initializer.KMeansFeatures(fallback=Initializer.RandomBalanced()),),
    'random': lambda: (Initializer.RandomBalanced(),),
}


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f'{self.prog}: error: {message}\n')


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument('-v', '--verbose', action='count', default=0, help='-v for progress, -vv for debug output')
    common.add_argument('--config', help='YAML file with default values for the flags')
    common.add_argument('--out', help='output directory (default: current directory)')
    common.add_argument('--seed', type=int)

    data = ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    data.add_argument('--edges', help='tab separated edge list')
    data.add_argument('--features', help='feature CSV with a node_id column')
    data.add_argument('--kinds', help='column kinds, e.g. cont,cat,ord')
    data.add_argument('--k', type=int)
    data.add_argument('--reference', help='reference labels to compare against with NMI')
    data.add_argument('--drop-isolated', action='store_true', help='remove zero-degree nodes before fitting')

    parser = ArgumentParser(prog='tether', description='Joint network and feature community detection')
    commands = parser.add_subparsers(dest='command', required=True)

    fit = commands.add_parser('fit', parents=[common, data], argument_default=argparse.SUPPRESS,
                              help='fit communities and feature coefficients')
    fit.add_argument('--alpha', type=float)
    fit.add_argument('--w', type=float, help='edge weight parameter w_n')
    fit.add_argument('--lambda', dest='lam', type=float, help='l1 penalty on the coefficients')
    fit.add_argument('--mbeta', type=float, help='bound on the coefficient norm')
    fit.add_argument('--min-size', type=int)
    fit.add_argument('--restarts', type=int)
    fit.add_argument('--tenure', type=int)
    fit.add_argument('--max-sweeps', type=int)
    fit.add_argument('--max-iters', type=int)
    fit.add_argument('--initializer', help='joint (spectral and k-means starts, default), spectral, kmeans or random')
    fit.add_argument('--min-variance', type=float)
    fit.add_argument('--standardize', action='store_true')

    baseline = commands.add_parser('baseline', parents=[common, data], argument_default=argparse.SUPPRESS,
                                   help='run spectral clustering or k-means')
    baseline.add_argument('--method', help='sc or km')
    baseline.add_argument('--tau', type=float)
    baseline.add_argument('--n-starts', type=int)
    baseline.add_argument('--row-normalize', action='store_true')

    simulate = commands.add_parser('simulate', parents=[common], argument_default=argparse.SUPPRESS,
                                   help='run the simulation grid')
    simulate.add_argument('--grid', help='desk or paper')
    simulate.add_argument('--methods', help='comma separated subset of jcdc_w5,jcdc_w15,sc,km')
    simulate.add_argument('--replications', type=int)
    simulate.add_argument('--r-values')
    simulate.add_argument('--mu-values')
    simulate.add_argument('--n-noise', type=int)
    simulate.add_argument('--workers', type=int)

    verify = commands.add_parser('verify', parents=[common], argument_default=argparse.SUPPRESS,
                                 help='numerically check the consistency theory')
    verify.add_argument('--within-prob', type=float)
    verify.add_argument('--r', type=float)
    verify.add_argument('--community-sizes')
    verify.add_argument('--alpha', type=float)
    verify.add_argument('--w', type=float)
    verify.add_argument('--mbeta', type=float)
    verify.add_argument('--mphi', type=float)
    verify.add_argument('--samples', type=int)
    verify.add_argument('--instances', type=int)
    verify.add_argument('--replicates', type=int)
    verify.add_argument('--sizes')
    verify.add_argument('--mc-samples', type=int)
    verify.add_argument('--mu', type=float)
    return parser


def read_config(path: str) -> Dict:
    with open(path, 'r') as f:
        try:
            data = get_yaml().load(f)
        except YAMLError as e:
            mark = getattr(e, 'problem_mark', None)
            raise ParseError(str(getattr(e, 'problem', None) or e), path, mark.line + 1 if mark else 0)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ParseError('expected a mapping of option names to values', path, 1)
    return dict(data)


def resolve_options(args: argparse.Namespace) -> Dict:
    '''
    Merges the ``--config`` file with the flags given on the command line, flags taking precedence.
    '''
    flags = {key: value for key, value in vars(args).items() if key not in ('command', 'verbose', 'config')}
    options = read_config(args.config) if getattr(args, 'config', None) else {}
    options.update(flags)
    return options


def validate(serializer_class, options: Dict):
    serializer = serializer_class(data={key: value for key, value in options.items() if key not in PATH_KEYS})
    serializer.is_valid(raise_exception=True)
    return serializer


def output_directory(options: Dict) -> str:
    out = options.get('out') or '.'
    os.makedirs(out, exist_ok=True)
    return out


def read_reference(path: str, n: int) -> Partition:
    '''
    Reads reference labels, either one label per line in node order or
    ``node_id,label`` rows. An optional header row is skipped.
    '''
    try:
        frame = pd.read_csv(path, header=None, dtype=str, comment='#', skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ParseError(str(e).strip(), path, 1)
    first = 1
    if len(frame) and not str(frame.iat[0, -1]).strip().lstrip('-').isdigit():
        frame, first = frame.iloc[1:], 2
    if frame.shape[1] > 2:
        raise ParseError(f'expected "label" or "node_id,label", got {frame.shape[1]} fields', path, first)

    numeric = frame.apply(lambda column: pd.to_numeric(column.str.strip(), errors='coerce')).to_numpy(dtype=float)
    filled = np.nan_to_num(numeric, nan=-1.0)
    invalid = (filled != np.round(filled)) | (filled < 0)
    if invalid.any():
        row, column = np.argwhere(invalid)[0]
        raise ParseError(f'expected a nonnegative integer, got "{frame.iat[row, column]}"', path, first + int(row))

    values = filled.astype(np.intp)
    if values.shape[1] == 1:
        nodes, labels = np.arange(len(values)), values[:, 0]
    else:
        nodes, labels = values[:, 0], values[:, 1]
    duplicated = pd.Series(nodes).duplicated().to_numpy()
    if duplicated.any():
        row = int(np.flatnonzero(duplicated)[0])
        raise ParseError(f'duplicate label for node {nodes[row]}', path, first + row)
    if len(nodes) != n or (len(nodes) and nodes.max() >= n):
        raise DimensionMismatch(f'{path}: reference labels cover {len(nodes)} nodes, expected node ids 0..{n - 1}')

    ordered = np.empty(n, dtype=np.intp)
    ordered[nodes] = labels
    return Partition(ordered, int(ordered.max()) + 1 if n else 1)


class Inputs:
    '''
    The graph, features and reference labels of a ``fit`` or ``baseline`` run,
    after optional removal of isolated nodes.
    '''

    def __init__(self, options: Dict, kinds: Optional[str], need_edges: bool = True, need_features: bool = True):
        self.paths = {key: options[key] for key in ('edges', 'features', 'reference') if options.get(key)}
        for key, needed in (('edges', need_edges), ('features', need_features)):
            if needed and key not in self.paths:
                raise ConfigurationError(f'--{key} is required')

        self.features: Optional[FeatureTable] = None
        self.graph: Optional[Graph] = None
        if 'features' in self.paths:
            self.features = read_features(self.paths['features'], parse_kinds(kinds) if kinds else None)
        if 'edges' in self.paths:
            self.graph = read_edge_list(self.paths['edges'], self.features.n if self.features is not None else None)
        self.n = self.graph.n if self.graph is not None else self.features.n

        self.kept = np.arange(self.n)
        if options.get('drop_isolated'):
            if self.graph is None:
                raise ConfigurationError('--drop-isolated needs --edges')
            self.graph, self.kept = drop_isolated(self.graph)
            if self.features is not None:
                self.features = self.features.take(self.kept)

        self.reference: Optional[Partition] = None
        if 'reference' in self.paths:
            self.reference = read_reference(self.paths['reference'], self.n).take(self.kept)

    @property
    def dropped(self) -> List[int]:
        return [int(x) for x in np.setdiff1d(np.arange(self.n), self.kept)]

    def full_labels(self, partition: Partition) -> List[Optional[int]]:
        labels: List[Optional[int]] = [None] * self.n
        for node, label in zip(self.kept, partition.labels):
            labels[int(node)] = int(label)
        return labels


def _write_result(out: str, payload: Dict) -> str:
    path = os.path.join(out, RESULT_NAME)
    with open(path, 'wb') as f:
        f.write(render_json(FitOutputSerializer(payload).data))
    logger.info(f'Wrote {path}')
    return path


def _base_payload(command: str, method: str, inputs: Inputs, config: Dict, started: float) -> Dict:
    return {
        'schema_version': FitOutputSerializer.SCHEMA_VERSION,
        'command': command,
        'method': method,
        'dropped_nodes': inputs.dropped,
        'config': config,
        'inputs': inputs.paths,
        'timing': {'wall_time': time.perf_counter() - started},
    }


def cmd_fit(options: Dict) -> int:
    started = time.perf_counter()
    serializer = validate(FitSerializer, options)
    data = serializer.validated_data
    config = serializer.to_config()
    inputs = Inputs(options, data.get('kinds'))
    manifest = start_manifest('fit', data, inputs.paths.values(), config.seed)

    features = expand_categorical(inputs.features)
    sims = build_similarities(features, min_variance=data['min_variance'], standardize_features=data['standardize'])
    policy = FitPolicy(initializers=INITIALIZERS[data['initializer']]())
    result = fit_similarities(inputs.graph, sims, config, policy)
    logger.info(f'Fit finished after {result.iterations} iterations, criterion {result.criterion:.6f}')

    payload = _base_payload('fit', 'jcdc', inputs, data, started)
    payload.update({
        'labels': inputs.full_labels(result.partition),
        'betas': [
            {'community': k, 'coefficients': dict(zip(result.feature_names, row))}
            for k, row in enumerate(result.betas.values.tolist())
        ],
        'trace': list(result.trace),
        'criterion': result.criterion,
        'converged': result.converged,
        'iterations': result.iterations,
        'feature_names': list(result.feature_names),
    })
    if inputs.reference is not None:
        payload['reference_nmi'] = {
            'jcdc': nmi(result.partition, inputs.reference),
            'sc': nmi(spectral_clustering(inputs.graph, SpectralConfig(k=config.k, seed=config.seed)), inputs.reference),
            'km': nmi(kmeans(inputs.features, config.k, seed=config.seed), inputs.reference),
        }
    payload['timing'] = {'wall_time': time.perf_counter() - started}

    out = output_directory(options)
    save_manifest(manifest, out, [_write_result(out, payload)])
    return EXIT_OK


def cmd_baseline(options: Dict) -> int:
    started = time.perf_counter()
    serializer = validate(BaselineSerializer, options)
    data = serializer.validated_data
    method = data['method']
    inputs = Inputs(options, data.get('kinds'), need_edges=method == 'sc', need_features=method == 'km')
    manifest = start_manifest('baseline', data, inputs.paths.values(), data['seed'])

    if method == 'sc':
        config = SpectralConfig(
            k=data['k'], tau=data['tau'], seed=data['seed'], n_starts=data['n_starts'], row_normalize=data['row_normalize'],
        )
        partition = spectral_clustering(inputs.graph, config)
    else:
        partition = kmeans(inputs.features, data['k'], n_starts=data['n_starts'], seed=data['seed'])

    payload = _base_payload('baseline', method, inputs, data, started)
    payload['labels'] = inputs.full_labels(partition)
    if inputs.reference is not None:
        payload['reference_nmi'] = {method: nmi(partition, inputs.reference)}

    out = output_directory(options)
    save_manifest(manifest, out, [_write_result(out, payload)])
    return EXIT_OK


def cmd_simulate(options: Dict) -> int:
    serializer = validate(SimulateSerializer, options)
    spec = serializer.to_spec()
    data = serializer.validated_data
    manifest = start_manifest('simulate', data, seed=spec.seed)

    result = run_grid(spec, workers=data['workers'])
    out = output_directory(options)
    outputs = emit_heatmap_data(result, out)
    path = os.path.join(out, SUMMARY_NAME)
    with open(path, 'wb') as f:
        write_summary(result, f)
    logger.info(f'Wrote {path}')
    save_manifest(manifest, out, outputs + [path])

    for method in spec.methods:
        means = result.matrix(method)
        print(f'{method}: mean NMI {np.nanmean(means):.4f} over {means.size} cells')
    return EXIT_OK


def cmd_verify(options: Dict) -> int:
    started = time.perf_counter()
    serializer = validate(VerifySerializer, options)
    data = serializer.validated_data
    config = serializer.to_config()
    manifest = start_manifest('verify', data, seed=config.seed)

    report = run_verification(config)
    for item in report.items:
        print(f'{item.status.name:<13} {item.name:<17} {item.detail}')

    payload = {
        'schema_version': CheckReportSerializer.SCHEMA_VERSION,
        'command': 'verify',
        'ok': report.ok,
        'items': list(report.items),
        'config': data,
        'timing': {'wall_time': time.perf_counter() - started},
    }
    out = output_directory(options)
    path = os.path.join(out, REPORT_NAME)
    with open(path, 'wb') as f:
        f.write(render_json(CheckReportSerializer(payload).data))
    save_manifest(manifest, out, [path])

    if not report.ok:
        names = ', '.join(item.name for item in report.failures())
        raise VerificationFailed(names, 'check failed')
    return EXIT_OK


COMMANDS = {
    'fit': cmd_fit,
    'baseline': cmd_baseline,
    'simulate': cmd_simulate,
    'verify': cmd_verify,
}


def _describe(detail, prefix: str = '') -> List[str]:
    if isinstance(detail, dict):
        return [line for key, value in detail.items() for line in _describe(value, f'{prefix}{key}.')]
    if isinstance(detail, list):
        return [line for value in detail for line in _describe(value, prefix)]
    return [f'{prefix.rstrip(".") or "error"}: {detail}']


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')

    try:
        return COMMANDS[args.command](resolve_options(args))
    except ValidationError as e:
        for line in _describe(e.detail):
            print(f'invalid option {line}', file=sys.stderr)
        return EXIT_FLAGS
    except ConfigurationError as e:
        print(f'invalid configuration: {e}', file=sys.stderr)
        return EXIT_FLAGS
    except DimensionMismatch as e:
        print(f'dimension mismatch: {e}', file=sys.stderr)
        return EXIT_DIMENSION
    except (ParseError, InvalidGraph) as e:
        print(f'parse error: {e}', file=sys.stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f'cannot read input: {e}', file=sys.stderr)
        return EXIT_PARSE
    except VerificationFailed as e:
        print(f'verification failed: {e}', file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == '__main__':
    sys.exit(main())
