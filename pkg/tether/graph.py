'''
Graph generation under the degree-corrected stochastic block model and
edge-list file I/O.

The edge-list format has one undirected edge per line, listed once::

    # comment
    0	1
    0	2	0.5

Node ids are 0-based, fields are tab-separated and a missing weight means 1.0.
'''

import logging
from typing import IO, List, Optional, Tuple, Union

import numpy as np

from ._util import iter_pair_rows, make_rng
from .errors import DimensionMismatch, ParseError
from .types import Graph, Partition, SbmConfig

logger = logging.getLogger('tether.graph')


def _row_probabilities(config: SbmConfig, theta: np.ndarray, labels: np.ndarray, blocks: np.ndarray, i: int, j: np.ndarray) -> np.ndarray:
    raw = theta[i] * theta[j] * config.density_scale * blocks[labels[i], labels[j]]
    return np.minimum(config.prob_cap, raw)


def generate_dcsbm(config: SbmConfig, replicate: int = 0) -> Tuple[Graph, Partition]:
    '''
    Draws a binary graph where pair ``(i, j)`` is an edge with probability
    ``min(prob_cap, theta_i * theta_j * density_scale * P[c_i, c_j])``.

    Uniform draws are consumed in row-major order over ``i < j`` from a PCG64
    stream keyed by ``(config.seed, replicate)``, so a given config and
    replicate always yield the same graph.
    '''
    partition = config.partition()
    labels = partition.labels
    theta = config.thetas()
    blocks = config.block_matrix()
    rng = make_rng(config.seed, replicate)

    src: List[np.ndarray] = []
    dst: List[np.ndarray] = []
    for i, j in iter_pair_rows(config.n):
        prob = _row_probabilities(config, theta, labels, blocks, i, j)
        hits = j[rng.random(len(j)) < prob]
        src.append(np.full(len(hits), i, dtype=np.intp))
        dst.append(hits)

    src_all = np.concatenate(src) if src else np.zeros(0, dtype=np.intp)
    dst_all = np.concatenate(dst) if dst else np.zeros(0, dtype=np.intp)
    graph = Graph.from_edges(config.n, src_all, dst_all)
    logger.debug(f'Generated DCSBM graph: n={config.n}, edges={graph.edge_count}, seed={config.seed}, replicate={replicate}')
    return graph, partition


def expected_degree(config: SbmConfig) -> np.ndarray:
    '''
    Expected degree of every node under the capped edge probabilities.
    '''
    labels = config.partition().labels
    theta = config.thetas()
    blocks = config.block_matrix()
    degree = np.zeros(config.n)
    for i, j in iter_pair_rows(config.n):
        prob = _row_probabilities(config, theta, labels, blocks, i, j)
        degree[i] += prob.sum()
        degree[j] += prob
    return degree


def drop_isolated(graph: Graph) -> Tuple[Graph, np.ndarray]:
    '''
    Removes zero-degree nodes. Returns the reduced graph and the original ids
    of the nodes that were kept.
    '''
    kept = np.flatnonzero(graph.degrees > 0)
    if len(kept) == graph.n:
        return graph, kept
    logger.info(f'Dropping {graph.n - len(kept)} isolated nodes')
    return graph.subgraph(kept), kept


def read_edge_list(source: Union[str, IO[str]], n: Optional[int] = None) -> Graph:
    '''
    Parses an edge list.

    :param n: node count; defaults to a ``# n=<count>`` header line if present,
        otherwise one more than the largest node id seen
    '''
    path = source if isinstance(source, str) else getattr(source, 'name', '<stream>')
    if isinstance(source, str):
        with open(source, 'r') as f:
            lines = f.readlines()
    else:
        lines = source.readlines()

    src, dst, weight = [], [], []
    declared = None
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip('\r\n')
        if line.lstrip().startswith('#'):
            header = line.lstrip('# ')
            if header.startswith('n=') and header[2:].isdigit():
                declared = int(header[2:])
            continue
        if not line.strip():
            continue
        fields = line.split('\t')
        if len(fields) not in (2, 3):
            raise ParseError(f'expected "src<TAB>dst[<TAB>weight]", got {len(fields)} fields', path, lineno)
        try:
            i, j = int(fields[0]), int(fields[1])
            w = float(fields[2]) if len(fields) == 3 else 1.0
        except ValueError as e:
            raise ParseError(str(e), path, lineno)
        if i < 0 or j < 0:
            raise ParseError('node ids must be nonnegative', path, lineno)
        if i == j:
            raise ParseError(f'self-loop on node {i}', path, lineno)
        if not np.isfinite(w) or w < 0:
            raise ParseError(f'edge weight must be finite and nonnegative, got {fields[2]}', path, lineno)
        src.append(i)
        dst.append(j)
        weight.append(w)

    top = max(max(src, default=-1), max(dst, default=-1)) + 1
    if n is None:
        n = max(top, declared or 0)
    else:
        if top > n:
            raise DimensionMismatch(f'{path}: node id {top - 1} outside the {n} known nodes')
        if declared is not None and declared != n:
            raise DimensionMismatch(f'{path}: header declares {declared} nodes, expected {n}')
    logger.debug(f'Read {len(src)} edges over {n} nodes from {path}')
    return Graph.from_edges(n, src, dst, weight)


def write_edge_list(graph: Graph, stream: IO[str]):
    src, dst, weight = graph.edges()
    stream.write(f'# n={graph.n}\n')
    for i, j, w in zip(src, dst, weight):
        if w == 1.0:
            stream.write(f'{i}\t{j}\n')
        else:
            stream.write(f'{i}\t{j}\t{float(w)!r}\n')
