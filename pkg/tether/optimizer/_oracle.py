import itertools
import logging
from typing import Iterator, Tuple

import numpy as np

from .._util import scaled
from ..criterion import EdgeTable
from ..errors import ConfigurationError, DimensionMismatch, OracleTooLarge
from ..features import SimilaritySet
from ..policy import DEFAULT_WEIGHT, BaseWeightFunction
from ..types import BetaSet, FitConfig, Graph, Partition

logger = logging.getLogger('tether.optimizer')

#: Labelings evaluated per vectorized batch
BATCH = 1 << 15

#: Refuse enumerations larger than this
MAX_LABELINGS = 1 << 22


def _batches(n: int, k: int) -> Iterator[np.ndarray]:
    product = itertools.product(range(k), repeat=n)
    while True:
        chunk = list(itertools.islice(product, BATCH))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.intp)


def _canonical(labels: np.ndarray) -> np.ndarray:
    # First occurrences appear in increasing label order
    running = np.maximum.accumulate(labels, axis=1)
    return (labels[:, 0] == 0) & np.all(labels[:, 1:] <= running[:, :-1] + 1, axis=1)


def exhaustive_oracle(graph: Graph, sims: SimilaritySet, betas: BetaSet, config: FitConfig, max_n: int = 12,
                      weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> Tuple[Partition, float]:
    '''
    Evaluates the criterion on every labeling whose communities all have at
    least ``config.min_community_size`` nodes and returns the best one.

    Labelings equal up to renaming are evaluated once when all communities
    share the same coefficients. Ties go to the lexicographically smallest
    label vector.
    '''
    n, k = graph.n, config.k
    if n > max_n:
        raise OracleTooLarge(f'Refusing to enumerate labelings of {n} nodes, the limit is {max_n}')
    if k ** n > MAX_LABELINGS:
        raise OracleTooLarge(f'{k}^{n} labelings exceed the enumeration limit of {MAX_LABELINGS}')
    if betas.k != k or betas.p != sims.p:
        raise DimensionMismatch(f'Coefficients have shape {betas.values.shape}, expected ({k}, {sims.p})')

    table = EdgeTable.build(graph, sims)
    scores = table.phi @ betas.values.T
    edge_weights = table.weight[:, None] * weight_function.weight(scores, config.w_n)
    symmetric = bool(np.all(betas.values == betas.values[0]))
    edge_index = np.arange(len(table.src))

    best_labels, best_value = None, -np.inf
    for labels in _batches(n, k):
        if symmetric:
            labels = labels[_canonical(labels)]
        sizes = np.stack([(labels == c).sum(axis=1) for c in range(k)], axis=1)
        labels = labels[np.all(sizes >= config.min_community_size, axis=1)]
        sizes = sizes[np.all(sizes >= config.min_community_size, axis=1)]
        if not len(labels):
            continue

        community = labels[:, table.src]
        inside = community == labels[:, table.dst]
        contribution = np.where(inside, edge_weights[edge_index, community], 0.0)
        totals = np.stack([2 * (contribution * (community == c)).sum(axis=1) for c in range(k)], axis=1)
        values = scaled(totals, sizes, config.alpha).sum(axis=1)

        index = int(np.argmax(values))
        if values[index] > best_value:
            best_labels, best_value = labels[index].copy(), float(values[index])

    if best_labels is None:
        raise ConfigurationError(f'No labeling of {n} nodes into {k} communities of at least {config.min_community_size} nodes')
    logger.debug(f'Exhaustive search over {k}^{n} labelings: best criterion {best_value:.6f}')
    return Partition(best_labels, k), best_value
