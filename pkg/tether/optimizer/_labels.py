import logging
import math
from typing import Optional, Tuple

import numpy as np

from .._util import make_rng, scaled
from ..errors import ConfigurationError, DimensionMismatch
from ..features import SimilaritySet
from ..policy import DEFAULT_WEIGHT, BaseWeightFunction
from ..types import BetaSet, FitConfig, Graph, Partition
from .base import NeighborTable, SwitchState

logger = logging.getLogger('tether.optimizer')

#: A move must raise the criterion by more than this to be accepted
IMPROVEMENT_TOL = 1e-12


def exact_switch_preference(state: SwitchState, i: int, k: int, l: int, alpha: Optional[float] = None) -> float:
    '''
    Criterion change when node ``i`` moves from its community ``l`` to ``k``.
    Positive means the move increases the criterion.
    '''
    if state.labels[i] != l:
        raise ValueError(f'Node {i} is in community {state.labels[i]}, not {l}')
    if k == l:
        return 0.0
    alpha = state.alpha if alpha is None else alpha
    cross_k, cross_l = state.cross[i, k], state.cross[i, l]
    without_l = state.internal[l] - 2 * cross_l
    size_k, size_l = state.sizes[k], state.sizes[l] - 1

    after = scaled(state.internal[k] + 2 * cross_k, size_k + 1, alpha) + scaled(without_l, size_l, alpha)
    before = scaled(state.internal[k], size_k, alpha) + scaled(without_l + 2 * cross_l, size_l + 1, alpha)
    return float(after - before)


def approx_switch_preference(state: SwitchState, i: int, k: int, l: int, alpha: Optional[float] = None) -> float:
    '''
    Local approximation of :func:`exact_switch_preference` for large
    communities: ``cross_k / |E_k| * (|E_k| / |E_l|)^(1 - alpha) - cross_l / |E_l|``,
    with ``|E_l|`` counted without ``i``. Falls back to the exact form when
    either community would be empty.
    '''
    if state.labels[i] != l:
        raise ValueError(f'Node {i} is in community {state.labels[i]}, not {l}')
    if k == l:
        return 0.0
    alpha = state.alpha if alpha is None else alpha
    size_k, size_l = state.sizes[k], state.sizes[l] - 1
    if size_k < 1 or size_l < 1:
        return exact_switch_preference(state, i, k, l, alpha)
    return float(state.cross[i, k] / size_k * (size_k / size_l) ** (1 - alpha) - state.cross[i, l] / size_l)


def repair_sizes(labels: np.ndarray, k: int, min_size: int, rng: np.random.Generator) -> np.ndarray:
    '''
    Moves random nodes out of the largest communities until every community has
    at least ``min_size`` members.
    '''
    if k * min_size > len(labels):
        raise ConfigurationError(f'{k} communities of at least {min_size} nodes do not fit into {len(labels)} nodes')
    labels = labels.copy()
    sizes = np.bincount(labels, minlength=k)
    while sizes.min() < min_size:
        small = int(np.argmin(sizes))
        large = int(np.argmax(sizes))
        node = rng.choice(np.flatnonzero(labels == large))
        labels[node] = small
        sizes[large] -= 1
        sizes[small] += 1
    return labels


def _perturb(labels: np.ndarray, k: int, fraction: float, min_size: int, rng: np.random.Generator) -> np.ndarray:
    labels = labels.copy()
    count = math.ceil(fraction * len(labels))
    nodes = rng.choice(len(labels), size=count, replace=False)
    labels[nodes] = rng.integers(0, k, size=count)
    return repair_sizes(labels, k, min_size, rng)


def _descend(state: SwitchState, config: FitConfig, rng: np.random.Generator) -> float:
    n = len(state.labels)
    order = rng.permutation(n)
    tabu_until = np.zeros(n, dtype=np.intp)
    min_size = config.min_community_size
    sweep = 0
    moves = 0
    while sweep < config.tabu.max_sweeps:
        moved = 0
        for i in order:
            if tabu_until[i] > sweep:
                continue
            l = state.labels[i]
            if state.sizes[l] - 1 < min_size:
                continue
            delta = state.preferences(i)
            delta[l] = -np.inf
            k = int(np.argmax(delta))
            if delta[k] > IMPROVEMENT_TOL:
                state.move(i, k)
                tabu_until[i] = sweep + 1 + config.tabu.tenure
                moved += 1
        sweep += 1
        moves += moved
        if not moved:
            if np.any(tabu_until > sweep):
                tabu_until[:] = 0
                continue
            break
    else:
        logger.debug(f'Tabu search hit the sweep cap of {config.tabu.max_sweeps}')

    state.recompute()
    logger.debug(f'Tabu descent: {moves} moves in {sweep} sweeps, criterion {state.criterion():.6f}')
    return state.criterion()


def search_labels(table: NeighborTable, partition: Partition, betas: BetaSet, config: FitConfig,
                  rng: np.random.Generator, weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> Tuple[Partition, float]:
    '''
    Tabu search over a prepared :class:`NeighborTable`. Returns the best
    partition over all restarts and its criterion; ties go to the earliest restart.
    '''
    weights = table.weights(betas, config.w_n, weight_function)
    start = repair_sizes(partition.labels, partition.k, config.min_community_size, rng)
    best_labels, best_value = None, -np.inf
    for restart in range(config.tabu.restarts):
        if restart:
            labels = _perturb(start, partition.k, config.tabu.perturb_fraction, config.min_community_size, rng)
        else:
            labels = start
        state = SwitchState(table, weights, labels, partition.k, config.alpha)
        value = _descend(state, config, rng)
        if value > best_value + IMPROVEMENT_TOL:
            best_labels, best_value = state.labels.copy(), value
            logger.debug(f'Restart {restart} improved the criterion to {value:.6f}')
    return Partition(best_labels, partition.k), best_value


def tabu_label_search(graph: Graph, sims: SimilaritySet, partition_init: Partition, betas: BetaSet, config: FitConfig,
                      weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> Partition:
    '''
    Greedy label switching with a tabu list under fixed coefficients.

    Nodes are visited in one shuffled order per restart. Each node moves to the
    community with the largest exact criterion gain if that gain is positive,
    after which it stays frozen for ``config.tabu.tenure`` sweeps. Moves that
    would leave a community with fewer than ``config.min_community_size`` nodes
    are rejected. The first restart starts from ``partition_init``, later ones
    from a random relabelling of a fraction of its nodes.
    '''
    if partition_init.n != graph.n:
        raise DimensionMismatch(f'Initial partition covers {partition_init.n} nodes, graph has {graph.n}')
    table = NeighborTable.build(graph, sims)
    partition, _ = search_labels(table, partition_init, betas, config, make_rng(config.seed), weight_function)
    return partition
