import logging
import time
from typing import List, NamedTuple, Optional, Sequence

from .._util import make_rng
from ..criterion import EdgeTable, table_criterion
from ..errors import ConfigurationError, DimensionMismatch
from ..features import SimilaritySet, build_similarities
from ..policy import FitPolicy
from ..types import BetaSet, FeatureTable, FitConfig, FitResult, Graph, Partition, Similarity
from ._betas import fit_betas
from ._labels import repair_sizes, search_labels
from .base import NeighborTable

logger = logging.getLogger('tether.optimizer')

#: Outer iterations stop once labels are stable and the objective gains less than this
CONVERGENCE_TOL = 1e-8


def fit(graph: Graph, features: FeatureTable, measures: Optional[Sequence[Similarity]] = None,
        config: FitConfig = FitConfig(), policy: Optional[FitPolicy] = None,
        min_variance: float = 0.0, standardize_features: bool = False) -> FitResult:
    '''
    Fits communities and per-community feature coefficients by alternating a
    tabu label search (coefficients fixed) with proximal gradient ascent over
    the coefficients (labels fixed).

    :param measures: similarity per feature column, see :func:`tether.features.build_similarities`
    :param policy: initialisation and per-iteration hooks; defaults to :class:`FitPolicy`
    '''
    if features.n != graph.n:
        raise DimensionMismatch(f'Features cover {features.n} nodes, graph has {graph.n}')
    sims = build_similarities(features, measures, min_variance, standardize_features)
    return fit_similarities(graph, sims, config, policy)


def fit_similarities(graph: Graph, sims: SimilaritySet, config: FitConfig = FitConfig(),
                     policy: Optional[FitPolicy] = None) -> FitResult:
    '''
    :func:`fit` with prebuilt similarities.
    '''
    started = time.perf_counter()
    policy = policy or FitPolicy()
    if sims.n != graph.n:
        raise DimensionMismatch(f'Similarities cover {sims.n} nodes, graph has {graph.n}')
    if config.k > graph.n:
        raise ConfigurationError(f'Cannot split {graph.n} nodes into {config.k} communities')
    if config.k * config.min_community_size > graph.n:
        raise ConfigurationError(
            f'{config.k} communities of at least {config.min_community_size} nodes do not fit into {graph.n} nodes'
        )
    policy.check_weight_bound(config, sims.m_phi)

    weight_function = policy.weight_function
    edges = EdgeTable.build(graph, sims)
    rng = make_rng(config.seed)

    def objective(partition: Partition, betas: BetaSet) -> float:
        value = table_criterion(edges, partition.labels, partition.k, betas, config, weight_function)
        return value - config.lam * betas.l1()

    betas = BetaSet.zeros(config.k, sims.p)
    trace: List[float] = []

    if config.k == 1:
        partition = Partition.single(graph.n)
        betas = fit_betas(edges, partition, betas, config, weight_function)
        trace.append(objective(partition, betas))
        policy.post_beta_step(0, partition, betas, trace[-1])
        return _result(edges, partition, betas, trace, True, 1, started, config, sims, weight_function)

    partitions = policy.initial_partitions(graph, sims, config)
    neighbors = NeighborTable.build(graph, sims)
    best: Optional[_Run] = None
    for index, start in enumerate(partitions):
        partition = Partition(repair_sizes(start.partition.labels, config.k, config.min_community_size, rng), config.k)
        betas = BetaSet.zeros(config.k, sims.p)
        if start.fit_betas_first:
            betas = fit_betas(edges, partition, betas, config, weight_function)
        run = _alternate(neighbors, edges, partition, betas, config, policy, rng, objective)
        logger.debug(f'Start {index}: objective {run.value:.6f} after {run.iterations} iterations')
        if best is None or run.value > best.value:
            best = run

    assert best is not None
    return _result(
        edges, best.partition, best.betas, best.trace, best.converged, best.iterations, started, config, sims, weight_function,
    )


class _Run(NamedTuple):
    partition: Partition
    betas: BetaSet
    converged: bool
    trace: List[float]
    iterations: int

    @property
    def value(self) -> float:
        return self.trace[-1]


def _alternate(neighbors, edges, partition, betas, config, policy, rng, objective) -> _Run:
    weight_function = policy.weight_function
    value = objective(partition, betas)
    logger.debug(f'Initial partition {partition}, objective {value:.6f}')
    trace: List[float] = []
    converged = False
    iteration = 0
    for iteration in range(1, config.max_outer_iters + 1):
        labelled, _ = search_labels(neighbors, partition, betas, config, rng, weight_function)
        policy.post_label_step(iteration, labelled, betas)

        betas = fit_betas(edges, labelled, betas, config, weight_function)
        new_value = objective(labelled, betas)
        trace.append(new_value)
        policy.post_beta_step(iteration, labelled, betas, new_value)
        logger.debug(f'Iteration {iteration}: objective {new_value:.6f}, sizes {labelled.sizes().tolist()}')

        stable = labelled.equals(partition)
        improvement = new_value - value
        partition, value = labelled, new_value
        if stable and improvement < CONVERGENCE_TOL:
            converged = True
            break
    else:
        logger.info(f'Fit stopped after {config.max_outer_iters} iterations without converging')
    return _Run(partition, betas, converged, trace, iteration)


def _result(edges, partition, betas, trace, converged, iterations, started, config, sims, weight_function) -> FitResult:
    criterion = table_criterion(edges, partition.labels, partition.k, betas, config, weight_function)
    return FitResult(
        partition=partition,
        betas=betas,
        trace=tuple(float(x) for x in trace),
        converged=converged,
        iterations=iterations,
        wall_time=time.perf_counter() - started,
        criterion=criterion,
        feature_names=sims.names,
    )
