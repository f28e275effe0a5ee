'''
Numerical checks of the consistency theory behind the joint criterion.

:func:`run_verification` collects four groups of items into one
:class:`~tether.types.CheckReport`:

* the model conditions of :func:`~tether.metrics.check_conditions`,
* a random search showing that ``g(U)`` never exceeds its value at perfect
  recovery on random assortative block models,
* spot checks of the bound between the population criterion and ``g(U)``,
* the shrinking deviation of the sample criterion from the population
  criterion as the graph grows.
'''

import logging
import math
from typing import List, Tuple

import numpy as np

from ._util import derive_seed, make_rng
from .criterion import marginal_criterion
from .metrics import (
    GaussianSimilarityModel, alpha_lower_bound, check_conditions, confusion_matrix, g_functional,
    maximizer_search, population_bound_constant, population_criterion,
)
from .types import BetaSet, BlockModelSpec, CheckItem, CheckReport, CheckStatus, Graph, Partition, VerifyConfig

logger = logging.getLogger('tether.verify')

MAX_RANDOM_K = 4
MIN_RANDOM_PROPORTION = 0.05


def community_sizes(pi: np.ndarray, n: int) -> Tuple[int, ...]:
    '''
    Splits ``n`` nodes by the proportions ``pi`` with largest remainders; every community keeps one node.
    '''
    raw = np.asarray(pi, dtype=float) * n
    sizes = np.maximum(np.floor(raw).astype(int), 1)
    order = np.argsort(-(raw - np.floor(raw)), kind='stable')
    for index in order[:max(n - int(sizes.sum()), 0)]:
        sizes[index] += 1
    while sizes.sum() > n:
        sizes[int(np.argmax(sizes))] -= 1
    return tuple(int(x) for x in sizes)


def sample_sbm(spec: BlockModelSpec, truth: Partition, rng: np.random.Generator) -> Graph:
    '''
    Plain stochastic block model draw: ``A_ij ~ Bernoulli(rho * P[c_i, c_j])`` independently for ``i < j``.
    '''
    n = truth.n
    probabilities = spec.rho * spec.p_matrix[truth.labels[:, None], truth.labels[None, :]]
    upper = np.triu(rng.random((n, n)) < probabilities, k=1)
    return Graph((upper | upper.T).astype(float))


def random_block_model(rng: np.random.Generator) -> Tuple[BlockModelSpec, float]:
    '''
    A random assortative block model with ``2 <= K <= 4`` and an ``alpha`` inside its consistency range.
    '''
    k = int(rng.integers(2, MAX_RANDOM_K + 1))
    while True:
        pi = rng.dirichlet(np.full(k, 5.0))
        if pi.min() >= MIN_RANDOM_PROPORTION:
            break
    diagonal = rng.uniform(0.2, 0.9, size=k)
    p_matrix = np.diag(diagonal)
    for a in range(k):
        for b in range(a + 1, k):
            p_matrix[a, b] = p_matrix[b, a] = rng.uniform(0, 0.9) * min(diagonal[a], diagonal[b]) / (2 * (k - 1))
    spec = BlockModelSpec(p_matrix, pi / pi.sum())
    lower = alpha_lower_bound(spec)
    return spec, float(rng.uniform(lower + 1e-6 * (1 - lower), 1))


def condition_items(config: VerifyConfig) -> List[CheckItem]:
    report = check_conditions(config.block_model, config.m_phi or 0.0, config.m_beta, config.w_n, config.alpha)
    items = list(report.items)
    if config.m_phi is None:
        logger.info('No similarity norm bound given, skipping the weight bound check')
        items = [item for item in items if item.name != 'weight_bound']
    return items


def maximizer_item(config: VerifyConfig, include_given: bool) -> CheckItem:
    '''
    Searches ``config.samples`` random confusion matrices on ``config.instances``
    random block models (plus the configured one when its ``alpha`` is in range)
    for a value of ``g`` above ``g(D)``.
    '''
    rng = make_rng(config.seed, 1)
    instances = [random_block_model(rng) for _ in range(config.instances)]
    if include_given:
        instances.insert(0, (config.block_model, config.alpha))

    excess, aligned = -math.inf, True
    exceeded = []
    for index, (spec, alpha) in enumerate(instances):
        search = maximizer_search(spec, alpha, config.samples, seed=derive_seed(config.seed, 1, index))
        excess = max(excess, search.best_value - search.g_d)
        aligned = aligned and search.at_alignment
        if search.exceeded:
            exceeded.append(index)
            logger.warning(f'g(U) = {search.best_value:.12f} exceeds g(D) = {search.g_d:.12f} on instance {index}')
    return CheckItem(
        'g_maximizer',
        CheckStatus.FAIL if exceeded else CheckStatus.PASS,
        {'instances': len(instances), 'samples': config.samples, 'max_excess': excess, 'at_alignment': aligned},
        f'no sample above g(D) on {len(instances)} instances' if not exceeded else f'g(D) exceeded on instances {exceeded}',
    )


def _perturbed(truth: Partition, fraction: float, rng: np.random.Generator) -> Partition:
    labels = truth.labels.copy()
    moved = rng.choice(truth.n, size=int(round(fraction * truth.n)), replace=False)
    labels[moved] = rng.integers(0, truth.k, size=len(moved))
    return Partition(labels, truth.k)


def population_bound_item(config: VerifyConfig, model: GaussianSimilarityModel) -> CheckItem:
    '''
    ``|R0 / (w_n rho n^(2 - alpha)) - g(U)| <= C / w_n`` for random
    partitions and coefficients, with ``C`` from
    :func:`~tether.metrics.population_bound_constant` at the largest coefficient norm drawn.
    Three Monte Carlo standard errors are allowed on top of the bound.
    '''
    spec = config.block_model
    n = max(config.sizes)
    truth = Partition.from_sizes(community_sizes(spec.pi, n))
    scale = config.w_n * spec.rho * n ** (2 - config.alpha)
    rng = make_rng(config.seed, 2)

    worst, violations = 0.0, []
    for index in range(config.instances):
        e = _perturbed(truth, rng.uniform(0, 1), rng)
        directions = rng.standard_normal((spec.k, model.p))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        norms = rng.uniform(0, config.m_beta, size=spec.k)
        betas = BetaSet(directions * norms[:, None])

        estimate = population_criterion(
            e, truth, betas, spec, model, config.w_n, config.alpha,
            mc_samples=config.mc_samples, seed=derive_seed(config.seed, 2, index),
        )
        gap = abs(estimate.value / scale - g_functional(confusion_matrix(e, truth), spec.p_matrix, config.alpha))
        try:
            bound = population_bound_constant(spec, model.m_phi, float(norms.max()), config.alpha) / config.w_n
        except OverflowError:
            bound = math.inf
        worst = max(worst, gap / bound if bound else math.inf)
        if gap > bound + 3 * estimate.stderr / scale:
            violations.append(index)
    return CheckItem(
        'population_bound',
        CheckStatus.FAIL if violations else CheckStatus.PASS,
        {'n': n, 'instances': config.instances, 'worst_ratio': worst},
        f'largest gap is {worst:.3g} of the bound' if not violations else f'bound violated on spot checks {violations}',
    )


def _population_at_truth(truth: Partition, spec: BlockModelSpec, w_n: float, alpha: float) -> float:
    # zero coefficients make every edge weigh w_n - 1
    sizes = truth.sizes().astype(float)
    within = np.diag(spec.p_matrix)
    return float((w_n - 1) * spec.rho * np.sum(sizes * (sizes - 1) * within / sizes ** alpha))


def deviation_trend(config: VerifyConfig) -> Tuple[List[float], List[float]]:
    '''
    Median deviation of the sample criterion at the true partition with zero
    coefficients, per graph size: centred on the population criterion and on ``g(D)``.
    '''
    spec = config.block_model
    g_d = g_functional(np.diag(spec.pi), spec.p_matrix, config.alpha)
    medians, medians_g = [], []
    for size_index, n in enumerate(config.sizes):
        truth = Partition.from_sizes(community_sizes(spec.pi, n))
        scale = config.w_n * spec.rho * n ** (2 - config.alpha)
        population = _population_at_truth(truth, spec, config.w_n, config.alpha)
        deviations, deviations_g = [], []
        for replicate in range(config.replicates):
            graph = sample_sbm(spec, truth, make_rng(config.seed, 3, size_index, replicate))
            criterion = (config.w_n - 1) * marginal_criterion(graph, truth, config.alpha)
            deviations.append(abs(criterion - population) / scale)
            deviations_g.append(abs(criterion / scale - g_d))
        medians.append(float(np.median(deviations)))
        medians_g.append(float(np.median(deviations_g)))
        logger.debug(f'n={n}: median deviation {medians[-1]:.6f}, centred on g(D) {medians_g[-1]:.6f}')
    return medians, medians_g


def deviation_item(config: VerifyConfig) -> CheckItem:
    medians, medians_g = deviation_trend(config)
    decreasing = all(a > b for a, b in zip(medians, medians[1:]))
    return CheckItem(
        'deviation_trend',
        CheckStatus.PASS if decreasing else CheckStatus.FAIL,
        {'sizes': list(config.sizes), 'median': medians, 'median_centred_on_g': medians_g},
        ', '.join(f'n={n}: {m:.5f}' for n, m in zip(config.sizes, medians)),
    )


def run_verification(config: VerifyConfig) -> CheckReport:
    '''
    Runs the whole suite. The configured block model enters the maximizer
    search only when its ``alpha`` lies in the consistency range.
    '''
    items = condition_items(config)
    alpha_ok = next(item for item in items if item.name == 'alpha_range').status.ok
    for item in items:
        logger.info(f'{item.name}: {item.status.name} ({item.detail})')

    items.append(maximizer_item(config, include_given=alpha_ok))
    model = GaussianSimilarityModel(mu=config.mu, pi=tuple(config.block_model.pi), seed=derive_seed(config.seed, 4))
    items.append(population_bound_item(config, model))
    items.append(deviation_item(config))
    for item in items[-3:]:
        logger.info(f'{item.name}: {item.status.name} ({item.detail})')
    return CheckReport(tuple(items))
