import logging
import math
from typing import Tuple

import numpy as np
from scipy import stats

from .._util import scaled
from ..criterion import EdgeTable
from ..errors import DimensionMismatch
from ..features import SimilaritySet
from ..policy import DEFAULT_WEIGHT, BaseWeightFunction
from ..types import BetaSet, FitConfig, FitResult, Graph, Partition

logger = logging.getLogger('tether.optimizer')

#: Backtracking gives up below this step size
MIN_STEP = 1e-20


def _soft_threshold(v: np.ndarray, threshold: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - threshold, 0.0)


def _project(v: np.ndarray, radius: float) -> np.ndarray:
    norm = np.linalg.norm(v)
    if norm > radius:
        return v * (radius / norm)
    return v


def _prox(v: np.ndarray, threshold: float, radius: float) -> np.ndarray:
    # Soft-thresholding then ball projection is the exact prox of l1 + ball indicator
    return _project(_soft_threshold(v, threshold), radius)


def _scales(labels: np.ndarray, k: int, alpha: float) -> np.ndarray:
    # Ordered pairs count every edge twice
    return scaled(np.full(k, 2.0), np.bincount(labels, minlength=k), alpha)


class _CommunityProblem:
    '''
    Coefficient-dependent part of one community's criterion, ``-scale * sum_e a_e * decay(<phi_e, beta>)``.
    '''

    def __init__(self, phi: np.ndarray, weight: np.ndarray, scale: float, weight_function: BaseWeightFunction):
        self.phi = phi
        self.weight = weight
        self.scale = scale
        self.weight_function = weight_function

    def smooth(self, beta: np.ndarray) -> float:
        return -self.scale * float(np.dot(self.weight, self.weight_function.decay(self.phi @ beta)))

    def gradient(self, beta: np.ndarray) -> np.ndarray:
        slope = self.weight_function.decay_slope(self.phi @ beta)
        return -self.scale * (self.phi.T @ (self.weight * slope))


def _ascend(problem: _CommunityProblem, beta: np.ndarray, config: FitConfig) -> Tuple[np.ndarray, int, bool]:
    ascent = config.ascent
    lam, radius = config.lam, config.m_beta

    def objective(b):
        return problem.smooth(b) - lam * float(np.abs(b).sum())

    start = _project(beta, radius)
    beta = start
    value = problem.smooth(beta)
    step = ascent.initial_step
    converged = False
    iteration = 0
    for iteration in range(1, ascent.max_iter + 1):
        gradient = problem.gradient(beta)
        while True:
            candidate = _prox(beta + step * gradient, step * lam, radius)
            diff = candidate - beta
            candidate_value = problem.smooth(candidate)
            bound = value + float(gradient @ diff) - float(diff @ diff) / (2 * step)
            if candidate_value >= bound - 1e-15 * max(1.0, abs(value)):
                break
            step *= ascent.backtrack
            if step < MIN_STEP:
                break
        if step < MIN_STEP:
            logger.debug('Coefficient ascent stalled in backtracking')
            break
        beta, value = candidate, candidate_value
        if np.linalg.norm(diff) < ascent.tol:
            converged = True
            break
        step *= ascent.expand

    if objective(beta) < objective(start):
        beta = start
    return beta, iteration, converged


def fit_betas(table: EdgeTable, partition: Partition, betas_init: BetaSet, config: FitConfig,
              weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> BetaSet:
    '''
    :func:`optimize_betas` over a prepared :class:`EdgeTable`.
    '''
    labels = partition.labels
    community, weight, phi = table.internal(labels)
    scales = _scales(labels, partition.k, config.alpha)
    values = np.zeros_like(betas_init.values)
    for k in range(partition.k):
        inside = community == k
        if not inside.any():
            continue
        problem = _CommunityProblem(phi[inside], weight[inside], float(scales[k]), weight_function)
        values[k], iterations, converged = _ascend(problem, np.array(betas_init[k]), config)
        if not converged:
            logger.debug(f'Coefficient ascent for community {k} stopped after {iterations} iterations without converging')
    return BetaSet(values)


def optimize_betas(graph: Graph, sims: SimilaritySet, partition: Partition, betas_init: BetaSet, config: FitConfig,
                   weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> BetaSet:
    '''
    Maximizes the penalized objective over each community's coefficients with
    the labels fixed.

    Every community is an independent concave problem
    ``|E_k|^-alpha * sum A_ij (w_n - exp(-<phi_ij, beta_k>)) - lam * ||beta_k||_1``
    over ``||beta_k||_2 <= m_beta``, solved by proximal gradient ascent with
    backtracking and step expansion. Only the coefficient-dependent term enters
    the line search, so the result does not depend on ``w_n``. Communities
    without internal edges get zero coefficients.
    '''
    if betas_init.k != partition.k or betas_init.p != sims.p:
        raise DimensionMismatch(f'Initial coefficients have shape {betas_init.values.shape}, expected ({partition.k}, {sims.p})')
    return fit_betas(EdgeTable.build(graph, sims), partition, betas_init, config, weight_function)


def beta_gradient(graph: Graph, sims: SimilaritySet, partition: Partition, betas: BetaSet, config: FitConfig,
                  weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> np.ndarray:
    '''
    Gradient of :func:`tether.criterion.jcdc_criterion` in the coefficients, one row per community.
    '''
    table = EdgeTable.build(graph, sims)
    labels = partition.labels
    community, weight, phi = table.internal(labels)
    scales = _scales(labels, partition.k, config.alpha)
    gradient = np.zeros_like(betas.values)
    for k in range(partition.k):
        inside = community == k
        if inside.any():
            problem = _CommunityProblem(phi[inside], weight[inside], float(scales[k]), weight_function)
            gradient[k] = problem.gradient(betas[k])
    return gradient


def beta_similarity_correlation(result: FitResult, graph: Graph, sims: SimilaritySet) -> Tuple[float, float]:
    '''
    Spearman correlation between fitted coefficients and the mean similarity
    of the same dimension over the community's internal edges. Returns
    ``(rho, p_value)``, both ``nan`` with fewer than three usable pairs.
    '''
    table = EdgeTable.build(graph, sims)
    community, _, phi = table.internal(result.partition.labels)
    coefficients, similarities = [], []
    for k in range(result.partition.k):
        inside = community == k
        if not inside.any():
            continue
        coefficients.extend(result.betas[k])
        similarities.extend(phi[inside].mean(axis=0))
    if len(coefficients) < 3 or np.ptp(coefficients) == 0 or np.ptp(similarities) == 0:
        return math.nan, math.nan
    rho, p_value = stats.spearmanr(coefficients, similarities)
    return float(rho), float(p_value)
