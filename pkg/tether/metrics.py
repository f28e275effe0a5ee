'''
Agreement metrics between partitions and the population-level quantities used
to check the consistency theory numerically.

Confusion matrices ``U`` index estimated communities by row and true
communities by column, so ``U[k, l]`` is the fraction of nodes estimated in
``k`` that truly belong to ``l`` and the column sums are the true proportions.
'''

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import normalized_mutual_info_score
from typing_extensions import Literal

from ._util import make_rng, scaled
from .criterion import jcdc_criterion
from .errors import ConfigurationError, DimensionMismatch
from .features import SimilaritySet
from .policy import DEFAULT_WEIGHT, BaseWeightFunction
from .types import BetaSet, BlockModelSpec, CheckItem, CheckReport, CheckStatus, FitConfig, Graph, Partition

logger = logging.getLogger('tether.metrics')

#: Permutations are enumerated up to this many communities, optimal assignment is used beyond
EXHAUSTIVE_K = 8

NMI_AVERAGES = ('geometric', 'arithmetic', 'max', 'min')
NmiAverage = Literal['geometric', 'arithmetic', 'max', 'min']


def _check_lengths(e: Partition, c: Partition):
    if e.n != c.n:
        raise DimensionMismatch(f'Partitions cover {e.n} and {c.n} nodes')


@lru_cache(maxsize=None)
def _permutations(k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(k))), dtype=np.intp).reshape(-1, k)


def _best_assignment(score: np.ndarray) -> np.ndarray:
    '''
    Column assigned to every row maximizing the total score.
    '''
    k = score.shape[0]
    if k <= EXHAUSTIVE_K:
        permutations = _permutations(k)
        totals = score[np.arange(k), permutations].sum(axis=1)
        return permutations[int(np.argmax(totals))]
    rows, cols = linear_sum_assignment(score, maximize=True)
    assignment = np.empty(k, dtype=np.intp)
    assignment[rows] = cols
    return assignment


def nmi(e: Partition, c: Partition, average_method: NmiAverage = 'geometric') -> float:
    '''
    Normalized mutual information, by default normalized by the geometric mean
    of the two entropies. Two single-cluster partitions agree perfectly.
    '''
    _check_lengths(e, c)
    if average_method not in NMI_AVERAGES:
        raise ConfigurationError(f'Unknown NMI normalization "{average_method}", expected one of {", ".join(NMI_AVERAGES)}')
    if e.n == 0:
        return 1.0
    single_e = len(np.unique(e.labels)) == 1
    single_c = len(np.unique(c.labels)) == 1
    if single_e and single_c:
        return 1.0
    if single_e or single_c:
        return 0.0
    return float(normalized_mutual_info_score(c.labels, e.labels, average_method=average_method))


def _counts(e: Partition, c: Partition) -> np.ndarray:
    k = max(e.k, c.k)
    counts = np.zeros((k, k))
    np.add.at(counts, (e.labels, c.labels), 1)
    return counts


def misclassification_distance(e: Partition, c: Partition) -> float:
    '''
    Smallest fraction of nodes whose labels disagree over all renamings of
    the communities of ``e``. Partitions with different ``k`` are padded with
    empty communities.
    '''
    _check_lengths(e, c)
    if e.n == 0:
        return 0.0
    counts = _counts(e, c)
    assignment = _best_assignment(counts)
    agree = counts[np.arange(len(assignment)), assignment].sum()
    return float(1 - agree / e.n)


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    u: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        pi = np.array(self.pi, dtype=float)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[1] != len(pi):
            raise DimensionMismatch(f'U must be K x K with K = {len(pi)}, got shape {u.shape}')
        object.__setattr__(self, 'u', u)
        object.__setattr__(self, 'pi', pi)

    @property
    def k(self) -> int:
        return len(self.pi)

    @property
    def d(self) -> np.ndarray:
        return np.diag(self.pi)

    def is_feasible(self, tol: float = 1e-12) -> bool:
        return bool(
            np.all(self.u >= -tol)
            and abs(self.u.sum() - 1) <= tol * self.k ** 2
            and np.allclose(self.u.sum(axis=0), self.pi, atol=tol * self.k, rtol=0)
        )


def confusion_matrix(e: Partition, c: Partition) -> ConfusionMatrix:
    _check_lengths(e, c)
    counts = _counts(e, c)
    n = max(e.n, 1)
    return ConfusionMatrix(counts / n, counts.sum(axis=0) / n)


def aligned_l1_gap(confusion: ConfusionMatrix) -> float:
    '''
    ``min_O ||U - O D||_1`` over permutation matrices ``O``, i.e. the l1
    distance to the nearest perfect recovery. Equals twice the
    misclassification distance of the partitions ``U`` came from.
    '''
    u, pi = confusion.u, confusion.pi
    # cost[a, l]: l1 mass of row a when row a carries the diagonal entry of column l
    cost = u.sum(axis=1)[:, None] - u + np.abs(u - pi[None, :])
    assignment = _best_assignment(-cost)
    return float(cost[np.arange(confusion.k), assignment].sum())


def _g_batch(u: np.ndarray, p_matrix: np.ndarray, alpha: float) -> np.ndarray:
    numerators = np.einsum('...kl,lm,...km->...k', u, p_matrix, u)
    return np.sum(scaled(numerators, u.sum(axis=-1), alpha), axis=-1)


def g_functional(confusion: Union[ConfusionMatrix, np.ndarray], p_matrix: np.ndarray, alpha: float) -> float:
    '''
    ``sum_k (U P U^T)_kk / (sum_a U_ka)^alpha``; rows without mass contribute zero.
    '''
    u = confusion.u if isinstance(confusion, ConfusionMatrix) else np.asarray(confusion, dtype=float)
    return float(_g_batch(u, np.asarray(p_matrix, dtype=float), alpha))


def sample_feasible_confusion(pi: np.ndarray, rng: np.random.Generator, size: int = 1, concentration: float = 1.0) -> np.ndarray:
    '''
    Draws ``size`` confusion matrices with column sums ``pi`` by splitting each
    column's mass with a symmetric Dirichlet. Returns an array of shape ``(size, K, K)``.
    '''
    pi = np.asarray(pi, dtype=float)
    k = len(pi)
    splits = rng.dirichlet(np.full(k, concentration), size=(size, k))
    # splits[s, l, :] distributes column l over the K rows
    return np.transpose(splits, (0, 2, 1)) * pi[None, None, :]


@dataclass(frozen=True, eq=False)
class MaximizerSearch:
    best_value: float
    best_u: np.ndarray
    #: g at perfect recovery
    g_d: float
    #: l1 distance of the best matrix to the nearest permutation alignment
    gap: float
    samples: int

    @property
    def exceeded(self) -> bool:
        return self.best_value > self.g_d + 1e-12

    @property
    def at_alignment(self) -> bool:
        return self.gap <= 1e-9


def maximizer_search(spec: BlockModelSpec, alpha: float, samples: int = 10_000, seed: int = 0,
                     concentration: float = 1.0) -> MaximizerSearch:
    '''
    Random search for the maximum of ``g(U)`` over confusion matrices with
    column sums ``pi``. Every permutation alignment ``O D`` is evaluated as well.
    '''
    pi = spec.pi
    rng = make_rng(seed)
    candidates = sample_feasible_confusion(pi, rng, samples, concentration)
    alignments = np.zeros((len(_permutations(spec.k)), spec.k, spec.k))
    for index, permutation in enumerate(_permutations(spec.k)):
        alignments[index, permutation, np.arange(spec.k)] = pi
    candidates = np.concatenate([alignments, candidates])

    values = _g_batch(candidates, spec.p_matrix, alpha)
    best = int(np.argmax(values))
    g_d = g_functional(np.diag(pi), spec.p_matrix, alpha)
    gap = aligned_l1_gap(ConfusionMatrix(candidates[best], pi))
    logger.debug(f'g(U) search over {len(candidates)} matrices: best {values[best]:.12f}, g(D) {g_d:.12f}')
    return MaximizerSearch(float(values[best]), candidates[best], g_d, gap, samples)


@dataclass(frozen=True)
class GaussianSimilarityModel:
    '''
    Node features drawn as ``N(mu, 1)`` (community 0) or ``N(-mu, 1)`` (other
    communities) plus ``n_noise`` independent ``N(0, 1)`` columns, compared by
    negated absolute difference. Standardization moments are estimated once
    from ``moment_pairs`` node pairs of the mixture with proportions ``pi``.
    '''

    mu: float
    pi: Tuple[float, ...]
    n_noise: int = 1
    moment_pairs: int = 200_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'pi', tuple(float(x) for x in self.pi))
        if self.moment_pairs < 2:
            raise ConfigurationError('moment_pairs must be at least 2')

    @property
    def p(self) -> int:
        return 1 + self.n_noise

    def _raw(self, ci, cj, rng: np.random.Generator) -> np.ndarray:
        ci, cj = np.asarray(ci), np.asarray(cj)
        size = len(ci)
        fi = rng.standard_normal((size, self.p))
        fj = rng.standard_normal((size, self.p))
        fi[:, 0] += np.where(ci == 0, self.mu, -self.mu)
        fj[:, 0] += np.where(cj == 0, self.mu, -self.mu)
        return -np.abs(fi - fj)

    def _moments(self) -> Tuple[np.ndarray, np.ndarray, float]:
        rng = make_rng(self.seed, 0)
        communities = rng.choice(len(self.pi), size=(2, self.moment_pairs), p=self.pi)
        raw = self._raw(communities[0], communities[1], rng)
        mean, sd = raw.mean(axis=0), raw.std(axis=0)
        phi = (raw - mean) / sd
        return mean, sd, float(np.linalg.norm(phi, axis=1).max())

    @property
    def m_phi(self) -> float:
        '''
        Largest similarity norm seen while estimating the moments.
        '''
        return _model_moments(self)[2]

    def sample(self, ci: int, cj: int, size: int, rng: np.random.Generator) -> np.ndarray:
        '''
        Standardized similarity vectors for ``size`` independent pairs from communities ``ci`` and ``cj``.
        '''
        mean, sd, _ = _model_moments(self)
        raw = self._raw(np.full(size, ci), np.full(size, cj), rng)
        return (raw - mean) / sd


@lru_cache(maxsize=32)
def _model_moments(model: GaussianSimilarityModel) -> Tuple[np.ndarray, np.ndarray, float]:
    return model._moments()


@dataclass(frozen=True)
class PopulationEstimate:
    value: float
    stderr: float


def population_criterion(e: Partition, c: Partition, betas: BetaSet, spec: BlockModelSpec,
                         model: GaussianSimilarityModel, w_n: float, alpha: float, mc_samples: int = 2000,
                         seed: int = 0, weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> PopulationEstimate:
    '''
    Monte Carlo estimate of the expected criterion
    ``sum_k |E_k|^-alpha sum_{i != j in E_k} rho P[c_i, c_j] E[W(phi_ij, beta_k)]``.

    Expected weights are estimated per (estimated community, true community
    pair) block from ``mc_samples`` draws of ``model``.
    '''
    _check_lengths(e, c)
    if mc_samples < 2:
        raise ConfigurationError('mc_samples must be at least 2')
    if c.k != spec.k:
        raise DimensionMismatch(f'True partition has {c.k} communities, block model has {spec.k}')
    if betas.k != e.k or betas.p != model.p:
        raise DimensionMismatch(f'Coefficients have shape {betas.values.shape}, expected ({e.k}, {model.p})')

    counts = np.zeros((e.k, c.k))
    np.add.at(counts, (e.labels, c.labels), 1)
    scales = scaled(np.ones(e.k), counts.sum(axis=1), alpha)

    value, variance = 0.0, 0.0
    for k in range(e.k):
        if not scales[k]:
            continue
        for l in range(c.k):
            for m in range(c.k):
                pairs = counts[k, l] * (counts[k, m] - (l == m))
                if pairs <= 0 or spec.p_matrix[l, m] == 0:
                    continue
                phi = model.sample(l, m, mc_samples, make_rng(seed, k, l, m))
                weights = weight_function.weight(phi @ betas[k], w_n)
                factor = scales[k] * spec.rho * spec.p_matrix[l, m] * pairs
                value += factor * float(weights.mean())
                variance += factor ** 2 * float(weights.var(ddof=1)) / mc_samples
    return PopulationEstimate(value, math.sqrt(variance))


def population_bound_constant(spec: BlockModelSpec, m_phi: float, m_beta: float, alpha: float) -> float:
    '''
    ``K * pi0^(alpha - 2) * exp(m_phi * m_beta) * max P``, the constant ``C`` in
    ``|R0 / (w_n rho n^(2 - alpha)) - g(U)| <= C / w_n``.
    '''
    return spec.k * spec.pi0 ** (alpha - 2) * math.exp(m_phi * m_beta) * float(spec.p_matrix.max())


@dataclass(frozen=True)
class Deviation:
    #: ``|R - R0| / (w_n rho n^(2 - alpha))``
    value: float
    #: ``|R / (w_n rho n^(2 - alpha)) - g(U)|``
    centred_on_g: float
    criterion: float
    population: PopulationEstimate


def deviation_from_population(graph: Graph, sims: SimilaritySet, e: Partition, c: Partition, betas: BetaSet,
                              spec: BlockModelSpec, model: GaussianSimilarityModel, w_n: float, alpha: float,
                              mc_samples: int = 2000, seed: int = 0) -> Deviation:
    '''
    Distance of the sample criterion from its population version, on the
    scale at which both converge.
    '''
    n = graph.n
    criterion = jcdc_criterion(graph, sims, e, betas, FitConfig(k=e.k, alpha=alpha, w_n=w_n))
    population = population_criterion(e, c, betas, spec, model, w_n, alpha, mc_samples, seed)
    scale = w_n * spec.rho * n ** (2 - alpha)
    g = g_functional(confusion_matrix(e, c), spec.p_matrix, alpha)
    return Deviation(
        value=abs(criterion - population.value) / scale,
        centred_on_g=abs(criterion / scale - g),
        criterion=criterion,
        population=population,
    )


def alpha_lower_bound(spec: BlockModelSpec) -> float:
    '''
    ``max_{k != l} 2 (K - 1) P_kl / min(P_kk, P_ll)``; zero for a single community.
    '''
    k = spec.k
    p = spec.p_matrix
    bound = 0.0
    for a, b in itertools.combinations(range(k), 2):
        smaller = min(p[a, a], p[b, b])
        ratio = math.inf if smaller == 0 else 2 * (k - 1) * p[a, b] / smaller
        bound = max(bound, ratio)
    return bound


def check_conditions(spec: BlockModelSpec, m_phi: float, m_beta: float, w_n: float, alpha: float,
                     tol: float = 1e-12) -> CheckReport:
    '''
    Checks the weight bound, the minimum community proportion, assortativity
    and whether ``alpha`` lies in the consistency range. A ``alpha`` on the
    lower end of the range is reported as a boundary pass.
    '''
    items = []

    bound = m_phi * m_beta
    items.append(CheckItem(
        'weight_bound',
        CheckStatus.PASS if math.log(w_n) > bound else CheckStatus.FAIL,
        {'log_w_n': math.log(w_n), 'm_phi_m_beta': bound},
        f'log(w_n) = {math.log(w_n):.4f} vs m_phi * m_beta = {bound:.4f}',
    ))

    smallest = float(spec.pi.min())
    items.append(CheckItem(
        'min_proportion',
        CheckStatus.PASS if smallest >= spec.pi0 - tol else CheckStatus.FAIL,
        {'min_pi': smallest, 'pi0': spec.pi0},
        f'min pi = {smallest:.4f} vs pi0 = {spec.pi0:.4f}',
    ))

    k = spec.k
    p = spec.p_matrix
    violations = [
        (a, b) for a, b in itertools.combinations(range(k), 2)
        if not 2 * (k - 1) * p[a, b] < min(p[a, a], p[b, b])
    ]
    items.append(CheckItem(
        'assortativity',
        CheckStatus.FAIL if violations else CheckStatus.PASS,
        {'violations': [list(v) for v in violations]},
        'holds for all community pairs' if not violations else f'violated for pairs {violations}',
    ))

    lower = alpha_lower_bound(spec)
    if lower - tol < alpha < lower + tol and lower <= 1:
        status = CheckStatus.BOUNDARY_PASS
    elif lower < alpha <= 1 + tol:
        status = CheckStatus.PASS
    else:
        status = CheckStatus.FAIL
    items.append(CheckItem(
        'alpha_range',
        status,
        {'alpha': alpha, 'lower': lower, 'upper': 1.0},
        f'alpha = {alpha} vs range [{lower:.4f}, 1]',
    ))
    return CheckReport(tuple(items))
