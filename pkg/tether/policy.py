import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Optional, Sequence

import numpy as np

from ._util import derive_seed, make_rng
from .errors import ConfigurationError, DegenerateLaplacian, InitializationFailed
from .types import BetaSet, FitConfig, Graph, Partition, SpectralConfig

if TYPE_CHECKING:
    from .features import SimilaritySet

logger = logging.getLogger('tether.policy')

#: Scores are clamped to this magnitude before exponentiation
SCORE_CLAMP = 50.0


@dataclass(frozen=True)
class BaseWeightFunction:
    '''
    Base class for edge weight shapes ``W(score) = w_n - decay(score)`` where
    ``score = <phi_ij, beta_k>``.

    Override :func:`decay` and :func:`decay_slope`. ``decay`` must be positive,
    decreasing and convex so that the criterion stays concave in ``beta``.
    '''

    clamp: float = SCORE_CLAMP

    def decay(self, score: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def decay_slope(self, score: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def weight(self, score, w_n: float):
        return w_n - self.decay(score)


class WeightFunction:
    @dataclass(frozen=True)
    class Exponential(BaseWeightFunction):
        '''
        ``W = w_n - exp(-score)``. Bounded above by ``w_n`` and equal to ``w_n - 1`` at ``score = 0``.
        '''

        def decay(self, score):
            return np.exp(-np.clip(score, -self.clamp, self.clamp))

        def decay_slope(self, score):
            score = np.asarray(score, dtype=float)
            inside = np.abs(score) <= self.clamp
            return np.where(inside, -np.exp(-np.clip(score, -self.clamp, self.clamp)), 0.0)


DEFAULT_WEIGHT = WeightFunction.Exponential()


@dataclass(frozen=True)
class BaseInitializer:
    '''
    Base class for label initialisers.

    Override :func:`execute` to return a :class:`Partition`, or ``None`` if the
    initialiser cannot produce a usable one, in which case :attr:`fallback` runs.
    With :attr:`fit_betas_first` the coefficients are fitted on the initial
    partition before the first label step.
    '''

    fallback: Optional['BaseInitializer'] = None
    fit_betas_first: bool = False

    def execute(self, graph: Graph, sims: 'SimilaritySet', config: FitConfig) -> Optional[Partition]:
        raise NotImplementedError

    def _execute(self, graph: Graph, sims: 'SimilaritySet', config: FitConfig) -> Partition:
        partition = self.execute(graph, sims, config)
        if partition is not None and np.any(partition.sizes() < config.min_community_size):
            logger.debug(f'{self} produced a community below the minimum size')
            partition = None
        if partition is None:
            if not self.fallback:
                raise InitializationFailed(f'{self} failed to produce a partition and there was no fallback provided')
            logger.warning(f'Falling back to {self.fallback}')
            return self.fallback._execute(graph, sims, config)
        return partition


class Initializer:
    @dataclass(frozen=True)
    class Spectral(BaseInitializer):
        '''
        Regularized spectral clustering of the adjacency matrix.
        '''

        tau: float = 1e-7

        def execute(self, graph, sims, config):
            from .baselines import spectral_clustering

            try:
                return spectral_clustering(graph, SpectralConfig(k=config.k, tau=self.tau, seed=derive_seed(config.seed, 1)))
            except DegenerateLaplacian as e:
                logger.debug(f'Spectral initialisation failed: {e}')
                return None

    @dataclass(frozen=True)
    class KMeansFeatures(BaseInitializer):
        '''
        K-means on the feature columns that survived similarity construction.
        The coefficients are fitted on its partition before the first label step.
        '''

        fit_betas_first: bool = True

        def execute(self, graph, sims, config):
            from .baselines import kmeans

            if sims.p == 0:
                return None
            return kmeans(sims.values, config.k, seed=derive_seed(config.seed, 2))

    @dataclass(frozen=True)
    class RandomBalanced(BaseInitializer):
        '''
        Random labels with community sizes differing by at most one.
        '''

        def execute(self, graph, sims, config):
            rng = make_rng(config.seed, 3)
            labels = np.arange(graph.n) % config.k
            return Partition(rng.permutation(labels), config.k)

    @dataclass(frozen=True)
    class Given(BaseInitializer):
        '''
        A fixed label vector.
        '''

        labels: Sequence[int] = ()

        def __post_init__(self):
            if not len(self.labels):
                raise ValueError('labels must be set')
            object.__setattr__(self, 'labels', tuple(int(x) for x in self.labels))

        def execute(self, graph, sims, config):
            if len(self.labels) != graph.n:
                raise ConfigurationError(f'Initial labels cover {len(self.labels)} nodes, graph has {graph.n}')
            return Partition(np.asarray(self.labels), config.k)


@dataclass(frozen=True)
class Start:
    partition: Partition
    fit_betas_first: bool = False


DEFAULT_STARTS = (
    Initializer.Spectral(fallback=Initializer.RandomBalanced()),
    Initializer.KMeansFeatures(fallback=Initializer.RandomBalanced()),
)


class FitPolicy:
    '''
    A behaviour class that defines how a fit is initialised and observed.
    Override its methods and pass it to :func:`tether.optimizer.fit` to customize the behaviour.
    '''

    def __init__(self, initializer: Optional[BaseInitializer] = None, weight_function: Optional[BaseWeightFunction] = None,
                 initializers: Sequence[BaseInitializer] = ()):
        '''
        :param initializer: a single start, shorthand for ``initializers=[initializer]``
        :param initializers: starts of the alternating search; the fit with the
            largest penalized objective wins
        '''
        if initializer and initializers:
            raise ConfigurationError('Pass either initializer or initializers')
        if initializer:
            initializers = (initializer,)
        self.initializers = tuple(initializers) or DEFAULT_STARTS
        self.weight_function = weight_function or DEFAULT_WEIGHT

    @property
    def initializer(self) -> BaseInitializer:
        return self.initializers[0]

    def initial_partitions(self, graph: Graph, sims: 'SimilaritySet', config: FitConfig) -> List[Start]:
        '''
        Called once before the first label step.

        The default implementation runs every initializer with its fallback
        chain and drops starts that repeat an earlier partition.
        '''
        starts: List[Start] = []
        for initializer in self.initializers:
            partition = initializer._execute(graph, sims, config)
            if any(partition.equals(start.partition) and initializer.fit_betas_first == start.fit_betas_first
                   for start in starts):
                logger.debug(f'{initializer} repeats an earlier start')
                continue
            starts.append(Start(partition, initializer.fit_betas_first))
        return starts

    def post_label_step(self, iteration: int, partition: Partition, betas: BetaSet):
        '''
        Called after every tabu label search. With several starts the hooks see every run.
        '''

    def post_beta_step(self, iteration: int, partition: Partition, betas: BetaSet, objective: float):
        '''
        Called after every coefficient update with the penalized objective.
        '''

    def check_weight_bound(self, config: FitConfig, m_phi: float):
        '''
        Called once per fit with the similarity bound. The default implementation
        warns when ``log(w_n) <= m_phi * m_beta``.
        '''
        if not config.weight_bound_holds(m_phi):
            logger.warning(
                f'log(w_n) = {math.log(config.w_n):.4f} does not exceed m_phi * m_beta = {m_phi * config.m_beta:.4f}; '
                'edge weights may become negative'
            )
