'''
The community detection objectives.

All sums run over ordered node pairs ``i != j``, so every undirected edge
contributes twice. Communities without members contribute zero.
'''

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ._util import scaled
from .errors import DimensionMismatch
from .features import SimilaritySet
from .policy import DEFAULT_WEIGHT, BaseWeightFunction
from .types import BetaSet, FitConfig, Graph, Partition


def edge_weight(phi, beta, w_n: float, weight_function: BaseWeightFunction = DEFAULT_WEIGHT):
    '''
    ``w_n - exp(-<phi, beta>)``. ``phi`` may hold one similarity vector per row.
    '''
    score = np.asarray(phi, dtype=float) @ np.asarray(beta, dtype=float)
    weight = weight_function.weight(score, w_n)
    return weight if np.ndim(weight) else float(weight)


@dataclass(frozen=True, eq=False)
class EdgeTable:
    '''
    Edges ``i < j`` of a graph with their weights and similarity vectors, evaluated once.
    '''

    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    phi: np.ndarray

    @classmethod
    def build(cls, graph: Graph, sims: SimilaritySet) -> 'EdgeTable':
        src, dst, weight = graph.edges()
        return cls(src, dst, weight, sims.edge_phi(graph))

    def internal(self, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        '''
        Returns ``(community, weight, phi)`` for the edges inside a community.
        '''
        community = labels[self.src]
        inside = community == labels[self.dst]
        return community[inside], self.weight[inside], self.phi[inside]


def _check(graph: Graph, partition: Partition, betas: Optional[BetaSet] = None, sims: Optional[SimilaritySet] = None):
    if partition.n != graph.n:
        raise DimensionMismatch(f'Partition covers {partition.n} nodes, graph has {graph.n}')
    if betas is not None and betas.k != partition.k:
        raise DimensionMismatch(f'Got coefficients for {betas.k} communities, partition has {partition.k}')
    if sims is not None and betas is not None and betas.p != sims.p:
        raise DimensionMismatch(f'Coefficients have {betas.p} dimensions, similarities have {sims.p}')


def _community_sum(labels: np.ndarray, k: int, community: np.ndarray, values: np.ndarray, alpha: float) -> float:
    totals = np.bincount(community, weights=2 * values, minlength=k)
    sizes = np.bincount(labels, minlength=k)
    return float(np.sum(scaled(totals, sizes, alpha)))


def table_decay(table: EdgeTable, labels: np.ndarray, k: int, betas: BetaSet, alpha: float,
                weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> float:
    community, weight, phi = table.internal(labels)
    scores = np.einsum('mp,mp->m', phi, betas.values[community])
    return _community_sum(labels, k, community, weight * weight_function.decay(scores), alpha)


def table_marginal(table: EdgeTable, labels: np.ndarray, k: int, alpha: float) -> float:
    community, weight, _ = table.internal(labels)
    return _community_sum(labels, k, community, weight, alpha)


def table_criterion(table: EdgeTable, labels: np.ndarray, k: int, betas: BetaSet, config: FitConfig,
                    weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> float:
    '''
    :func:`jcdc_criterion` over a prepared :class:`EdgeTable`.
    '''
    community, weight, phi = table.internal(labels)
    scores = np.einsum('mp,mp->m', phi, betas.values[community])
    values = weight * weight_function.weight(scores, config.w_n)
    return _community_sum(labels, k, community, values, config.alpha)


def marginal_criterion(graph: Graph, partition: Partition, alpha: float) -> float:
    '''
    ``sum_k |E_k|^-alpha * sum_{i != j in E_k} A_ij``, a modularity-like
    criterion that ignores node features.
    '''
    _check(graph, partition)
    src, dst, weight = graph.edges()
    labels = partition.labels
    inside = labels[src] == labels[dst]
    return _community_sum(labels, partition.k, labels[src][inside], weight[inside], alpha)


def jcdc_criterion(graph: Graph, sims: SimilaritySet, partition: Partition, betas: BetaSet, config: FitConfig,
                   weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> float:
    '''
    ``sum_k |E_k|^-alpha * sum_{i != j in E_k} A_ij * W(phi_ij, beta_k)``.
    Similarities are only evaluated on edges.
    '''
    _check(graph, partition, betas, sims)
    return table_criterion(EdgeTable.build(graph, sims), partition.labels, partition.k, betas, config, weight_function)


def decompose(graph: Graph, sims: SimilaritySet, partition: Partition, betas: BetaSet, config: FitConfig,
              weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> Tuple[float, float]:
    '''
    Splits the criterion into ``(term_w, term_g)`` with ``criterion = term_w - term_g``.
    ``term_w = w_n * marginal_criterion`` does not depend on the coefficients and
    ``term_g`` does not depend on ``w_n``.
    '''
    _check(graph, partition, betas, sims)
    table = EdgeTable.build(graph, sims)
    term_w = config.w_n * table_marginal(table, partition.labels, partition.k, config.alpha)
    term_g = table_decay(table, partition.labels, partition.k, betas, config.alpha, weight_function)
    return term_w, term_g


def penalized_objective(graph: Graph, sims: SimilaritySet, partition: Partition, betas: BetaSet, config: FitConfig,
                        weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> float:
    '''
    ``jcdc_criterion - lam * sum_k ||beta_k||_1``, the objective of the coefficient step.
    '''
    return jcdc_criterion(graph, sims, partition, betas, config, weight_function) - config.lam * betas.l1()
