from dataclasses import dataclass

import numpy as np

from .._util import scaled
from ..features import SimilaritySet
from ..policy import DEFAULT_WEIGHT, BaseWeightFunction
from ..types import BetaSet, FitConfig, Graph, Partition


@dataclass(frozen=True, eq=False)
class NeighborTable:
    '''
    CSR neighbourhoods of a graph with the similarity vector of every stored
    entry, so label steps never re-evaluate similarities.
    '''

    indptr: np.ndarray
    indices: np.ndarray
    adjacency: np.ndarray
    phi: np.ndarray

    @classmethod
    def build(cls, graph: Graph, sims: SimilaritySet) -> 'NeighborTable':
        csr = graph.csr
        indptr = csr.indptr.astype(np.intp)
        indices = csr.indices.astype(np.intp)
        rows = np.repeat(np.arange(graph.n), np.diff(indptr))
        phi = sims.phi(rows, indices) if len(indices) else np.zeros((0, sims.p))
        return cls(indptr, indices, csr.data.astype(float), phi)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    def weights(self, betas: BetaSet, w_n: float, weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> np.ndarray:
        '''
        ``A_ij * W(phi_ij, beta_k)`` for every stored entry, one column per community.
        '''
        scores = self.phi @ betas.values.T
        return self.adjacency[:, None] * weight_function.weight(scores, w_n)


class SwitchState:
    '''
    Incrementally maintained sums for label moves under fixed coefficients.

    ``cross[i, k]`` is the weighted edge mass between node ``i`` and community
    ``k`` (excluding ``i`` itself); ``internal[k]`` is twice the weighted edge
    mass inside community ``k``.
    '''

    def __init__(self, table: NeighborTable, weights: np.ndarray, labels: np.ndarray, k: int, alpha: float):
        self.table = table
        self.weights = weights
        self.labels = np.array(labels, dtype=np.intp)
        self.k = k
        self.alpha = alpha
        self.recompute()

    @classmethod
    def build(cls, table: NeighborTable, betas: BetaSet, partition: Partition, config: FitConfig,
              weight_function: BaseWeightFunction = DEFAULT_WEIGHT) -> 'SwitchState':
        return cls(table, table.weights(betas, config.w_n, weight_function), partition.labels, partition.k, config.alpha)

    def recompute(self):
        n, k = self.table.n, self.k
        rows = np.repeat(np.arange(n), np.diff(self.table.indptr))
        neighbor_labels = self.labels[self.table.indices]
        own = self.weights[np.arange(len(neighbor_labels)), neighbor_labels]
        self.cross = np.zeros((n, k))
        np.add.at(self.cross, (rows, neighbor_labels), own)
        self.internal = np.bincount(self.labels, weights=self.cross[np.arange(n), self.labels], minlength=k)
        self.sizes = np.bincount(self.labels, minlength=k)

    def criterion(self) -> float:
        return float(np.sum(scaled(self.internal, self.sizes, self.alpha)))

    def partition(self) -> Partition:
        return Partition(self.labels.copy(), self.k)

    def preferences(self, i: int) -> np.ndarray:
        '''
        Exact criterion change for moving ``i`` to every community; zero for its own.
        '''
        l = self.labels[i]
        alpha = self.alpha
        cross = self.cross[i]
        without_l = self.internal[l] - 2 * cross[l]
        size_l = self.sizes[l] - 1

        leave = scaled(without_l, size_l, alpha) - scaled(self.internal[l], self.sizes[l], alpha)
        join = scaled(self.internal + 2 * cross, self.sizes + 1, alpha) - scaled(self.internal, self.sizes, alpha)
        delta = np.asarray(join + leave, dtype=float)
        delta[l] = 0.0
        return delta

    def move(self, i: int, k: int):
        l = self.labels[i]
        if k == l:
            return
        start, stop = self.table.indptr[i], self.table.indptr[i + 1]
        neighbors = self.table.indices[start:stop]
        block = self.weights[start:stop]

        self.internal[k] += 2 * self.cross[i, k]
        self.internal[l] -= 2 * self.cross[i, l]
        self.cross[neighbors, l] -= block[:, l]
        self.cross[neighbors, k] += block[:, k]
        self.sizes[l] -= 1
        self.sizes[k] += 1
        self.labels[i] = k
