'''
Small random instances shared by the tests.
'''

import numpy as np

from tether import BetaSet, FeatureTable, FitConfig, Graph, Partition, build_similarities
from tether._util import make_rng


def two_triangles() -> Graph:
    return Graph.from_edges(6, [0, 0, 1, 3, 3, 4], [1, 2, 2, 4, 5, 5])


def random_graph(n: int, density: float, rng: np.random.Generator, weighted: bool = False) -> Graph:
    upper = np.triu(rng.random((n, n)) < density, k=1).astype(float)
    if weighted:
        upper *= rng.uniform(0.5, 2.0, size=(n, n))
    return Graph(upper + upper.T)


def random_instance(seed: int, n: int = 8, k: int = 2, p: int = 2, density: float = 0.5, beta_scale: float = 0.5,
                    weighted: bool = False):
    '''
    Returns ``(graph, sims, partition, betas)`` drawn from ``seed``.
    '''
    rng = make_rng(seed)
    graph = random_graph(n, density, rng, weighted)
    features = FeatureTable.continuous(rng.standard_normal((n, p)))
    sims = build_similarities(features)
    labels = np.arange(n) % k
    partition = Partition(rng.permutation(labels), k)
    betas = BetaSet(beta_scale * rng.standard_normal((k, p)))
    return graph, sims, partition, betas


def small_config(**kwargs) -> FitConfig:
    kwargs.setdefault('k', 2)
    return FitConfig(**kwargs)


def zero_betas(k: int, p: int) -> BetaSet:
    return BetaSet.zeros(k, p)
