'''
Single-source baselines: regularized spectral clustering on the network and
k-means on the node features.
'''

import logging
import warnings
from typing import Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from ._util import derive_seed, make_rng
from .errors import ConfigurationError, DegenerateLaplacian
from .types import ColumnKind, FeatureTable, Graph, Partition, SpectralConfig

logger = logging.getLogger('tether.baselines')


def regularized_laplacian(graph: Graph, tau: float) -> Union[np.ndarray, sp.csr_matrix]:
    '''
    ``D_tau^-1/2 A D_tau^-1/2`` with ``D_tau = diag(degrees) + tau * I``.
    '''
    degrees = graph.degrees + tau
    if np.all(degrees == 0):
        raise DegenerateLaplacian('Every node has zero degree and tau is 0')
    inv_sqrt = np.zeros(graph.n)
    positive = degrees > 0
    inv_sqrt[positive] = 1 / np.sqrt(degrees[positive])
    if graph.is_dense:
        return inv_sqrt[:, None] * graph.adjacency * inv_sqrt[None, :]
    scale = sp.diags(inv_sqrt)
    return (scale @ graph.csr @ scale).tocsr()


def spectral_embedding(graph: Graph, config: SpectralConfig) -> Tuple[np.ndarray, np.ndarray]:
    '''
    The ``k`` eigenpairs of the regularized Laplacian with the largest
    algebraic eigenvalues, in ascending eigenvalue order.
    '''
    laplacian = regularized_laplacian(graph, config.tau)
    n, k = graph.n, config.k
    if sp.issparse(laplacian) and k < n - 1:
        v0 = make_rng(config.seed, 0).standard_normal(n)
        values, vectors = scipy.sparse.linalg.eigsh(laplacian, k=k, which='LA', v0=v0)
        order = np.argsort(values)
        return values[order], vectors[:, order]
    if sp.issparse(laplacian):
        laplacian = laplacian.toarray()
    return scipy.linalg.eigh(laplacian, subset_by_index=[n - k, n - 1])


def spectral_clustering(graph: Graph, config: SpectralConfig = SpectralConfig()) -> Partition:
    '''
    Clusters the rows of the leading eigenvectors of the regularized Laplacian
    with k-means (``config.n_starts`` starts).
    '''
    if config.k > graph.n:
        raise ConfigurationError(f'Cannot split {graph.n} nodes into {config.k} communities')
    if config.k == 1:
        return Partition.single(graph.n)
    _, vectors = spectral_embedding(graph, config)
    if config.row_normalize:
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        vectors = np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)
    return _lloyd(vectors, config.k, config.n_starts, config.seed)


def design_matrix(features: FeatureTable) -> np.ndarray:
    '''
    Feature values with every categorical column replaced by one indicator column per level.
    '''
    columns = []
    for index, kind in enumerate(features.kinds):
        values = features.values[:, index]
        if kind == ColumnKind.CATEGORICAL:
            columns.extend((values == level).astype(float) for level in range(features.levels[index]))
        else:
            columns.append(values)
    if not columns:
        return np.zeros((features.n, 0))
    return np.column_stack(columns)


def _lloyd(points: np.ndarray, k: int, n_starts: int, seed: int) -> Partition:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', ConvergenceWarning)
        model = KMeans(n_clusters=k, n_init=n_starts, random_state=derive_seed(seed, 0xC1), algorithm='lloyd')
        labels = model.fit_predict(points)
    for warning in caught:
        if issubclass(warning.category, ConvergenceWarning):
            logger.warning(f'k-means: {warning.message}')
    sizes = np.bincount(labels, minlength=k)
    if np.any(sizes == 0):
        logger.warning(f'k-means collapsed to {int(np.count_nonzero(sizes))} of {k} clusters, resampling the empty ones')
        labels = _fill_empty(points, labels, model.cluster_centers_, k)
    return Partition(labels, k)


def _fill_empty(points: np.ndarray, labels: np.ndarray, centers: np.ndarray, k: int) -> np.ndarray:
    '''
    Moves the point farthest from its centroid, among clusters with at least
    two members, into each empty cluster.
    '''
    labels = labels.copy()
    distances = np.linalg.norm(points - centers[labels], axis=1)
    for empty in np.flatnonzero(np.bincount(labels, minlength=k) == 0):
        sizes = np.bincount(labels, minlength=k)
        movable = np.flatnonzero(sizes[labels] >= 2)
        point = movable[np.argmax(distances[movable])]
        labels[point] = empty
        distances[point] = -1.0
    return labels


def kmeans(features: Union[FeatureTable, np.ndarray], k: int, n_starts: int = 10, seed: int = 0) -> Partition:
    '''
    Lloyd's k-means, best of ``n_starts`` starts by within-cluster sum of squares.

    Categorical columns of a :class:`FeatureTable` are one-hot expanded. With
    fewer distinct rows than ``k`` empty clusters are filled with the points farthest from their centroids.
    '''
    points = design_matrix(features) if isinstance(features, FeatureTable) else np.asarray(features, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    n = points.shape[0]
    if k > n:
        raise ConfigurationError(f'Cannot split {n} nodes into {k} clusters')
    if n_starts < 1:
        raise ConfigurationError('n_starts must be at least 1')
    if k == 1:
        return Partition.single(n)
    return _lloyd(points, k, n_starts, seed)
