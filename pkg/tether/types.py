import math
from dataclasses import dataclass, field
from enum import Enum, auto
from functools import cached_property
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, InvalidGraph

#: Graphs with more nodes than this are stored as CSR matrices
DENSE_LIMIT = 2000

#: Methods understood by the simulation harness
METHODS = ('jcdc_w5', 'jcdc_w15', 'sc', 'km')

Adjacency = Union[np.ndarray, sp.csr_matrix]


class ColumnKind(Enum):
    CONTINUOUS = auto()
    CATEGORICAL = auto()
    ORDINAL = auto()

    @classmethod
    def from_token(cls, token: str) -> 'ColumnKind':
        tokens = {'cont': cls.CONTINUOUS, 'cat': cls.CATEGORICAL, 'ord': cls.ORDINAL}
        try:
            return tokens[token.strip().lower()]
        except KeyError:
            raise ConfigurationError(f'Unknown column kind "{token}", expected one of {", ".join(tokens)}')

    @property
    def token(self) -> str:
        return {ColumnKind.CONTINUOUS: 'cont', ColumnKind.CATEGORICAL: 'cat', ColumnKind.ORDINAL: 'ord'}[self]


class Similarity(Enum):
    NEGATED_ABS_DIFF = auto()
    EQUALITY = auto()

    @classmethod
    def default_for(cls, kind: ColumnKind) -> 'Similarity':
        if kind == ColumnKind.CATEGORICAL:
            return cls.EQUALITY
        return cls.NEGATED_ABS_DIFF


class CheckStatus(Enum):
    PASS = auto()
    BOUNDARY_PASS = auto()
    FAIL = auto()

    @property
    def ok(self) -> bool:
        return self != CheckStatus.FAIL


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigurationError(message)


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Graph:
    '''
    A simple undirected graph with nonnegative edge weights.

    Small graphs keep a dense ``numpy`` adjacency matrix, graphs above
    :data:`DENSE_LIMIT` nodes a ``scipy.sparse`` CSR matrix. Instances are
    immutable and validated on construction.
    '''

    adjacency: Adjacency

    def __post_init__(self):
        adjacency = self.adjacency
        if sp.issparse(adjacency):
            adjacency = sp.csr_matrix(adjacency, dtype=float)
            adjacency.sum_duplicates()
            adjacency.sort_indices()
            data = adjacency.data
        else:
            adjacency = np.array(adjacency, dtype=float)
            data = adjacency

        if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
            raise InvalidGraph(f'Adjacency must be square, got shape {adjacency.shape}')
        if not np.all(np.isfinite(data)):
            raise InvalidGraph('Adjacency contains non-finite entries')
        if np.any(data < 0):
            raise InvalidGraph('Adjacency contains negative entries')
        if np.any(adjacency.diagonal() != 0):
            raise InvalidGraph('Self-loops are not supported')

        if sp.issparse(adjacency):
            asymmetric = (adjacency != adjacency.T).nnz > 0
        else:
            asymmetric = not np.array_equal(adjacency, adjacency.T)
            _readonly(adjacency)
        if asymmetric:
            raise InvalidGraph('Adjacency must be symmetric')

        object.__setattr__(self, 'adjacency', adjacency)

    @classmethod
    def from_edges(cls, n: int, src: Sequence[int], dst: Sequence[int], weight: Optional[Sequence[float]] = None) -> 'Graph':
        '''
        Builds a graph from an undirected edge list where each edge is listed once.
        Repeated edges have their weights summed.
        '''
        src = np.asarray(src, dtype=np.intp)
        dst = np.asarray(dst, dtype=np.intp)
        w = np.ones(len(src)) if weight is None else np.asarray(weight, dtype=float)
        if len(src) != len(dst) or len(src) != len(w):
            raise InvalidGraph('Edge arrays must have equal length')
        if len(src) and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise InvalidGraph(f'Edge endpoints must lie in [0, {n})')
        if np.any(src == dst):
            raise InvalidGraph('Self-loops are not supported')
        coo = sp.coo_matrix(
            (np.concatenate([w, w]), (np.concatenate([src, dst]), np.concatenate([dst, src]))),
            shape=(n, n),
        )
        if n > DENSE_LIMIT:
            return cls(coo.tocsr())
        return cls(coo.toarray())

    @classmethod
    def empty(cls, n: int) -> 'Graph':
        return cls.from_edges(n, [], [])

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def is_dense(self) -> bool:
        return not sp.issparse(self.adjacency)

    @cached_property
    def csr(self) -> sp.csr_matrix:
        matrix = sp.csr_matrix(self.adjacency)
        matrix.sort_indices()
        return matrix

    @cached_property
    def degrees(self) -> np.ndarray:
        return _readonly(np.asarray(self.adjacency.sum(axis=1), dtype=float).ravel())

    @cached_property
    def _upper(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        upper = sp.triu(self.csr, k=1).tocsr()
        upper.sort_indices()
        coo = upper.tocoo()
        return (
            _readonly(coo.row.astype(np.intp)),
            _readonly(coo.col.astype(np.intp)),
            _readonly(coo.data.astype(float)),
        )

    def edges(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        '''
        Returns ``(src, dst, weight)`` for every undirected edge with ``src < dst``,
        in row-major order.
        '''
        return self._upper

    @property
    def edge_count(self) -> int:
        return len(self._upper[0])

    def subgraph(self, nodes: Sequence[int]) -> 'Graph':
        nodes = np.asarray(nodes, dtype=np.intp)
        return Graph(self.csr[nodes][:, nodes] if not self.is_dense else self.adjacency[np.ix_(nodes, nodes)])


@dataclass(frozen=True, eq=False)
class Partition:
    '''
    Assignment of ``n`` nodes to ``k`` communities labelled ``0..k-1``.
    Communities may be empty.
    '''

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.intp).ravel()
        if self.k < 1:
            raise ConfigurationError(f'k must be at least 1, got {self.k}')
        if len(labels) and (labels.min() < 0 or labels.max() >= self.k):
            raise ConfigurationError(f'Labels must lie in [0, {self.k})')
        object.__setattr__(self, 'labels', _readonly(labels))

    @classmethod
    def single(cls, n: int) -> 'Partition':
        return cls(np.zeros(n, dtype=np.intp), 1)

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> 'Partition':
        return cls(np.repeat(np.arange(len(sizes)), sizes), len(sizes))

    @property
    def n(self) -> int:
        return len(self.labels)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def members(self, community: int) -> np.ndarray:
        return np.flatnonzero(self.labels == community)

    def with_labels(self, labels: np.ndarray) -> 'Partition':
        return Partition(labels, self.k)

    def permuted(self, permutation: Sequence[int]) -> 'Partition':
        '''
        Renames community ``c`` to ``permutation[c]``.
        '''
        return Partition(np.asarray(permutation, dtype=np.intp)[self.labels], self.k)

    def take(self, nodes: Sequence[int]) -> 'Partition':
        return Partition(self.labels[np.asarray(nodes, dtype=np.intp)], self.k)

    def equals(self, other: 'Partition') -> bool:
        return self.k == other.k and np.array_equal(self.labels, other.labels)

    def __repr__(self):
        return f'Partition(n={self.n}, k={self.k}, sizes={self.sizes().tolist()})'


@dataclass(frozen=True, eq=False)
class BetaSet:
    '''
    Per-community feature coefficients, one row per community.
    '''

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise ConfigurationError(f'BetaSet needs a K x p array, got shape {values.shape}')
        if not np.all(np.isfinite(values)):
            raise ConfigurationError('BetaSet contains non-finite coefficients')
        object.__setattr__(self, 'values', _readonly(values))

    @classmethod
    def zeros(cls, k: int, p: int) -> 'BetaSet':
        return cls(np.zeros((k, p)))

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def __getitem__(self, community: int) -> np.ndarray:
        return self.values[community]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=1)

    def l1(self) -> float:
        return float(np.abs(self.values).sum())

    def replace(self, community: int, beta: np.ndarray) -> 'BetaSet':
        values = self.values.copy()
        values[community] = beta
        return BetaSet(values)

    def permuted(self, permutation: Sequence[int]) -> 'BetaSet':
        '''
        Moves the row of community ``c`` to row ``permutation[c]``,
        matching :func:`Partition.permuted`.
        '''
        values = np.empty_like(self.values)
        values[np.asarray(permutation, dtype=np.intp)] = self.values
        return BetaSet(values)


@dataclass(frozen=True, eq=False)
class FeatureTable:
    '''
    ``n x p`` node features. Categorical columns hold level indices ``0..m-1``.
    '''

    values: np.ndarray
    kinds: Tuple[ColumnKind, ...]
    names: Tuple[str, ...] = ()
    levels: Tuple[int, ...] = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise ConfigurationError(f'Features must be an n x p array, got shape {values.shape}')
        p = values.shape[1]
        kinds = tuple(self.kinds)
        if len(kinds) != p:
            raise ConfigurationError(f'Got {len(kinds)} column kinds for {p} feature columns')
        names = tuple(self.names) or tuple(f'x{index}' for index in range(p))
        if len(names) != p:
            raise ConfigurationError(f'Got {len(names)} column names for {p} feature columns')
        if not np.all(np.isfinite(values)):
            raise ConfigurationError('Features contain missing or non-finite values')

        levels = list(self.levels) or [0] * p
        for column, kind in enumerate(kinds):
            if kind != ColumnKind.CATEGORICAL:
                levels[column] = 0
                continue
            codes = values[:, column]
            if np.any(codes != np.round(codes)) or np.any(codes < 0):
                raise ConfigurationError(f'Categorical column "{names[column]}" must hold level indices')
            observed = int(codes.max()) + 1 if len(codes) else 0
            if levels[column] and observed > levels[column]:
                raise ConfigurationError(f'Categorical column "{names[column]}" has a level outside 0..{levels[column] - 1}')
            levels[column] = levels[column] or observed

        object.__setattr__(self, 'values', _readonly(values))
        object.__setattr__(self, 'kinds', kinds)
        object.__setattr__(self, 'names', names)
        object.__setattr__(self, 'levels', tuple(levels))

    @classmethod
    def continuous(cls, values: np.ndarray, names: Sequence[str] = ()) -> 'FeatureTable':
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        return cls(values, (ColumnKind.CONTINUOUS,) * values.shape[1], tuple(names))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def take(self, nodes: Sequence[int]) -> 'FeatureTable':
        return FeatureTable(self.values[np.asarray(nodes, dtype=np.intp)], self.kinds, self.names, self.levels)

    def select(self, columns: Sequence[int]) -> 'FeatureTable':
        columns = list(columns)
        return FeatureTable(
            self.values[:, columns],
            tuple(self.kinds[c] for c in columns),
            tuple(self.names[c] for c in columns),
            tuple(self.levels[c] for c in columns),
        )


@dataclass(frozen=True)
class SbmConfig:
    '''
    Degree-corrected stochastic block model. Nodes are laid out community by
    community; the first ``ceil(hub_fraction * size)`` nodes of each community
    are hubs.
    '''

    community_sizes: Tuple[int, ...] = (100, 50)
    within_prob: float = 0.1
    out_in_ratio: float = 0.25
    density_scale: float = 1.0
    hub_fraction: float = 0.05
    hub_theta: float = 10.0
    base_theta: float = 1.0
    prob_cap: float = 0.99
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'community_sizes', tuple(int(x) for x in self.community_sizes))
        _require(len(self.community_sizes) >= 1, 'community_sizes must not be empty')
        _require(all(x >= 1 for x in self.community_sizes), 'every community size must be at least 1')
        _require(0 <= self.within_prob <= 1, 'within_prob must lie in [0, 1]')
        _require(0 <= self.out_in_ratio <= 1, 'out_in_ratio must lie in [0, 1]')
        _require(0 < self.density_scale <= 1, 'density_scale must lie in (0, 1]')
        _require(0 <= self.hub_fraction < 1, 'hub_fraction must lie in [0, 1)')
        _require(self.hub_theta >= 1, 'hub_theta must be at least 1')
        _require(self.base_theta > 0, 'base_theta must be positive')
        _require(0 < self.prob_cap <= 1, 'prob_cap must lie in (0, 1]')
        _require(0 <= self.seed < 2 ** 64, 'seed must be a 64-bit unsigned integer')

    @property
    def n(self) -> int:
        return sum(self.community_sizes)

    @property
    def k(self) -> int:
        return len(self.community_sizes)

    def block_matrix(self) -> np.ndarray:
        k = self.k
        matrix = np.full((k, k), self.out_in_ratio * self.within_prob)
        np.fill_diagonal(matrix, self.within_prob)
        return matrix

    def partition(self) -> Partition:
        return Partition.from_sizes(self.community_sizes)

    def thetas(self) -> np.ndarray:
        theta = np.full(self.n, self.base_theta)
        start = 0
        for size in self.community_sizes:
            hubs = math.ceil(self.hub_fraction * size)
            theta[start:start + hubs] = self.hub_theta
            start += size
        return theta


@dataclass(frozen=True)
class FeatureGenConfig:
    mu: float = 1.0
    n_noise: int = 1
    seed: int = 0

    def __post_init__(self):
        _require(self.mu >= 0, 'mu must be nonnegative')
        _require(self.n_noise >= 0, 'n_noise must be nonnegative')
        _require(0 <= self.seed < 2 ** 64, 'seed must be a 64-bit unsigned integer')


@dataclass(frozen=True)
class TabuConfig:
    #: Sweeps a moved node stays frozen
    tenure: int = 3
    max_sweeps: int = 50
    restarts: int = 5
    #: Fraction of nodes relabelled at random for restarts after the first
    perturb_fraction: float = 0.5

    def __post_init__(self):
        _require(self.tenure >= 0, 'tenure must be nonnegative')
        _require(self.max_sweeps >= 1, 'max_sweeps must be at least 1')
        _require(self.restarts >= 1, 'restarts must be at least 1')
        _require(0 <= self.perturb_fraction <= 1, 'perturb_fraction must lie in [0, 1]')


@dataclass(frozen=True)
class AscentConfig:
    max_iter: int = 500
    tol: float = 1e-8
    initial_step: float = 1.0
    backtrack: float = 0.5
    expand: float = 1.5

    def __post_init__(self):
        _require(self.max_iter >= 1, 'max_iter must be at least 1')
        _require(self.tol > 0, 'tol must be positive')
        _require(self.initial_step > 0, 'initial_step must be positive')
        _require(0 < self.backtrack < 1, 'backtrack must lie in (0, 1)')
        _require(self.expand >= 1, 'expand must be at least 1')


@dataclass(frozen=True)
class FitConfig:
    k: int = 2
    alpha: float = 1.0
    w_n: float = 5.0
    lam: float = 1e-5
    m_beta: float = 5.0
    max_outer_iters: int = 20
    min_community_size: int = 1
    tabu: TabuConfig = field(default_factory=TabuConfig)
    ascent: AscentConfig = field(default_factory=AscentConfig)
    seed: int = 0

    def __post_init__(self):
        _require(self.k >= 1, 'k must be at least 1')
        _require(self.alpha > 0, 'alpha must be positive')
        _require(self.w_n > 1, 'w_n must be greater than 1')
        _require(self.lam >= 0, 'lambda must be nonnegative')
        _require(self.m_beta > 0, 'm_beta must be positive')
        _require(self.max_outer_iters >= 1, 'max_outer_iters must be at least 1')
        _require(self.min_community_size >= 1, 'min_community_size must be at least 1')
        _require(0 <= self.seed < 2 ** 64, 'seed must be a 64-bit unsigned integer')

    def weight_bound_holds(self, m_phi: float) -> bool:
        return math.log(self.w_n) > m_phi * self.m_beta


@dataclass(frozen=True)
class SpectralConfig:
    k: int = 2
    tau: float = 1e-7
    seed: int = 0
    n_starts: int = 10
    row_normalize: bool = False

    def __post_init__(self):
        _require(self.k >= 1, 'k must be at least 1')
        _require(self.tau >= 0, 'tau must be nonnegative')
        _require(self.n_starts >= 1, 'n_starts must be at least 1')


@dataclass(frozen=True, eq=False)
class BlockModelSpec:
    '''
    Block probabilities ``P``, community proportions ``pi`` and density factor ``rho``.
    '''

    p_matrix: np.ndarray
    pi: np.ndarray
    rho: float = 1.0
    pi0: Optional[float] = None

    def __post_init__(self):
        p_matrix = np.array(self.p_matrix, dtype=float)
        pi = np.array(self.pi, dtype=float).ravel()
        k = len(pi)
        _require(p_matrix.shape == (k, k), f'P must be {k} x {k}, got {p_matrix.shape}')
        _require(np.allclose(p_matrix, p_matrix.T, atol=0), 'P must be symmetric')
        _require(bool(np.all((p_matrix >= 0) & (p_matrix <= 1))), 'P entries must lie in [0, 1]')
        _require(abs(pi.sum() - 1) <= 1e-9, 'pi must sum to 1')
        pi0 = float(pi.min()) if self.pi0 is None else float(self.pi0)
        _require(pi0 > 0, 'pi0 must be positive')
        _require(0 < self.rho <= 1, 'rho must lie in (0, 1]')
        object.__setattr__(self, 'p_matrix', _readonly(p_matrix))
        object.__setattr__(self, 'pi', _readonly(pi))
        object.__setattr__(self, 'pi0', pi0)

    @classmethod
    def from_sbm(cls, config: SbmConfig) -> 'BlockModelSpec':
        sizes = np.asarray(config.community_sizes, dtype=float)
        return cls(config.block_matrix(), sizes / sizes.sum(), config.density_scale)

    @property
    def k(self) -> int:
        return len(self.pi)


@dataclass(frozen=True, eq=False)
class FitResult:
    partition: Partition
    betas: BetaSet
    #: Penalized objective after each outer iteration
    trace: Tuple[float, ...]
    converged: bool
    iterations: int
    wall_time: float
    criterion: float
    feature_names: Tuple[str, ...] = ()


@dataclass(frozen=True)
class GridSpec:
    r_values: Tuple[float, ...] = (0.25, 0.45, 0.65)
    mu_values: Tuple[float, ...] = (0.5, 1.25, 2.0)
    replications: int = 10
    methods: Tuple[str, ...] = METHODS
    sbm: SbmConfig = field(default_factory=SbmConfig)
    features: FeatureGenConfig = field(default_factory=FeatureGenConfig)
    fit: FitConfig = field(default_factory=FitConfig)
    seed: int = 0

    def __post_init__(self):
        for name in ('r_values', 'mu_values', 'methods'):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        _require(len(self.r_values) > 0, 'r_values must not be empty')
        _require(len(self.mu_values) > 0, 'mu_values must not be empty')
        _require(len(self.methods) > 0, 'methods must not be empty')
        _require(self.replications >= 1, 'replications must be at least 1')
        unknown = [m for m in self.methods if m not in METHODS]
        _require(not unknown, f'Unknown methods {unknown}, valid methods are {", ".join(METHODS)}')
        _require(0 <= self.seed < 2 ** 64, 'seed must be a 64-bit unsigned integer')

    @classmethod
    def desk(cls, **kwargs) -> 'GridSpec':
        return cls(**kwargs)

    @classmethod
    def paper(cls, **kwargs) -> 'GridSpec':
        kwargs.setdefault('r_values', tuple(float(x) for x in np.round(np.linspace(0.25, 0.75, 11), 4)))
        kwargs.setdefault('mu_values', tuple(float(x) for x in np.round(np.linspace(0.5, 2.0, 7), 4)))
        kwargs.setdefault('replications', 30)
        return cls(**kwargs)


@dataclass(frozen=True)
class CellResult:
    method: str
    r: float
    mu: float
    #: One NMI per replicate, ``nan`` where the method failed
    nmis: Tuple[float, ...]
    runtime: float = 0.0

    @property
    def mean(self) -> float:
        values = np.asarray(self.nmis, dtype=float)
        values = values[~np.isnan(values)]
        return float(values.mean()) if len(values) else math.nan

    @property
    def sd(self) -> float:
        values = np.asarray(self.nmis, dtype=float)
        values = values[~np.isnan(values)]
        return float(values.std()) if len(values) else math.nan

    @property
    def failures(self) -> int:
        return int(np.isnan(np.asarray(self.nmis, dtype=float)).sum())


@dataclass(frozen=True)
class GridResult:
    spec: GridSpec
    cells: Tuple[CellResult, ...]
    wall_time: float = 0.0

    def cell(self, method: str, r: float, mu: float) -> CellResult:
        for cell in self.cells:
            if cell.method == method and cell.r == r and cell.mu == mu:
                return cell
        raise KeyError((method, r, mu))

    def matrix(self, method: str) -> np.ndarray:
        '''
        Mean NMI with one row per ``mu`` value and one column per ``r`` value.
        '''
        return np.array([
            [self.cell(method, r, mu).mean for r in self.spec.r_values]
            for mu in self.spec.mu_values
        ])


@dataclass(frozen=True)
class CheckItem:
    name: str
    status: CheckStatus
    value: Any = None
    detail: str = ''


@dataclass(frozen=True)
class CheckReport:
    items: Tuple[CheckItem, ...]

    @property
    def ok(self) -> bool:
        return all(item.status.ok for item in self.items)

    def item(self, name: str) -> CheckItem:
        for item in self.items:
            if item.name == name:
                return item
        raise KeyError(name)

    def failures(self) -> Tuple[CheckItem, ...]:
        return tuple(item for item in self.items if not item.status.ok)


@dataclass
class RunManifest:
    command: str
    config: Dict[str, Any]
    digests: Dict[str, str] = field(default_factory=dict)
    version: str = ''
    seed: int = 0
    started: str = ''
    finished: str = ''
    outputs: Dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class VerifyConfig:
    block_model: BlockModelSpec
    alpha: float = 1.0
    w_n: float = 5.0
    m_beta: float = 5.0
    #: Similarity norm bound for the weight condition; the check is skipped when unset
    m_phi: Optional[float] = None
    #: Random confusion matrices per maximizer search
    samples: int = 10_000
    #: Random block models for the maximizer search
    instances: int = 20
    #: Graphs per size in the deviation trend
    replicates: int = 20
    sizes: Tuple[int, ...] = (60, 120, 240)
    mc_samples: int = 2000
    mu: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'sizes', tuple(int(x) for x in self.sizes))
        _require(self.alpha > 0, 'alpha must be positive')
        _require(self.w_n > 1, 'w_n must be greater than 1')
        _require(self.m_beta > 0, 'm_beta must be positive')
        _require(self.m_phi is None or self.m_phi >= 0, 'm_phi must be nonnegative')
        _require(self.samples >= 1, 'samples must be at least 1')
        _require(self.instances >= 1, 'instances must be at least 1')
        _require(self.replicates >= 1, 'replicates must be at least 1')
        _require(len(self.sizes) >= 2, 'the deviation trend needs at least two sizes')
        _require(self.mc_samples >= 2, 'mc_samples must be at least 2')
        _require(0 <= self.seed < 2 ** 64, 'seed must be a 64-bit unsigned integer')
