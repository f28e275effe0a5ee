'''
Node features and the pairwise similarity vectors derived from them.

Raw similarities are standardized per dimension over *all* unordered node
pairs, using the population standard deviation. Standardized similarities are
evaluated lazily; only the moments and the bound ``m_phi`` are precomputed.
'''

import logging
import math
from dataclasses import dataclass
from typing import IO, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ._util import iter_pair_rows, make_rng
from .errors import ConfigurationError, DimensionMismatch, ParseError
from .types import ColumnKind, FeatureGenConfig, FeatureTable, Graph, Partition, Similarity

logger = logging.getLogger('tether.features')

#: A similarity dimension whose pair-population sd is at or below this is treated as constant
CONSTANT_TOLERANCE = 1e-12


def generate_features(partition: Partition, config: FeatureGenConfig, replicate: int = 0) -> FeatureTable:
    '''
    Column ``signal`` is ``N(mu, 1)`` for community 0 and ``N(-mu, 1)`` for all
    other communities; columns ``noise1..`` are iid ``N(0, 1)``.
    '''
    rng = make_rng(config.seed, replicate)
    n = partition.n
    signal = np.where(partition.labels == 0, config.mu, -config.mu) + rng.standard_normal(n)
    noise = rng.standard_normal((n, config.n_noise))
    names = ('signal',) + tuple(f'noise{index + 1}' for index in range(config.n_noise))
    return FeatureTable.continuous(np.column_stack([signal, noise]), names)


def expand_categorical(table: FeatureTable) -> FeatureTable:
    '''
    Replaces every categorical column with ``M - 1`` indicator columns, level 0
    being the reference level.
    '''
    columns: List[np.ndarray] = []
    kinds: List[ColumnKind] = []
    names: List[str] = []
    levels: List[int] = []
    for index, kind in enumerate(table.kinds):
        values = table.values[:, index]
        if kind != ColumnKind.CATEGORICAL:
            columns.append(values)
            kinds.append(kind)
            names.append(table.names[index])
            levels.append(0)
            continue
        if table.levels[index] < 2:
            logger.warning(f'Categorical column "{table.names[index]}" has a single level and is dropped')
        for level in range(1, table.levels[index]):
            columns.append((values == level).astype(float))
            kinds.append(ColumnKind.CATEGORICAL)
            names.append(f'{table.names[index]}={level}')
            levels.append(2)

    values = np.column_stack(columns) if columns else np.zeros((table.n, 0))
    return FeatureTable(values, tuple(kinds), tuple(names), tuple(levels))


def _raw(values: np.ndarray, measures: Sequence[Similarity], i, j) -> np.ndarray:
    left = values[i]
    right = values[j]
    out = np.empty(np.broadcast(left, right).shape)
    for column, measure in enumerate(measures):
        if measure == Similarity.EQUALITY:
            out[..., column] = left[..., column] == right[..., column]
        else:
            out[..., column] = -np.abs(left[..., column] - right[..., column])
    return out


@dataclass(frozen=True, eq=False)
class SimilaritySet:
    '''
    Standardized pairwise similarities ``phi(i, j)``.

    Build instances with :func:`build_similarities`.
    '''

    values: np.ndarray
    measures: Tuple[Similarity, ...]
    names: Tuple[str, ...]
    mean: np.ndarray
    sd: np.ndarray
    m_phi: float
    #: Indices of dimensions that were constant over all pairs and are emitted as zeros
    constant_columns: Tuple[int, ...] = ()
    #: Names of feature columns removed by the low-variance filter
    dropped_columns: Tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def has_constant_columns(self) -> bool:
        return bool(self.constant_columns)

    def raw(self, i, j) -> np.ndarray:
        return _raw(self.values, self.measures, i, j)

    def _standardize(self, raw: np.ndarray) -> np.ndarray:
        safe = np.where(self.sd > 0, self.sd, 1.0)
        return np.where(self.sd > 0, (raw - self.mean) / safe, 0.0)

    def phi(self, i, j) -> np.ndarray:
        '''
        Standardized similarity of nodes ``i`` and ``j``. Accepts scalars or
        equal-length index arrays (one row per pair).
        '''
        return self._standardize(self.raw(i, j))

    def edge_phi(self, graph: Graph) -> np.ndarray:
        '''
        Similarities for every edge of ``graph``, in :func:`Graph.edges` order.
        '''
        if graph.n != self.n:
            raise DimensionMismatch(f'Graph has {graph.n} nodes, similarities cover {self.n}')
        src, dst, _ = graph.edges()
        if not len(src):
            return np.zeros((0, self.p))
        return self.phi(src, dst)


def _column_moments(values: np.ndarray, measures: Sequence[Similarity]) -> Tuple[np.ndarray, np.ndarray]:
    n, p = values.shape
    pairs = n * (n - 1) // 2
    if pairs == 0:
        return np.zeros(p), np.zeros(p)

    # Row partials summed exactly so the result does not depend on block order
    partials = [_raw(values, measures, i, j).sum(axis=0) for i, j in iter_pair_rows(n)]
    mean = np.array([math.fsum(column) for column in zip(*partials)]) / pairs

    partials = [((_raw(values, measures, i, j) - mean) ** 2).sum(axis=0) for i, j in iter_pair_rows(n)]
    variance = np.array([math.fsum(column) for column in zip(*partials)]) / pairs
    return mean, np.sqrt(variance)


def build_similarities(
    features: FeatureTable,
    measures: Optional[Sequence[Similarity]] = None,
    min_variance: float = 0.0,
    standardize_features: bool = False,
) -> SimilaritySet:
    '''
    Computes raw similarities for all pairs and standardizes them per dimension.

    :param measures: one :class:`Similarity` per column; defaults to negated
        absolute difference for continuous/ordinal and equality for categorical columns
    :param min_variance: feature columns with a lower (population) variance are dropped
    :param standardize_features: z-score continuous and ordinal columns first
    '''
    if measures is None:
        measures = [Similarity.default_for(kind) for kind in features.kinds]
    measures = tuple(measures)
    if len(measures) != features.p:
        raise ConfigurationError(f'Got {len(measures)} similarity measures for {features.p} feature columns')

    values = features.values.copy()
    keep = list(range(features.p))
    dropped: List[str] = []
    if min_variance > 0:
        variances = values.var(axis=0) if features.n else np.zeros(features.p)
        keep = [c for c in keep if variances[c] >= min_variance]
        dropped = [features.names[c] for c in range(features.p) if c not in keep]
        for name in dropped:
            logger.warning(f'Feature column "{name}" has variance below {min_variance} and is dropped')

    if standardize_features:
        for column, kind in enumerate(features.kinds):
            if kind == ColumnKind.CATEGORICAL:
                continue
            sd = values[:, column].std()
            if sd > 0:
                values[:, column] = (values[:, column] - values[:, column].mean()) / sd

    values = values[:, keep]
    measures = tuple(measures[c] for c in keep)
    names = tuple(features.names[c] for c in keep)

    mean, sd = _column_moments(values, measures)
    constant = tuple(int(c) for c in np.flatnonzero(sd <= CONSTANT_TOLERANCE * np.maximum(1.0, np.abs(mean))))
    for column in constant:
        logger.warning(f'Similarity column "{names[column]}" is constant over all pairs and is emitted as zeros')
    sd = sd.copy()
    sd[list(constant)] = 0.0

    sims = SimilaritySet(values, measures, names, mean, sd, 0.0, constant, tuple(dropped))
    m_phi = 0.0
    for i, j in iter_pair_rows(sims.n):
        m_phi = max(m_phi, float(np.linalg.norm(sims.phi(i, j), axis=-1).max()))
    object.__setattr__(sims, 'm_phi', m_phi)
    logger.debug(f'Built similarities: n={sims.n}, p={sims.p}, m_phi={m_phi:.4f}')
    return sims


def parse_kinds(spec: str) -> Tuple[ColumnKind, ...]:
    '''
    Parses a ``cont,cat,ord,...`` column kind list.
    '''
    return tuple(ColumnKind.from_token(token) for token in spec.split(',') if token.strip())


def read_features(source: Union[str, IO[str]], kinds: Optional[Sequence[ColumnKind]] = None, n: Optional[int] = None) -> FeatureTable:
    '''
    Reads a feature CSV. The header row names the columns; the first column is
    ``node_id`` (0-based) and rows may come in any order. Missing values are errors.

    :param kinds: one kind per feature column; all continuous by default
    :param n: expected node count; every node ``0..n-1`` must have exactly one row
    '''
    path = source if isinstance(source, str) else getattr(source, 'name', '<stream>')
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ParseError(str(e).strip(), path, 1)

    if not len(frame.columns) or frame.columns[0].strip() != 'node_id':
        raise ParseError('first column must be "node_id"', path, 1)
    names = tuple(str(c).strip() for c in frame.columns[1:])
    if kinds is None:
        kinds = (ColumnKind.CONTINUOUS,) * len(names)
    kinds = tuple(kinds)
    if len(kinds) != len(names):
        raise DimensionMismatch(f'{path}: {len(kinds)} column kinds declared for {len(names)} feature columns')

    numeric = frame.apply(lambda column: pd.to_numeric(column.str.strip(), errors='coerce'))
    bad = numeric.isna().to_numpy()
    if bad.any():
        row, column = np.argwhere(bad)[0]
        raw_value = frame.iat[row, column]
        reason = 'missing value' if not raw_value.strip() else f'not a number: "{raw_value}"'
        raise ParseError(f'{reason} in column "{frame.columns[column]}"', path, int(row) + 2)

    ids = numeric.iloc[:, 0].to_numpy()
    if np.any(ids != np.round(ids)) or np.any(ids < 0):
        row = int(np.flatnonzero((ids != np.round(ids)) | (ids < 0))[0])
        raise ParseError('node_id must be a nonnegative integer', path, row + 2)
    ids = ids.astype(np.intp)
    if len(np.unique(ids)) != len(ids):
        raise ParseError('duplicate node_id rows', path, int(np.flatnonzero(pd.Series(ids).duplicated().to_numpy())[0]) + 2)

    expected = len(ids) if n is None else n
    if len(ids) != expected or (len(ids) and ids.max() >= expected):
        raise DimensionMismatch(f'{path}: feature rows cover {len(ids)} nodes, expected node ids 0..{expected - 1}')

    values = np.empty((expected, len(names)))
    values[ids] = numeric.iloc[:, 1:].to_numpy(dtype=float)
    try:
        return FeatureTable(values, kinds, names)
    except ConfigurationError as e:
        raise ParseError(str(e), path, 1)


def write_features(table: FeatureTable, stream: IO[str]):
    frame = pd.DataFrame(table.values, columns=list(table.names))
    frame.insert(0, 'node_id', np.arange(table.n))
    frame.to_csv(stream, index=False, lineterminator='\n')
