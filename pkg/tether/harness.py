'''
Simulation grids comparing the joint criterion with the network-only and
feature-only baselines over a range of community separation ``r`` and feature
signal strength ``mu``.

Every (r, mu, replicate) triple draws one graph and one feature table from
seeds derived from the master seed and the grid indices, and all methods run
on that same instance. Results therefore do not depend on how replicates are
scheduled across workers.
'''

import dataclasses
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import IO, Dict, List, Tuple, Union

import numpy as np
import pandas as pd

from ._util import derive_seed
from .baselines import kmeans, spectral_clustering
from .errors import ParseError, TetherError
from .features import build_similarities, generate_features
from .graph import generate_dcsbm
from .metrics import nmi
from .optimizer import fit_similarities
from .types import METHODS, CellResult, GridResult, GridSpec, SpectralConfig

logger = logging.getLogger('tether.harness')

#: Edge weight parameter of each joint-criterion method
JCDC_WEIGHTS = {'jcdc_w5': 5.0, 'jcdc_w15': 1.5}

HEATMAP_CORNER = 'mu\\r'

Key = Tuple[int, int, int]


def instance_seeds(spec: GridSpec, r_index: int, mu_index: int, replicate: int) -> Tuple[int, int]:
    '''
    Seeds of the graph and the features of one replicate.
    '''
    return (
        derive_seed(spec.seed, r_index, mu_index, replicate, 0),
        derive_seed(spec.seed, r_index, mu_index, replicate, 1),
    )


def method_seed(spec: GridSpec, method: str, r_index: int, mu_index: int, replicate: int) -> int:
    return derive_seed(spec.seed, r_index, mu_index, replicate, 2 + METHODS.index(method))


def _run_replicate(spec: GridSpec, key: Key) -> Dict[str, Tuple[float, float]]:
    r_index, mu_index, replicate = key
    r, mu = spec.r_values[r_index], spec.mu_values[mu_index]
    graph_seed, feature_seed = instance_seeds(spec, r_index, mu_index, replicate)
    sbm = dataclasses.replace(spec.sbm, out_in_ratio=r, seed=graph_seed)
    graph, truth = generate_dcsbm(sbm)
    features = generate_features(truth, dataclasses.replace(spec.features, mu=mu, seed=feature_seed))
    sims = None

    outcome = {}
    for method in spec.methods:
        seed = method_seed(spec, method, r_index, mu_index, replicate)
        started = time.perf_counter()
        try:
            if method in JCDC_WEIGHTS:
                if sims is None:
                    sims = build_similarities(features)
                config = dataclasses.replace(spec.fit, k=sbm.k, w_n=JCDC_WEIGHTS[method], seed=seed)
                estimate = fit_similarities(graph, sims, config).partition
            elif method == 'sc':
                estimate = spectral_clustering(graph, SpectralConfig(k=sbm.k, seed=seed))
            else:
                estimate = kmeans(features, sbm.k, seed=seed)
            score = nmi(estimate, truth)
        except (TetherError, ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as e:
            logger.error(f'{method} failed at r={r}, mu={mu}, replicate {replicate}: {e}')
            score = math.nan
        outcome[method] = (score, time.perf_counter() - started)
    logger.debug(f'Replicate r={r}, mu={mu}, #{replicate}: ' + ', '.join(f'{m}={s:.3f}' for m, (s, _) in outcome.items()))
    return outcome


def _log_progress(done: int, total: int, started: float):
    step = max(total // 10, 1)
    if done % step and done != total:
        return
    elapsed = time.perf_counter() - started
    remaining = elapsed / done * (total - done)
    logger.info(f'{done}/{total} replicates done, {elapsed:.0f}s elapsed, about {remaining:.0f}s remaining')


def run_grid(spec: GridSpec, workers: int = 1) -> GridResult:
    '''
    Runs every method on ``spec.replications`` shared instances per grid cell
    and records the NMI against the planted partition. A failing method
    records ``nan`` for that replicate.
    '''
    started = time.perf_counter()
    keys = [
        (r_index, mu_index, replicate)
        for r_index in range(len(spec.r_values))
        for mu_index in range(len(spec.mu_values))
        for replicate in range(spec.replications)
    ]
    logger.info(
        f'Running {len(keys)} replicates of {len(spec.methods)} methods '
        f'({len(spec.r_values)} x {len(spec.mu_values)} grid) on {workers} workers'
    )
    outcomes: Dict[Key, Dict[str, Tuple[float, float]]] = {}
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            for key, outcome in zip(keys, executor.map(lambda item: _run_replicate(spec, item), keys)):
                outcomes[key] = outcome
                _log_progress(len(outcomes), len(keys), started)
    else:
        for key in keys:
            outcomes[key] = _run_replicate(spec, key)
            _log_progress(len(outcomes), len(keys), started)

    cells: List[CellResult] = []
    for method in spec.methods:
        for r_index, r in enumerate(spec.r_values):
            for mu_index, mu in enumerate(spec.mu_values):
                results = [outcomes[(r_index, mu_index, replicate)][method] for replicate in range(spec.replications)]
                cells.append(CellResult(
                    method=method,
                    r=r,
                    mu=mu,
                    nmis=tuple(score for score, _ in results),
                    runtime=sum(runtime for _, runtime in results),
                ))
    return GridResult(spec, tuple(cells), time.perf_counter() - started)


def heatmap_frame(result: GridResult, method: str) -> pd.DataFrame:
    spec = result.spec
    # String axis labels, float_format applies to the cells only
    frame = pd.DataFrame(
        result.matrix(method),
        index=[str(float(mu)) for mu in spec.mu_values],
        columns=[str(float(r)) for r in spec.r_values],
    )
    frame.index.name = HEATMAP_CORNER
    return frame


def emit_heatmap_data(result: GridResult, directory: str) -> List[str]:
    '''
    Writes ``heatmap_<method>.csv`` into ``directory`` for every method: one row
    per ``mu`` value, one column per ``r`` value, mean NMI with four decimals.
    Returns the written paths.
    '''
    paths = []
    for method in result.spec.methods:
        path = os.path.join(directory, f'heatmap_{method}.csv')
        with open(path, 'w', newline='') as f:
            write_heatmap(result, method, f)
        paths.append(path)
        logger.info(f'Wrote {path}')
    return paths


def write_heatmap(result: GridResult, method: str, stream: IO[str]):
    heatmap_frame(result, method).to_csv(stream, float_format='%.4f', lineterminator='\n', na_rep='nan')


def read_heatmap(source: Union[str, IO[str]]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    '''
    Parses a heatmap CSV into ``(mu_values, r_values, matrix)``.
    '''
    path = source if isinstance(source, str) else getattr(source, 'name', '<stream>')
    try:
        frame = pd.read_csv(source, index_col=0)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ParseError(str(e).strip(), path, 1)
    if frame.index.name != HEATMAP_CORNER:
        raise ParseError(f'expected "{HEATMAP_CORNER}" in the header corner', path, 1)
    try:
        r_values = np.array([float(c) for c in frame.columns])
        return frame.index.to_numpy(dtype=float), r_values, frame.to_numpy(dtype=float)
    except ValueError as e:
        raise ParseError(str(e), path, 1)


def summary_payload(result: GridResult) -> dict:
    '''
    Plain representation of a grid result. Everything schedule-dependent lives under ``timing``.
    '''
    spec = result.spec
    return {
        'spec': {
            'r_values': list(spec.r_values),
            'mu_values': list(spec.mu_values),
            'replications': spec.replications,
            'methods': list(spec.methods),
            'seed': spec.seed,
            'sbm': dataclasses.asdict(spec.sbm),
            'features': dataclasses.asdict(spec.features),
            'fit': dataclasses.asdict(spec.fit),
        },
        'cells': list(result.cells),
        'timing': {
            'wall_time': result.wall_time,
            'cells': [{'method': c.method, 'r': c.r, 'mu': c.mu, 'runtime': c.runtime} for c in result.cells],
        },
    }


def write_summary(result: GridResult, stream: IO[bytes]):
    '''
    Writes the JSON summary with per-replicate NMIs through the result serializers.
    '''
    from .serializers import GridSummarySerializer, render_json

    payload = dict(summary_payload(result), schema_version=GridSummarySerializer.SCHEMA_VERSION, command='simulate')
    stream.write(render_json(GridSummarySerializer(payload).data))
