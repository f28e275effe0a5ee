import json
import math
import os
from io import BytesIO, StringIO
from unittest import mock

import numpy as np
import pytest

from tether import ConfigurationError, InitializationFailed, ParseError, SbmConfig, emit_heatmap_data, run_grid
from tether.harness import instance_seeds, method_seed, read_heatmap, write_heatmap, write_summary
from tether.types import CellResult, GridResult, GridSpec


def tiny_spec(**kwargs) -> GridSpec:
    kwargs.setdefault('methods', ('sc', 'km'))
    kwargs.setdefault('replications', 2)
    return GridSpec.desk(
        r_values=(0.25, 0.45, 0.65),
        mu_values=(0.5, 2.0),
        sbm=SbmConfig(community_sizes=(20, 10), within_prob=0.4),
        seed=7,
        **kwargs,
    )


def test_grid_shape_and_values():
    result = run_grid(tiny_spec())
    assert len(result.cells) == 2 * 3 * 2
    for cell in result.cells:
        assert len(cell.nmis) == 2
        assert all(0 <= value <= 1 for value in cell.nmis)
    assert result.matrix('sc').shape == (2, 3)


def test_grid_is_deterministic():
    first = run_grid(tiny_spec())
    second = run_grid(tiny_spec(), workers=3)
    assert [c.nmis for c in first.cells] == [c.nmis for c in second.cells]


def test_methods_share_instances():
    spec = tiny_spec(methods=('km',))
    alone = run_grid(spec)
    together = run_grid(tiny_spec())
    assert alone.matrix('km').tolist() == together.matrix('km').tolist()


def test_joint_method_runs():
    result = run_grid(tiny_spec(methods=('jcdc_w5',), replications=1))
    assert not any(cell.failures for cell in result.cells)


def test_seeds_are_distinct():
    spec = tiny_spec()
    seeds = {instance_seeds(spec, r, mu, rep) for r in range(3) for mu in range(2) for rep in range(2)}
    assert len(seeds) == 12
    assert method_seed(spec, 'sc', 0, 0, 0) != method_seed(spec, 'km', 0, 0, 0)


def test_failures_are_recorded():
    with mock.patch('tether.harness.kmeans', side_effect=ConfigurationError('boom')):
        result = run_grid(tiny_spec())
    cell = result.cell('km', 0.25, 0.5)
    assert cell.failures == 2
    assert math.isnan(cell.mean)
    assert result.cell('sc', 0.25, 0.5).failures == 0


@pytest.mark.parametrize('error', [InitializationFailed('no partition'), RuntimeError('custom policy')])
def test_fit_failures_are_recorded(error):
    with mock.patch('tether.harness.fit_similarities', side_effect=error):
        result = run_grid(tiny_spec(methods=('jcdc_w5', 'sc'), replications=1))
    assert all(cell.failures == 1 for cell in result.cells if cell.method == 'jcdc_w5')
    assert not any(cell.failures for cell in result.cells if cell.method == 'sc')


def test_heatmap_format():
    spec = GridSpec.desk(methods=('sc',), replications=1)
    cells = tuple(
        CellResult('sc', r, mu, (0.8 if r == 0.25 else 0.5,))
        for r in spec.r_values for mu in spec.mu_values
    )
    out = StringIO()
    write_heatmap(GridResult(spec, cells), 'sc', out)
    lines = out.getvalue().splitlines()
    assert lines[0] == 'mu\\r,0.25,0.45,0.65'
    assert len(lines) == 4
    assert all(len(line.split(',')) == 4 for line in lines)
    assert lines[1] == '0.5,0.8000,0.5000,0.5000'

    mu_values, r_values, matrix = read_heatmap(StringIO(out.getvalue()))
    assert mu_values.tolist() == [0.5, 1.25, 2.0]
    assert r_values.tolist() == [0.25, 0.45, 0.65]
    assert np.allclose(matrix[:, 0], 0.8)


def test_heatmap_failed_cells():
    spec = GridSpec.desk(methods=('km',), r_values=(0.25,), mu_values=(1.0,), replications=1)
    out = StringIO()
    write_heatmap(GridResult(spec, (CellResult('km', 0.25, 1.0, (math.nan,)),)), 'km', out)
    assert out.getvalue().splitlines()[1] == '1.0,nan'


def test_read_heatmap_rejects_other_files():
    with pytest.raises(ParseError):
        read_heatmap(StringIO('a,b\n1,2\n'))


def test_emit_heatmap_data(tmp_path):
    result = run_grid(tiny_spec(replications=1))
    paths = emit_heatmap_data(result, str(tmp_path))
    assert [os.path.basename(p) for p in paths] == ['heatmap_sc.csv', 'heatmap_km.csv']
    _, _, matrix = read_heatmap(paths[1])
    assert np.allclose(matrix, result.matrix('km'), atol=5e-5)


def test_summary():
    result = run_grid(tiny_spec(replications=1))
    out = BytesIO()
    write_summary(result, out)
    summary = json.loads(out.getvalue())
    assert summary['command'] == 'simulate'
    assert summary['spec']['r_values'] == [0.25, 0.45, 0.65]
    assert len(summary['cells']) == 12
    assert summary['cells'][0]['nmis'] == list(result.cells[0].nmis)
    assert 'wall_time' in summary['timing']


@pytest.mark.slow
def test_desk_grid_combines_graph_and_features():
    result = run_grid(GridSpec.desk(methods=('jcdc_w5', 'sc', 'km'), seed=7), workers=8)
    joint, sc, km = (result.matrix(method) for method in ('jcdc_w5', 'sc', 'km'))
    assert result.cell('jcdc_w5', 0.25, 2.0).mean >= 0.8
    # rows are mu, columns are r
    assert np.all(np.ptp(sc, axis=0) <= 0.1)
    assert np.all(np.ptp(km, axis=1) <= 0.1)
    assert np.all(joint >= np.maximum(sc, km) - 0.05)
