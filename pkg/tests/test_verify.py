import numpy as np
import pytest

from tether import BetaSet, BlockModelSpec, Partition, SbmConfig, VerifyConfig, check_conditions, run_verification
from tether._util import make_rng
from tether.metrics import GaussianSimilarityModel, population_criterion
from tether.types import CheckStatus
from tether.verify import (
    _population_at_truth, community_sizes, deviation_trend, maximizer_item, random_block_model, sample_sbm,
)


def small_config(**kwargs) -> VerifyConfig:
    kwargs.setdefault('block_model', BlockModelSpec.from_sbm(SbmConfig(within_prob=0.3)))
    kwargs.setdefault('samples', 500)
    kwargs.setdefault('instances', 3)
    kwargs.setdefault('replicates', 10)
    kwargs.setdefault('sizes', (40, 160))
    kwargs.setdefault('mc_samples', 200)
    return VerifyConfig(**kwargs)


def test_community_sizes():
    assert community_sizes(np.array([2 / 3, 1 / 3]), 150) == (100, 50)
    assert sum(community_sizes(np.array([0.5, 0.3, 0.2]), 7)) == 7
    assert min(community_sizes(np.array([0.98, 0.01, 0.01]), 10)) == 1


def test_random_block_models_are_assortative():
    rng = make_rng(0)
    for _ in range(20):
        spec, alpha = random_block_model(rng)
        report = check_conditions(spec, 0.0, 1.0, 5.0, alpha)
        assert report.ok
        assert 2 <= spec.k <= 4


def test_sample_sbm():
    spec = BlockModelSpec(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([0.5, 0.5]))
    graph = sample_sbm(spec, Partition.from_sizes([3, 3]), make_rng(1))
    assert graph.edge_count == 6
    assert graph.adjacency[0, 3] == 0


def test_population_at_truth_matches_monte_carlo():
    spec = BlockModelSpec.from_sbm(SbmConfig())
    truth = Partition.from_sizes([20, 10])
    model = GaussianSimilarityModel(mu=1.0, pi=tuple(spec.pi), moment_pairs=1000)
    estimate = population_criterion(truth, truth, BetaSet.zeros(2, model.p), spec, model, 5.0, 0.8, mc_samples=2)
    assert _population_at_truth(truth, spec, 5.0, 0.8) == pytest.approx(estimate.value)


def test_deviation_shrinks_with_size():
    medians, medians_g = deviation_trend(small_config())
    assert medians[0] > medians[1]
    assert len(medians_g) == 2


def test_maximizer_item_includes_given_model():
    config = small_config()
    assert maximizer_item(config, include_given=True).value['instances'] == 4
    assert maximizer_item(config, include_given=False).value['instances'] == 3


def test_run_verification():
    report = run_verification(small_config())
    assert report.ok
    assert [item.name for item in report.items] == [
        'min_proportion', 'assortativity', 'alpha_range', 'g_maximizer', 'population_bound', 'deviation_trend',
    ]


def test_weight_bound_is_checked_when_given():
    report = run_verification(small_config(m_phi=1.0, w_n=5.0, m_beta=5.0))
    assert report.item('weight_bound').status == CheckStatus.FAIL
    assert not report.ok


def test_alpha_outside_range():
    report = run_verification(small_config(alpha=0.2))
    assert report.item('alpha_range').status == CheckStatus.FAIL
    assert report.item('g_maximizer').value['instances'] == 3
