from unittest import mock

import numpy as np
import pytest

from tether import (
    ConfigurationError, DimensionMismatch, FeatureGenConfig, FeatureTable, FitConfig, FitPolicy, Initializer, Partition,
    SbmConfig, build_similarities, fit, generate_dcsbm, generate_features, kmeans, nmi,
)
from tether.optimizer import fit_similarities
from tether.types import TabuConfig

from tests.instances import random_instance, two_triangles


def test_two_triangles_with_constant_features():
    result = fit(two_triangles(), FeatureTable.continuous(np.ones(6)), config=FitConfig(seed=2))
    assert result.partition.labels.tolist() in ([0, 0, 0, 1, 1, 1], [1, 1, 1, 0, 0, 0])
    assert np.all(result.betas.values == 0)
    assert result.converged
    assert len(result.feature_names) == 1


def test_single_community():
    graph, _, _, _ = random_instance(0, n=10)
    features = FeatureTable.continuous(np.random.default_rng(0).standard_normal((10, 2)))
    result = fit(graph, features, config=FitConfig(k=1))
    assert result.partition.equals(Partition.single(10))
    assert result.iterations == 1
    assert len(result.trace) == 1


def test_trace_is_nondecreasing():
    for seed in range(5):
        graph, truth = generate_dcsbm(SbmConfig(community_sizes=(30, 20), within_prob=0.3, seed=seed))
        features = generate_features(truth, FeatureGenConfig(mu=1.0, seed=seed))
        result = fit(graph, features, config=FitConfig(seed=seed, tabu=TabuConfig(restarts=1)))
        assert np.all(np.diff(result.trace) >= -1e-9)
        assert result.criterion - FitConfig().lam * result.betas.l1() == pytest.approx(result.trace[-1])


def test_recovers_planted_communities():
    scores = []
    for seed in range(10):
        graph, truth = generate_dcsbm(SbmConfig(out_in_ratio=0.25, seed=seed))
        features = generate_features(truth, FeatureGenConfig(mu=2.0, seed=seed))
        result = fit(graph, features, config=FitConfig(w_n=5.0, alpha=1.0, seed=seed))
        scores.append(nmi(result.partition, truth))
    assert np.mean(scores) >= 0.8


def test_is_deterministic():
    graph, sims, _, _ = random_instance(3, n=20, density=0.3)
    first = fit_similarities(graph, sims, FitConfig(seed=4))
    second = fit_similarities(graph, sims, FitConfig(seed=4))
    assert first.partition.equals(second.partition)
    assert np.array_equal(first.betas.values, second.betas.values)
    assert first.trace == second.trace


def test_policy_hooks_are_called():
    graph, sims, _, _ = random_instance(4, n=16, density=0.4)
    policy = FitPolicy(initializer=Initializer.RandomBalanced())
    with mock.patch.object(policy, 'post_label_step') as label_step, \
            mock.patch.object(policy, 'post_beta_step') as beta_step, \
            mock.patch.object(policy, 'check_weight_bound') as weight_bound:
        result = fit_similarities(graph, sims, FitConfig(seed=1), policy)
    assert label_step.call_count == result.iterations
    assert beta_step.call_count == result.iterations
    weight_bound.assert_called_once()
    objectives = [call.args[3] for call in beta_step.call_args_list]
    assert tuple(objectives) == result.trace


def test_given_initializer():
    graph = two_triangles()
    policy = FitPolicy(initializer=Initializer.Given(labels=[1, 1, 1, 0, 0, 0]))
    result = fit(graph, FeatureTable.continuous(np.zeros(6)), config=FitConfig(), policy=policy)
    assert result.partition.labels.tolist() == [1, 1, 1, 0, 0, 0]


def test_initializer_falls_back(caplog):
    graph = two_triangles()
    sims = build_similarities(FeatureTable.continuous(np.arange(6.0)))
    policy = FitPolicy(initializer=Initializer.Given(labels=[0] * 5 + [1], fallback=Initializer.RandomBalanced()))
    result = fit_similarities(graph, sims, FitConfig(min_community_size=2), policy)
    assert result.partition.sizes().min() >= 2
    assert 'Falling back' in caplog.text


def test_weight_bound_warning(caplog):
    graph, sims, _, _ = random_instance(5, n=10)
    fit_similarities(graph, sims, FitConfig(w_n=1.5, m_beta=5.0, max_outer_iters=1))
    assert 'edge weights may become negative' in caplog.text


def test_dimension_and_size_checks():
    graph = two_triangles()
    with pytest.raises(DimensionMismatch):
        fit(graph, FeatureTable.continuous(np.zeros(5)))
    with pytest.raises(ConfigurationError):
        fit(graph, FeatureTable.continuous(np.zeros(6)), config=FitConfig(k=7))
    with pytest.raises(ConfigurationError):
        fit(graph, FeatureTable.continuous(np.zeros(6)), config=FitConfig(k=2, min_community_size=4))


def test_default_fit_keeps_the_better_start():
    graph, truth = generate_dcsbm(SbmConfig(out_in_ratio=0.65, seed=3))
    sims = build_similarities(generate_features(truth, FeatureGenConfig(mu=2.0, seed=3)))
    config = FitConfig(seed=3)
    joint = fit_similarities(graph, sims, config)
    spectral = fit_similarities(graph, sims, config, FitPolicy(initializer=FitPolicy().initializer))
    assert joint.trace[-1] >= spectral.trace[-1]


def test_features_carry_a_weak_graph():
    jcdc, km = [], []
    for seed in range(5):
        graph, truth = generate_dcsbm(SbmConfig(out_in_ratio=0.65, seed=seed))
        features = generate_features(truth, FeatureGenConfig(mu=2.0, seed=seed))
        jcdc.append(nmi(fit(graph, features, config=FitConfig(w_n=5.0, seed=seed)).partition, truth))
        km.append(nmi(kmeans(features, 2, seed=seed), truth))
    assert np.mean(jcdc) >= np.mean(km) - 0.05


def test_coefficients_first_start():
    graph, sims, _, _ = random_instance(6, n=16, density=0.4)
    policy = FitPolicy(initializer=Initializer.RandomBalanced(fit_betas_first=True))
    with mock.patch.object(policy, 'post_label_step') as label_step:
        fit_similarities(graph, sims, FitConfig(seed=2, max_outer_iters=1), policy)
    betas = label_step.call_args.args[2]
    assert np.any(betas.values != 0)
