import numpy as np
import pytest

from tether import (
    ConfigurationError, FeatureTable, FitConfig, FitPolicy, Graph, InitializationFailed, Initializer, TetherError,
    build_similarities,
)

from tests.instances import two_triangles


def sims_for(values):
    return build_similarities(FeatureTable.continuous(values))


def test_spectral_initializer():
    partition = Initializer.Spectral()._execute(two_triangles(), sims_for(np.arange(6.0)), FitConfig())
    assert len(set(partition.labels[:3])) == 1
    assert partition.labels[0] != partition.labels[3]


def test_spectral_falls_back_on_empty_graph(caplog):
    initializer = Initializer.Spectral(tau=0.0, fallback=Initializer.RandomBalanced())
    partition = initializer._execute(Graph.empty(6), sims_for(np.arange(6.0)), FitConfig())
    assert partition.sizes().tolist() == [3, 3]
    assert 'Falling back' in caplog.text


def test_no_fallback_raises():
    with pytest.raises(InitializationFailed):
        Initializer.Spectral(tau=0.0)._execute(Graph.empty(6), sims_for(np.arange(6.0)), FitConfig())


def test_kmeans_initializer_uses_features():
    values = np.array([0.0, 0.1, 0.2, 5.0, 5.1, 5.2])
    partition = Initializer.KMeansFeatures()._execute(Graph.empty(6), sims_for(values), FitConfig())
    assert len(set(partition.labels[:3])) == 1
    assert partition.labels[0] != partition.labels[3]


def test_random_initializer_is_balanced_and_seeded():
    sims = sims_for(np.arange(7.0))
    first = Initializer.RandomBalanced()._execute(Graph.empty(7), sims, FitConfig(k=3, seed=1))
    second = Initializer.RandomBalanced()._execute(Graph.empty(7), sims, FitConfig(k=3, seed=1))
    assert sorted(first.sizes().tolist()) == [2, 2, 3]
    assert first.equals(second)


def test_given_initializer_checks_length():
    with pytest.raises(ValueError):
        Initializer.Given()
    with pytest.raises(ValueError):
        Initializer.Given(labels=[0, 1])._execute(two_triangles(), sims_for(np.arange(6.0)), FitConfig())


def test_default_policy():
    policy = FitPolicy()
    assert isinstance(policy.initializer, Initializer.Spectral)
    assert isinstance(policy.initializer.fallback, Initializer.RandomBalanced)
    assert isinstance(policy.initializers[1], Initializer.KMeansFeatures)
    assert policy.initializers[1].fit_betas_first
    assert not policy.initializer.fit_betas_first


def test_initialization_failure_is_a_tether_error():
    assert issubclass(InitializationFailed, TetherError)
    assert issubclass(InitializationFailed, RuntimeError)


def test_initial_partitions_drop_repeated_starts():
    labels = [0, 0, 0, 1, 1, 1]
    policy = FitPolicy(initializers=[Initializer.Given(labels=labels), Initializer.Given(labels=labels)])
    starts = policy.initial_partitions(two_triangles(), sims_for(np.arange(6.0)), FitConfig())
    assert len(starts) == 1
    assert starts[0].partition.labels.tolist() == labels

    policy = FitPolicy(initializers=[Initializer.Given(labels=labels), Initializer.Given(labels=labels, fit_betas_first=True)])
    starts = policy.initial_partitions(two_triangles(), sims_for(np.arange(6.0)), FitConfig())
    assert [start.fit_betas_first for start in starts] == [False, True]


def test_single_and_several_initializers_are_exclusive():
    with pytest.raises(ConfigurationError):
        FitPolicy(initializer=Initializer.RandomBalanced(), initializers=[Initializer.Spectral()])
    assert FitPolicy(initializer=Initializer.RandomBalanced()).initializers == (Initializer.RandomBalanced(),)
