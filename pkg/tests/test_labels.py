import numpy as np
import pytest

from tether import (
    BetaSet, ConfigurationError, FeatureTable, FitConfig, Graph, Partition, SbmConfig, build_similarities, generate_dcsbm,
    jcdc_criterion, tabu_label_search,
)
from tether._util import make_rng
from tether.optimizer import (
    NeighborTable, SwitchState, approx_switch_preference, exact_switch_preference, repair_sizes,
)
from tether.types import TabuConfig

from tests.instances import random_instance, two_triangles, zero_betas


def state_for(graph, sims, partition, betas, config):
    return SwitchState.build(NeighborTable.build(graph, sims), betas, partition, config)


def moved(partition, i, k):
    labels = partition.labels.copy()
    labels[i] = k
    return Partition(labels, partition.k)


def test_state_criterion_matches_jcdc():
    graph, sims, partition, betas = random_instance(0, n=10, k=3, weighted=True)
    config = FitConfig(k=3, alpha=0.8)
    state = state_for(graph, sims, partition, betas, config)
    assert state.criterion() == pytest.approx(jcdc_criterion(graph, sims, partition, betas, config), abs=1e-12)


def test_exact_preference_is_criterion_difference():
    rng = np.random.default_rng(0)
    for trial in range(1000):
        k = int(rng.integers(2, 4))
        alpha = float(rng.uniform(0.3, 1.5))
        graph, sims, partition, betas = random_instance(trial, n=int(rng.integers(4, 10)), k=k, weighted=True)
        config = FitConfig(k=k, alpha=alpha, w_n=float(rng.uniform(1.5, 6)))
        state = state_for(graph, sims, partition, betas, config)

        i = int(rng.integers(graph.n))
        l = int(partition.labels[i])
        target = int(rng.integers(k))
        before = jcdc_criterion(graph, sims, partition, betas, config)
        after = jcdc_criterion(graph, sims, moved(partition, i, target), betas, config)
        assert exact_switch_preference(state, i, target, l) == pytest.approx(after - before, abs=1e-9)
        assert state.preferences(i)[target] == pytest.approx(after - before, abs=1e-9)


def test_move_keeps_state_consistent():
    graph, sims, partition, betas = random_instance(1, n=9, k=3)
    config = FitConfig(k=3)
    state = state_for(graph, sims, partition, betas, config)
    rng = np.random.default_rng(1)
    for _ in range(20):
        state.move(int(rng.integers(9)), int(rng.integers(3)))
    cross, internal, sizes = state.cross.copy(), state.internal.copy(), state.sizes.copy()
    state.recompute()
    assert np.allclose(state.cross, cross)
    assert np.allclose(state.internal, internal)
    assert np.array_equal(state.sizes, sizes)
    assert state.criterion() == pytest.approx(jcdc_criterion(graph, sims, state.partition(), betas, config))


def test_preference_requires_current_label():
    graph, sims, partition, betas = random_instance(2)
    state = state_for(graph, sims, partition, betas, FitConfig())
    l = int(partition.labels[0])
    with pytest.raises(ValueError):
        exact_switch_preference(state, 0, l, 1 - l)
    assert exact_switch_preference(state, 0, l, l) == 0.0


def test_approx_preference():
    graph, sims, partition, betas = random_instance(3, n=10)
    state = state_for(graph, sims, partition, betas, FitConfig(alpha=1.0))
    i = 0
    l = int(partition.labels[i])
    k = 1 - l
    size_k, size_l = state.sizes[k], state.sizes[l] - 1
    expected = state.cross[i, k] / size_k - state.cross[i, l] / size_l
    assert approx_switch_preference(state, i, k, l) == pytest.approx(expected)


def test_approx_preference_falls_back_for_singletons():
    graph = two_triangles()
    sims = build_similarities(FeatureTable.continuous(np.arange(6.0)))
    partition = Partition([0, 1, 1, 1, 1, 1], 2)
    state = state_for(graph, sims, partition, zero_betas(2, 1), FitConfig())
    assert approx_switch_preference(state, 0, 1, 0) == exact_switch_preference(state, 0, 1, 0)


def test_tabu_recovers_two_triangles():
    graph = two_triangles()
    sims = build_similarities(FeatureTable.continuous(np.zeros(6)))
    start = Partition([0, 1, 0, 1, 0, 1], 2)
    result = tabu_label_search(graph, sims, start, zero_betas(2, 1), FitConfig(seed=3))
    assert result.labels[0] == result.labels[1] == result.labels[2]
    assert result.labels[3] == result.labels[4] == result.labels[5]
    assert result.labels[0] != result.labels[3]


def test_tabu_reaches_local_optimum():
    for seed in range(10):
        graph, sims, partition, betas = random_instance(seed, n=12, k=3)
        config = FitConfig(k=3, seed=seed, tabu=TabuConfig(restarts=2))
        result = tabu_label_search(graph, sims, partition, betas, config)
        state = state_for(graph, sims, result, betas, config)
        for i in range(graph.n):
            preferences = state.preferences(i)
            if state.sizes[state.labels[i]] > 1:
                assert preferences.max() <= 1e-12
        assert state.criterion() >= jcdc_criterion(graph, sims, partition, betas, config) - 1e-12


def test_tabu_respects_min_size():
    graph, sims, partition, betas = random_instance(4, n=12, density=0.7)
    config = FitConfig(min_community_size=5, seed=1)
    result = tabu_label_search(graph, sims, partition, betas, config)
    assert result.sizes().min() >= 5


def test_tabu_is_deterministic():
    graph, sims, partition, betas = random_instance(5, n=12, k=3)
    config = FitConfig(k=3, seed=9)
    first = tabu_label_search(graph, sims, partition, betas, config)
    second = tabu_label_search(graph, sims, partition, betas, config)
    assert first.equals(second)


def test_repair_sizes():
    rng = make_rng(0)
    labels = repair_sizes(np.array([0, 0, 0, 0, 0, 1]), 3, 2, rng)
    assert np.bincount(labels, minlength=3).min() >= 2
    with pytest.raises(ConfigurationError):
        repair_sizes(np.zeros(5, dtype=int), 3, 2, rng)



def test_approx_preference_favours_larger_community_below_unit_alpha():
    graph = Graph.from_edges(10, [0, 0, 0], [1, 2, 7])
    sims = build_similarities(FeatureTable.continuous(np.zeros(10)))
    partition = Partition([1, 0, 0, 0, 0, 0, 0, 1, 1, 1], 2)
    state = state_for(graph, sims, partition, zero_betas(2, 1), FitConfig(alpha=0.5))
    assert state.cross[0, 0] / 6 == pytest.approx(state.cross[0, 1] / 3)
    assert approx_switch_preference(state, 0, 0, 1) > 0
    assert approx_switch_preference(state, 0, 0, 1, alpha=1.0) == pytest.approx(0, abs=1e-12)


def test_approx_preference_agrees_in_sign_on_large_communities():
    rng = np.random.default_rng(21)
    agree = total = 0
    for seed in range(20):
        sbm = SbmConfig(community_sizes=(30, 30), within_prob=0.5, out_in_ratio=0.2, hub_fraction=0.0, seed=seed)
        graph, truth = generate_dcsbm(sbm)
        sims = build_similarities(FeatureTable.continuous(rng.standard_normal((60, 2))))
        labels = truth.labels.copy()
        flipped = rng.choice(60, size=6, replace=False)
        labels[flipped] = 1 - labels[flipped]
        partition = Partition(labels, 2)
        assert partition.sizes().min() >= 24
        betas = BetaSet(0.2 * rng.standard_normal((2, 2)))
        state = state_for(graph, sims, partition, betas, FitConfig(alpha=float(rng.uniform(0.7, 1.3))))
        for i in range(60):
            l = int(labels[i])
            exact = exact_switch_preference(state, i, 1 - l, l)
            approx = approx_switch_preference(state, i, 1 - l, l)
            agree += np.sign(exact) == np.sign(approx)
            total += 1
    assert agree / total >= 0.95
