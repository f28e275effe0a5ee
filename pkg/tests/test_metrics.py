import itertools

import numpy as np
import pytest

from tether import (
    BetaSet, BlockModelSpec, ConfigurationError, DimensionMismatch, FeatureTable, Graph, Partition, SbmConfig,
    build_similarities, check_conditions, g_functional, misclassification_distance, nmi, population_criterion,
)
from tether.metrics import (
    ConfusionMatrix, GaussianSimilarityModel, aligned_l1_gap, alpha_lower_bound, confusion_matrix, deviation_from_population,
    maximizer_search, sample_feasible_confusion,
)
from tether.types import CheckStatus


def random_partition(rng, n, k) -> Partition:
    return Partition(rng.integers(k, size=n), k)


def section_spec(r: float = 0.25) -> BlockModelSpec:
    return BlockModelSpec.from_sbm(SbmConfig(out_in_ratio=r))


def test_nmi_basic_cases():
    c = Partition([0, 0, 1, 1, 2, 2], 3)
    assert nmi(c, c) == pytest.approx(1.0)
    assert nmi(c.permuted([2, 0, 1]), c) == pytest.approx(1.0)
    assert nmi(Partition.single(6), Partition([0, 0, 0, 1, 1, 1], 2)) == 0.0
    assert nmi(Partition.single(6), Partition.single(6)) == 1.0


def test_nmi_is_symmetric():
    rng = np.random.default_rng(0)
    for _ in range(20):
        e, c = random_partition(rng, 30, 3), random_partition(rng, 30, 2)
        assert nmi(e, c) == pytest.approx(nmi(c, e))
        assert 0 <= nmi(e, c) <= 1


def test_nmi_normalizations():
    e = Partition([0, 0, 1, 1, 1, 0], 2)
    c = Partition([0, 0, 1, 1, 0, 0], 2)
    values = {method: nmi(e, c, method) for method in ('geometric', 'arithmetic', 'max', 'min')}
    assert values['max'] <= values['geometric'] <= values['min']
    with pytest.raises(ConfigurationError):
        nmi(e, c, 'median')


def test_length_mismatch():
    with pytest.raises(DimensionMismatch):
        nmi(Partition.single(3), Partition.single(4))
    with pytest.raises(DimensionMismatch):
        misclassification_distance(Partition.single(3), Partition.single(4))


def test_misclassification_distance():
    c = Partition(np.repeat([0, 1], 5), 2)
    assert misclassification_distance(c, c) == 0
    assert misclassification_distance(c.permuted([1, 0]), c) == 0
    flipped = c.labels.copy()
    flipped[0] = 1
    assert misclassification_distance(Partition(flipped, 2), c) == pytest.approx(0.1)


def test_misclassification_distance_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(50):
        e, c = random_partition(rng, 20, 3), random_partition(rng, 20, 3)
        expected = min(
            np.mean(np.asarray(permutation)[e.labels] != c.labels)
            for permutation in itertools.permutations(range(3))
        )
        assert misclassification_distance(e, c) == pytest.approx(expected)


def test_misclassification_distance_pads_communities():
    e = Partition([0, 0, 1, 1], 2)
    c = Partition([0, 1, 2, 2], 3)
    assert misclassification_distance(e, c) == pytest.approx(0.25)


def test_many_communities_use_assignment():
    rng = np.random.default_rng(2)
    c = random_partition(rng, 60, 10)
    shuffled = c.permuted(rng.permutation(10))
    assert misclassification_distance(shuffled, c) == 0


def test_aligned_gap_is_twice_the_distance():
    rng = np.random.default_rng(3)
    for _ in range(100):
        e, c = random_partition(rng, 25, 3), random_partition(rng, 25, 3)
        confusion = confusion_matrix(e, c)
        assert abs(aligned_l1_gap(confusion) - 2 * misclassification_distance(e, c)) <= 1e-12


def test_confusion_matrix():
    e = Partition([0, 0, 1, 1], 2)
    c = Partition([0, 1, 1, 1], 2)
    confusion = confusion_matrix(e, c)
    assert confusion.u.tolist() == [[0.25, 0.25], [0, 0.5]]
    assert confusion.pi.tolist() == [0.25, 0.75]
    assert confusion.is_feasible()
    with pytest.raises(DimensionMismatch):
        ConfusionMatrix(np.zeros((2, 3)), [0.5, 0.5])


def test_g_functional():
    pi = np.array([2 / 3, 1 / 3])
    p_matrix = np.array([[0.1, 0.025], [0.025, 0.1]])
    assert g_functional(np.diag(pi), p_matrix, 1.0) == pytest.approx(0.1)
    assert g_functional(np.diag(pi), p_matrix, 0.5) == pytest.approx(sum(pi ** 1.5 * 0.1))

    u = np.tile(pi / 2, (2, 1))
    expected = 0.0
    for k in range(2):
        inner = sum(u[k, l] * u[k, m] * p_matrix[l, m] for l in range(2) for m in range(2))
        expected += inner / u[k].sum() ** 0.8
    assert g_functional(u, p_matrix, 0.8) == pytest.approx(expected)

    assert g_functional(np.array([[0.5, 0.5], [0.0, 0.0]]), p_matrix, 1.0) == pytest.approx(0.0625)


def test_sampled_confusions_are_feasible():
    pi = np.array([0.5, 0.3, 0.2])
    samples = sample_feasible_confusion(pi, np.random.default_rng(4), size=50)
    assert samples.shape == (50, 3, 3)
    assert all(ConfusionMatrix(u, pi).is_feasible() for u in samples)


def test_perfect_recovery_maximizes_g():
    search = maximizer_search(section_spec(), 1.0, samples=5000, seed=1)
    assert not search.exceeded
    assert search.at_alignment
    assert search.best_value == pytest.approx(search.g_d)


def test_population_criterion_without_coefficients():
    spec = section_spec()
    model = GaussianSimilarityModel(mu=1.0, pi=tuple(spec.pi), moment_pairs=1000)
    c = Partition.from_sizes([6, 3])
    e = Partition([0, 0, 0, 0, 1, 1, 1, 1, 1], 2)
    estimate = population_criterion(e, c, BetaSet.zeros(2, model.p), spec, model, w_n=5.0, alpha=1.0, mc_samples=10)

    expected = 0.0
    for k in range(2):
        members = e.members(k)
        total = sum(spec.p_matrix[c.labels[i], c.labels[j]] for i in members for j in members if i != j)
        expected += 4.0 * total / len(members)
    assert estimate.value == pytest.approx(expected)
    assert estimate.stderr == 0


def test_population_criterion_validation():
    spec = section_spec()
    model = GaussianSimilarityModel(mu=1.0, pi=tuple(spec.pi), moment_pairs=1000)
    c = Partition.from_sizes([2, 2])
    with pytest.raises(ConfigurationError):
        population_criterion(c, c, BetaSet.zeros(2, 2), spec, model, 5.0, 1.0, mc_samples=1)
    with pytest.raises(DimensionMismatch):
        population_criterion(c, c, BetaSet.zeros(2, 3), spec, model, 5.0, 1.0)


def test_deviation_vanishes_on_the_expected_graph():
    spec = section_spec()
    model = GaussianSimilarityModel(mu=1.0, pi=tuple(spec.pi), moment_pairs=1000)
    c = Partition.from_sizes([6, 3])
    e = Partition([0, 0, 0, 0, 1, 1, 1, 1, 1], 2)
    expected = spec.rho * spec.p_matrix[c.labels[:, None], c.labels[None, :]]
    np.fill_diagonal(expected, 0)
    sims = build_similarities(FeatureTable.continuous(np.random.default_rng(0).normal(size=(9, 2))))

    deviation = deviation_from_population(
        Graph(expected), sims, e, c, BetaSet.zeros(2, 2), spec, model, w_n=5.0, alpha=1.0, mc_samples=10,
    )
    assert deviation.value == pytest.approx(0, abs=1e-12)
    assert deviation.criterion == pytest.approx(deviation.population.value)
    scale = 5.0 * spec.rho * 9
    assert deviation.centred_on_g == pytest.approx(abs(deviation.criterion / scale - g_functional(
        confusion_matrix(e, c), spec.p_matrix, 1.0)))


def test_similarity_model_is_standardized():
    model = GaussianSimilarityModel(mu=1.0, pi=(0.5, 0.5), moment_pairs=20_000)
    rng = np.random.default_rng(5)
    mixed = np.concatenate([model.sample(a, b, 5000, rng) for a in (0, 1) for b in (0, 1)])
    assert np.allclose(mixed.mean(axis=0), 0, atol=0.05)
    assert model.sample(0, 0, 2000, rng)[:, 0].mean() > model.sample(0, 1, 2000, rng)[:, 0].mean()
    assert model.m_phi > 0


def test_conditions_hold_for_simulation_defaults():
    report = check_conditions(section_spec(0.25), m_phi=0.3, m_beta=5.0, w_n=5.0, alpha=1.0)
    assert report.ok
    assert report.item('alpha_range').value['lower'] == pytest.approx(0.5)
    assert alpha_lower_bound(section_spec(0.25)) == pytest.approx(0.5)


def test_alpha_on_the_lower_bound():
    report = check_conditions(section_spec(0.25), m_phi=0.3, m_beta=5.0, w_n=5.0, alpha=0.5)
    assert report.item('alpha_range').status == CheckStatus.BOUNDARY_PASS
    assert report.ok
    assert check_conditions(section_spec(0.25), 0.3, 5.0, 5.0, 0.4).item('alpha_range').status == CheckStatus.FAIL


def test_conditions_fail():
    report = check_conditions(section_spec(0.75), m_phi=0.3, m_beta=5.0, w_n=5.0, alpha=1.0)
    assert report.item('assortativity').status == CheckStatus.FAIL
    assert not report.ok

    weak = check_conditions(section_spec(0.25), m_phi=1.0, m_beta=5.0, w_n=5.0, alpha=1.0)
    assert [item.name for item in weak.failures()] == ['weight_bound']


def test_single_community_conditions():
    spec = BlockModelSpec(np.array([[0.2]]), np.array([1.0]))
    report = check_conditions(spec, 0.1, 1.0, 5.0, 1.0)
    assert report.item('assortativity').status == CheckStatus.PASS
    assert alpha_lower_bound(spec) == 0.0
