import math

import numpy as np
import pytest

from zenoprobe import DomainError, NoiseModel, PurityVector, cfi_tilted, cfi_uniform, fisher_sum, qfi
from zenoprobe.experiments import (
    ASYMMETRY_PROBE,
    SUMMARIZERS,
    ExperimentConfig,
    approx_correlation_study,
    crossover_point,
    crossover_study,
    majorisation_study,
    majorizes,
    monotonicity_study,
    no_first_cnot_asymmetry,
    ordering_chain,
    pearson,
    sample_rng,
    scaling_study,
    spq_correlation_study,
    symmetry_study,
    t_transform,
)

SMALL = ExperimentConfig(seed=5, samples=300)


def test_config_validation():
    with pytest.raises(DomainError):
        ExperimentConfig(samples=0)
    with pytest.raises(DomainError):
        ExperimentConfig(seed=-1)
    with pytest.raises(DomainError):
        ExperimentConfig(n_min=4, n_max=3)
    with pytest.raises(DomainError):
        ExperimentConfig(n_max=40)
    assert ExperimentConfig(g=0.3, alpha=2.0).noise == NoiseModel(0.3, 2.0)


def test_sample_stream_depends_only_on_seed_and_index():
    a = sample_rng(9, 4).random(3)
    b = sample_rng(9, 4).random(3)
    c = sample_rng(9, 5).random(3)
    assert a.tolist() == b.tolist()
    assert a.tolist() != c.tolist()


# -- Pearson anchors -----------------------------------------------------------


def test_pearson_perfect_correlation():
    x = np.linspace(0, 5, 50)
    assert pearson(x, 3 * x + 1) == pytest.approx(1.0, abs=1e-12)
    assert pearson(x, -x) == pytest.approx(-1.0, abs=1e-12)


def test_pearson_independent_samples():
    rng = np.random.default_rng(0)
    assert abs(pearson(rng.random(100_000), rng.random(100_000))) < 0.05


# -- determinism and threading ---------------------------------------------------


@pytest.mark.parametrize(
    "run",
    [
        lambda cfg, th: approx_correlation_study(cfg, th),
        lambda cfg, th: monotonicity_study(cfg, "single", th),
        lambda cfg, th: monotonicity_study(cfg, "full", th),
        lambda cfg, th: symmetry_study(cfg, th, with_counterexample=False),
        lambda cfg, th: majorisation_study(cfg, th),
        lambda cfg, th: spq_correlation_study(cfg, th),
    ],
)
def test_threads_do_not_change_rows(run):
    sequential = run(SMALL, 1)
    threaded = run(SMALL, 4)
    assert sequential.rows == threaded.rows
    assert sequential.summary == threaded.summary
    assert len(sequential.rows) == SMALL.samples
    assert [row[0] for row in sequential.rows] == list(range(SMALL.samples))


def test_summaries_recomputable():
    for result in (
        approx_correlation_study(SMALL),
        monotonicity_study(SMALL),
        symmetry_study(SMALL),
        majorisation_study(SMALL),
        spq_correlation_study(SMALL),
        crossover_study(),
        scaling_study(2.0),
    ):
        recomputed = SUMMARIZERS[result.study](result.rows)
        assert recomputed.items() <= result.summary.items()


# -- rows recomputable from public operations ------------------------------------


def test_approx_rows_recomputable():
    result = approx_correlation_study(ExperimentConfig(seed=3, samples=50))
    for index, n, p, mean_sq, approx, exact in result.rows:
        probe = PurityVector(p)
        assert probe.n == n
        assert mean_sq == probe.mean_square
        assert approx == probe.mean_square * (n + 1) ** 2
        assert exact == fisher_sum(p)


def test_approx_pure_samples_on_diagonal():
    for n in range(1, 12):
        pure = [1.0] * (n + 1)
        assert fisher_sum(pure) == pytest.approx(PurityVector(pure).mean_square * (n + 1) ** 2, rel=1e-12)


def test_mono_rows_recomputable():
    cfg = ExperimentConfig(seed=8, samples=40, t=0.7, g=0.2, alpha=1.5)
    for mode in ("single", "full"):
        for index, n, j, p, eps, mean_eps_sq, base, perturbed, diff in monotonicity_study(cfg, mode).rows:
            raised = np.minimum(np.add(p, eps), 1.0)
            assert base == qfi(p, cfg.t, cfg.noise)
            assert perturbed == qfi(raised, cfg.t, cfg.noise)
            assert diff == perturbed - base
            if mode == "single":
                assert sum(e > 0 for e in eps) <= 1 and eps[j] > 0
            else:
                assert j == -1


def test_zero_perturbation_changes_nothing():
    p = [0.3, 0.6, 0.1]
    assert qfi(np.add(p, 0.0), 1.0, NoiseModel()) - qfi(p, 1.0, NoiseModel()) == 0.0


def test_ordering_chain():
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(2, 8))
        p = rng.random(n + 1) * 0.5
        j, k = rng.choice(n + 1, size=2, replace=False)
        eps_k, eps_j = np.sort(rng.random(2) * 0.5)
        both, only_j, only_k, base = ordering_chain(p, int(j), int(k), float(eps_j), float(eps_k))
        assert both >= only_j - 1e-12 and only_k >= base - 1e-12
        assert both >= only_k - 1e-12 and only_j >= base - 1e-12


def test_ordering_chain_with_equal_starting_purities():
    # the middle link needs p_j == p_k; for unequal entries it can fail
    rng = np.random.default_rng(5)
    for _ in range(300):
        n = int(rng.integers(2, 8))
        p = rng.random(n + 1) * 0.5
        j, k = (int(i) for i in rng.choice(n + 1, size=2, replace=False))
        p[k] = p[j]
        eps_k, eps_j = np.sort(rng.random(2) * 0.5)
        both, only_j, only_k, base = ordering_chain(p, j, k, float(eps_j), float(eps_k))
        assert both >= only_j - 1e-12
        assert only_j >= only_k - 1e-12
        assert only_k >= base - 1e-12


def test_symmetry_identity_permutation():
    p = np.random.default_rng(2).random(5)
    assert qfi(p[np.arange(5)], 1.0, NoiseModel()) == qfi(p, 1.0, NoiseModel())


def test_symmetry_rows_recomputable():
    result = symmetry_study(ExperimentConfig(seed=1, samples=30), with_counterexample=False)
    for index, n, p, perm, base, moved, rel_dev in result.rows:
        assert sorted(perm) == list(range(n + 1))
        assert moved == qfi([p[i] for i in perm], 1.0, NoiseModel())
        assert rel_dev <= 1e-12


def test_no_first_cnot_closed_form():
    # without the first CNOT layer the CFI depends on the qubit order
    deviation, values = no_first_cnot_asymmetry()
    p0, p1, p2 = ASYMMETRY_PROBE
    l1, l2 = (1 + p1) / 2, (1 + p2) / 2
    assert values[0] == pytest.approx(p0**2 * (8 * l1 * l2 + 1), rel=1e-8)
    assert deviation > 1e-3


def test_no_first_cnot_symmetric_for_equal_purities():
    deviation, _ = no_first_cnot_asymmetry((0.4, 0.4, 0.4))
    assert deviation < 1e-8


# -- crossover -------------------------------------------------------------------


def test_crossover_point_balances_protocols():
    for n in (2, 4, 8, 12):
        p_star = crossover_point(n, tol=1e-10)
        assert cfi_uniform(p_star, n, 1.0) == pytest.approx(cfi_tilted(n, 1.0), rel=1e-8)


def test_pure_uniform_beats_tilted():
    for n in range(2, 13, 2):
        assert cfi_uniform(1.0, n, 1.0) >= cfi_tilted(n, 1.0)


def test_uniform_wins_above_inverse_sqrt():
    # the inverse-sqrt threshold is sufficient for the uniform protocol to win
    for n in range(2, 13, 2):
        for p in np.linspace(1 / math.sqrt(n + 1), 1.0, 25):
            assert cfi_uniform(float(p), n, 1.0) >= cfi_tilted(n, 1.0)


def test_crossover_rows():
    result = crossover_study(2, 5)
    assert [row[0] for row in result.rows] == [2, 3, 4, 5]
    assert result.rows[1][2] == 0.5


# -- scaling -----------------------------------------------------------------------


@pytest.mark.parametrize("alpha, slope", [(2.0, 0.5), (4.0, 0.75), (1.5, 1 / 3)])
def test_scaling_slope(alpha, slope):
    result = scaling_study(alpha)
    assert result.summary["slope"] == pytest.approx(slope, abs=0.05)
    assert result.summary["max_rel_dev_from_predicted"] <= 1e-12


def test_scaling_without_zeno_gives_no_advantage():
    result = scaling_study(1.0)
    assert all(abs(row[6] - 1) <= 1e-12 for row in result.rows)
    assert result.summary["slope"] == pytest.approx(0.0, abs=1e-12)


def test_scaling_rows_use_optimal_times():
    for n, n_qubits, t_c, t_u, f_c, f_u, ratio, predicted in scaling_study(2.0, g=0.5).rows:
        assert t_c == pytest.approx(t_u / math.sqrt(n_qubits), rel=1e-14)
        assert ratio == f_c / f_u


# -- majorisation -----------------------------------------------------------------


def test_t_transform_is_majorised():
    rng = np.random.default_rng(6)
    for _ in range(100):
        x = np.sort(rng.random(6))[::-1]
        y = t_transform(x, 0, 4, rng.random())
        assert majorizes(x, y)
        assert y.sum() == pytest.approx(x.sum(), abs=1e-12)


def test_majorizes_basic():
    assert majorizes([1, 0, 0], [0.5, 0.5, 0])
    assert not majorizes([0.5, 0.5, 0], [1, 0, 0])
    assert not majorizes([1, 0], [0.5, 0.4])


def test_majorisation_pairs_satisfy_precondition():
    result = majorisation_study(ExperimentConfig(seed=2, samples=100))
    for index, n, p, q, f_p, f_q, agrees in result.rows:
        assert majorizes(p, q, tol=1e-9)
        assert agrees == int(f_p >= f_q)


def test_identical_vectors_equal_cfi():
    p = [0.9, 0.5, 0.2]
    assert qfi(p, 1.0, NoiseModel()) == qfi(list(p), 1.0, NoiseModel())


# -- single-qubit readout -------------------------------------------------------------


def test_spq_rows_use_requested_delta():
    result = spq_correlation_study(ExperimentConfig(seed=4, samples=20), delta=0.02)
    assert {row[3] for row in result.rows} == {0.02}
    assert result.summary["pearson"] > 0.9
