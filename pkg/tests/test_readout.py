import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import purity_vectors, rel
from zenoprobe import EncodingParams, NoiseModel, PurityVector
from zenoprobe.oracle import spq_readout_probabilities
from zenoprobe.readout import (
    ExpansionWarning,
    ReadoutGuess,
    large_n_delta,
    spq_cfi_averaged,
    spq_cfi_exact,
    spq_cfi_large_n,
    spq_probabilities,
)

HALF_PI = math.pi / 2


def guess_at(enc, delta):
    return ReadoutGuess(enc.omega_t - delta, delta)


def fd_cfi(p, enc, noise, delta, h=1e-6):
    # CFI in omega from central differences of the exact probabilities
    def probs(shift):
        shifted = EncodingParams(enc.t, enc.omega_t + shift * enc.t)
        return np.array(spq_probabilities(p, shifted, noise, ReadoutGuess(enc.omega_t - delta, delta + shift * enc.t)))

    q0 = probs(0.0)
    dq = (probs(h) - probs(-h)) / (2 * h)
    return float((dq**2 / q0).sum())


def test_guess_from_encoding():
    guess = ReadoutGuess.from_encoding(EncodingParams(2.0, 1.0), 0.85)
    assert guess.delta == pytest.approx(0.15)
    assert guess.small(2)
    assert not ReadoutGuess(0.0, 0.5).small(2)


@given(purity_vectors(2, 8), st.floats(0.1, 2.0), st.floats(0.0, 1.0))
def test_zero_mismatch_probabilities(p, t, g):
    enc = EncodingParams(t, 0.9)
    noise = NoiseModel(g)
    q_plus, q_minus = spq_probabilities(p, enc, noise, guess_at(enc, 0.0))
    coherence = p[0] * math.exp(-len(p) * g * t)
    assert q_plus == pytest.approx((1 + coherence) / 2, abs=1e-14)
    assert q_minus == pytest.approx((1 - coherence) / 2, abs=1e-14)


def test_fully_mixed_probabilities():
    enc = EncodingParams(1.0)
    assert spq_probabilities([0.0] * 5, enc, NoiseModel(), guess_at(enc, 0.3)) == (0.5, 0.5)


@given(purity_vectors(2, 9), st.floats(-math.pi, math.pi), st.floats(0.1, 2.0), st.floats(0.0, 2.0))
def test_probabilities_normalised(p, delta, t, g):
    enc = EncodingParams(t)
    q_plus, q_minus = spq_probabilities(p, enc, NoiseModel(g, 1.5), guess_at(enc, delta))
    assert 0.0 <= q_plus <= 1.0 and 0.0 <= q_minus <= 1.0
    assert q_plus + q_minus == pytest.approx(1.0, abs=1e-15)


@given(purity_vectors(2, 6), st.floats(0.0, 3.0), st.floats(-1.0, 1.0), st.floats(0.2, 1.5), st.floats(0.0, 1.0))
def test_probabilities_match_dense_readout(p, omega_t, delta, t, g):
    noise = NoiseModel(g, 1.0)
    enc = EncodingParams(t, omega_t)
    closed = spq_probabilities(p, enc, noise, guess_at(enc, delta))
    dense = spq_readout_probabilities(p, omega_t, omega_t - delta, t, noise)
    assert closed == pytest.approx(dense, abs=1e-10)


def test_zero_mismatch_has_zero_cfi():
    enc = EncodingParams(1.0)
    assert spq_cfi_exact([0.7, 0.2, 0.9], enc, NoiseModel(), guess_at(enc, 0.0)) == 0.0
    assert spq_cfi_averaged([0.7, 0.2, 0.9], enc, NoiseModel(), guess_at(enc, 0.0)) == 0.0


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_pure_spq_mixed_register_limit(n):
    # only the SPQ carries phase information: the value tends to (n+1) t^2
    t = 0.7
    enc = EncodingParams(t)
    value = spq_cfi_exact(PurityVector.tilted(n), enc, NoiseModel(), guess_at(enc, 1e-4))
    assert value == pytest.approx((n + 1) * t * t, rel=1e-6)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_pure_probe_against_finite_differences(n):
    p = PurityVector.uniform(1.0, n)
    enc = EncodingParams(1.0)
    delta = 0.02
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        expanded = spq_cfi_exact(p, enc, NoiseModel(), guess_at(enc, delta))
    assert rel(expanded, fd_cfi(p, enc, NoiseModel(), delta)) <= 0.01


@pytest.mark.parametrize("seed", range(5))
def test_mixed_probe_against_finite_differences(seed):
    rng = np.random.default_rng(seed)
    p = PurityVector(rng.random(int(rng.integers(3, 8))))
    enc, noise = EncodingParams(0.9), NoiseModel(0.2)

    def error(delta):
        return rel(spq_cfi_exact(p, enc, noise, guess_at(enc, delta)), fd_cfi(p, enc, noise, delta))

    # dropped terms are higher order in delta, so halving delta cuts the error about fourfold
    assert error(0.03) <= 0.02
    assert error(0.015) <= error(0.03) / 3


@given(st.floats(0.0, 1.0), st.integers(1, 20), st.floats(0.005, 0.05))
def test_averaged_is_exact_for_uniform_probes(x, n, delta):
    p = PurityVector([0.3] + [x] * n)
    enc = EncodingParams(1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExpansionWarning)
        exact = spq_cfi_exact(p, enc, NoiseModel(), guess_at(enc, delta))
        averaged = spq_cfi_averaged(p, enc, NoiseModel(), guess_at(enc, delta))
    assert abs(exact - averaged) <= 1e-12 * max(exact, 1e-300)


def test_warning_outside_small_mismatch():
    enc = EncodingParams(1.0)
    with pytest.warns(ExpansionWarning):
        spq_cfi_exact([1.0] * 5, enc, NoiseModel(), guess_at(enc, 0.5))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        spq_cfi_exact([1.0] * 5, enc, NoiseModel(), guess_at(enc, 0.1))


def test_large_n_denominator_tends_to_one():
    for n in (8, 40, 200):
        p = PurityVector.uniform(1.0, n)
        delta = large_n_delta(p)
        contrast = 1 - delta**2 * (n + 1) ** 2 / 2
        assert 1 - contrast**2 >= 1 - 1.01 / n**2


def test_large_n_form_converges():
    ratios = []
    for n in (8, 16, 40, 100, 400):
        p = PurityVector.uniform(1.0, n)
        enc = EncodingParams(1.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ExpansionWarning)
            exact = spq_cfi_exact(p, enc, NoiseModel(), guess_at(enc, large_n_delta(p)))
        ratios.append(exact / spq_cfi_large_n(p, 1.0, NoiseModel()))
    assert ratios == sorted(ratios)
    assert abs(ratios[-1] - 1) < 0.01


def test_large_n_delta_value():
    assert large_n_delta([0.5, 1.0, 1.0, 1.0, 1.0]) == pytest.approx(math.sqrt(2 / (4 * 5)))
