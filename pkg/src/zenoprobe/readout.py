"""Readout of the SPQ alone after a controlled rotation by a guessed phase.

``theta`` is a guess of the accumulated phase ``omega * t``.  The phase
mismatch is ``delta = omega * t - theta``; the corresponding frequency
mismatch is ``delta / t``, so a product ``delta_freq * t**2`` in the expanded
formulas equals ``delta * t`` here and ``delta_freq**2 * t**2`` equals
``delta**2``.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass

from .fisher import EncodingParams
from .probe import NoiseModel, PurityVector, as_purity_vector, spectral_weights

#: The second-order expansion is trusted while ``delta**2 * (n + 1)`` stays below this.
SMALL_DELTA_THRESHOLD = 0.1


class ExpansionWarning(UserWarning):
    """The phase mismatch is too large for the second-order expansion."""


@dataclass(frozen=True)
class ReadoutGuess:
    theta: float
    delta: float

    @classmethod
    def from_encoding(cls, enc: EncodingParams, theta: float) -> ReadoutGuess:
        return cls(theta, enc.omega_t - theta)

    def small(self, n: int) -> bool:
        return self.delta**2 * (n + 1) <= SMALL_DELTA_THRESHOLD


def _decay(p: PurityVector, t: float, noise: NoiseModel) -> float:
    return noise.decay(t, p.n_qubits)


def spq_probabilities(
    p: PurityVector | Sequence[float],
    enc: EncodingParams,
    noise: NoiseModel,
    guess: ReadoutGuess,
) -> tuple[float, float]:
    """Exact ``(q_plus, q_minus)`` for the X measurement of the SPQ."""
    p = as_purity_vector(p)
    w = spectral_weights(p.spq, 0)
    delta = guess.delta
    prod = complex(1.0)
    for p_i in p.rpqs:
        prod *= complex(math.cos(delta), -p_i * math.sin(delta))
    z = complex(math.cos(delta), -math.sin(delta)) * (w.lambda0 * prod - w.lambda1 * prod.conjugate())
    coherence = 0.5 * _decay(p, enc.t, noise) * z.real
    return 0.5 + coherence, 0.5 - coherence


def _expanded_cfi(p0: float, s1: float, s2: float, n: int, t: float, delta: float, d2: float) -> float:
    # s1 = sum_i p_i and s2 = sum_{i<j} p_i p_j over RPQs
    slope = -2 * delta * t * s1 + p0 * (-(n + 1) * delta * t - 2 * delta * t * s2)
    contrast = -(delta**2) * s1 + p0 * (1 - (n + 1) * delta**2 / 2 - delta**2 * s2)
    num = d2 * slope**2
    if num == 0.0:
        return 0.0
    return num / (1 - d2 * contrast**2)


def _check_regime(p: PurityVector, guess: ReadoutGuess) -> None:
    if not guess.small(p.n):
        warnings.warn(
            f"delta**2 (n+1) = {guess.delta**2 * p.n_qubits:.3g} exceeds {SMALL_DELTA_THRESHOLD}; "
            "second-order expansion may be inaccurate",
            ExpansionWarning,
            stacklevel=3,
        )


def spq_cfi_exact(
    p: PurityVector | Sequence[float],
    enc: EncodingParams,
    noise: NoiseModel,
    guess: ReadoutGuess,
) -> float:
    """CFI of the SPQ readout from the probabilities expanded to second order in ``delta``."""
    p = as_purity_vector(p)
    _check_regime(p, guess)
    rpq = p.rpqs
    s1 = math.fsum(rpq)
    s2 = (s1 * s1 - math.fsum(x * x for x in rpq)) / 2
    return _expanded_cfi(p.spq, s1, s2, p.n, enc.t, guess.delta, _decay(p, enc.t, noise) ** 2)


def spq_cfi_averaged(
    p: PurityVector | Sequence[float],
    enc: EncodingParams,
    noise: NoiseModel,
    guess: ReadoutGuess,
) -> float:
    """As :func:`spq_cfi_exact` with the pair sum replaced by ``n (n-1) <p>**2 / 2``."""
    p = as_purity_vector(p)
    _check_regime(p, guess)
    n, mean = p.n, p.mean_rpq
    return _expanded_cfi(
        p.spq, n * mean, n * (n - 1) * mean**2 / 2, n, enc.t, guess.delta, _decay(p, enc.t, noise) ** 2
    )


def large_n_delta(p: PurityVector | Sequence[float]) -> float:
    """Phase mismatch ``sqrt(2 / (n (1 + n <p>**2)))`` at which the CFI denominator is ~1."""
    p = as_purity_vector(p)
    return math.sqrt(2 / (p.n * (1 + p.n * p.mean_rpq**2)))


def spq_cfi_large_n(p: PurityVector | Sequence[float], t: float, noise: NoiseModel) -> float:
    """Large-``n`` form ``2 D**2 t**2 n**2 [2<p>**2 + p0 (1+n)]**2 / (n (1 + n <p>**2))``."""
    p = as_purity_vector(p)
    n, mean = p.n, p.mean_rpq
    d2 = _decay(p, t, noise) ** 2
    return 2 * d2 * t * t * n * n * (2 * mean**2 + p.spq * (1 + n)) ** 2 / (n * (1 + n * mean**2))
