"""Probe parameterisation and the eigen-structure of the prepared GHZ-diagonal state.

Bitstring convention
--------------------
An RPQ outcome string ``k = (k_1, ..., k_n)`` is packed little-endian into an
unsigned integer: ``k_1`` is the least significant bit.  The complement
``1 - k`` is therefore ``(2**n - 1) ^ k``.  Every module uses this layout.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ResourceError

#: Hard cap on ``n`` for full 2**n enumeration.
ENUMERATION_CAP = 24

# Low bits materialised per chunk when enumerating; 2**16 doubles = 512 KiB.
_CHUNK_BITS = 16


class SpectralWeights(NamedTuple):
    lambda0: float
    lambda1: float


def spectral_weights(p_i: float, index: int | None = None) -> SpectralWeights:
    """Diagonal populations ``((1 + p)/2, (1 - p)/2)`` of a qubit with Bloch length ``p``.

    ``lambda1`` is formed as ``1 - lambda0`` so the pair sums to one exactly.
    """
    p_i = float(p_i)
    if not 0.0 <= p_i <= 1.0:
        where = "" if index is None else f" at index {index}"
        raise DomainError(f"purity{where} must lie in [0, 1], got {p_i!r}")
    lambda0 = (1.0 + p_i) / 2.0
    return SpectralWeights(lambda0, 1.0 - lambda0)


@dataclass(frozen=True)
class PurityVector:
    """Bloch-vector lengths ``(p_0, p_1, ..., p_n)``; index 0 is the SPQ."""

    entries: tuple[float, ...]

    def __init__(self, entries: Sequence[float]):
        values = tuple(float(x) for x in entries)
        if len(values) < 2:
            raise DomainError("a purity vector needs at least one SPQ and one RPQ (length >= 2)")
        for i, value in enumerate(values):
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"purity at index {i} must lie in [0, 1], got {value!r}")
        object.__setattr__(self, "entries", values)

    @classmethod
    def uniform(cls, p: float, n: int) -> PurityVector:
        return cls([p] * (n + 1))

    @classmethod
    def tilted(cls, n: int) -> PurityVector:
        """Pure SPQ, maximally mixed RPQs."""
        return cls([1.0] + [0.0] * n)

    @property
    def n(self) -> int:
        """Number of register qubits."""
        return len(self.entries) - 1

    @property
    def n_qubits(self) -> int:
        return len(self.entries)

    @property
    def spq(self) -> float:
        return self.entries[0]

    @property
    def rpqs(self) -> tuple[float, ...]:
        return self.entries[1:]

    @property
    def mean_square(self) -> float:
        """Normalised squared length ``<p^2>`` over all n+1 qubits."""
        return math.fsum(x * x for x in self.entries) / self.n_qubits

    @property
    def mean_rpq(self) -> float:
        """Average RPQ purity ``<p>`` (the SPQ is excluded)."""
        return math.fsum(self.rpqs) / self.n

    def weights(self) -> list[SpectralWeights]:
        return [spectral_weights(x, i) for i, x in enumerate(self.entries)]

    def permuted(self, order: Sequence[int]) -> PurityVector:
        if sorted(order) != list(range(self.n_qubits)):
            raise DomainError(f"{list(order)} is not a permutation of 0..{self.n}")
        return PurityVector([self.entries[i] for i in order])

    def discard_last(self) -> PurityVector:
        """Drop the last RPQ (used to make ``n`` even)."""
        if self.n < 2:
            raise DomainError("cannot discard the only RPQ")
        return PurityVector(self.entries[:-1])

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[float]:
        return iter(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)


def as_purity_vector(p: PurityVector | Sequence[float]) -> PurityVector:
    return p if isinstance(p, PurityVector) else PurityVector(p)


@dataclass(frozen=True)
class NoiseModel:
    """Dephasing with per-qubit coherence decay ``exp(-g t**alpha)``."""

    g: float = 0.0
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not (self.g >= 0.0 and math.isfinite(self.g)):
            raise DomainError(f"dephasing rate g must be finite and >= 0, got {self.g!r}")
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise DomainError(f"exponent alpha must be finite and > 0, got {self.alpha!r}")

    def exponent(self, t: float) -> float:
        """``g * t**alpha``, the single-qubit decay exponent."""
        if t < 0:
            raise DomainError(f"time must be >= 0, got {t!r}")
        return self.g * t**self.alpha

    def decay(self, t: float, n_qubits: int = 1) -> float:
        """Coherence factor of an ``n_qubits``-body off-diagonal element."""
        return math.exp(-n_qubits * self.exponent(t))


def _hamming_weights(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)


def _population_products(lams: Sequence[SpectralWeights]) -> np.ndarray:
    """``A[k] = prod_i lambda^{(i)}_{k_i}`` with ``lams[0]`` on the least significant bit."""
    out = np.ones(1)
    for w in lams:
        out = np.concatenate((out * w.lambda0, out * w.lambda1))
    return out


def rapidity(p_i: float) -> float:
    """``log(lambda_0 / lambda_1) = 2 atanh(p_i)``; infinite for a pure qubit."""
    return math.inf if p_i >= 1.0 else 2.0 * math.atanh(p_i)


def _signed_sums(xs: Sequence[float]) -> np.ndarray:
    """``S[k] = sum_i (-1)**k_i x_i`` with ``xs[0]`` on the least significant bit."""
    out = np.zeros(1)
    for x in xs:
        out = np.concatenate((out + x, out - x))
    return out


def eigen_gap(g_plus, g_minus, log_ratio):
    """``g_plus - g_minus`` without cancellation, given ``log(g_plus / g_minus)``.

    Elementwise; pairs with both eigenvalues zero give 0.
    """
    with np.errstate(invalid="ignore", over="ignore"):
        gap = np.where(log_ratio >= 0, -g_plus * np.expm1(-np.abs(log_ratio)), g_minus * np.expm1(-np.abs(log_ratio)))
    return np.where((g_plus == 0) & (g_minus == 0), 0.0, gap)


class SpectrumChunk(NamedTuple):
    start: int
    g_plus: np.ndarray
    g_minus: np.ndarray
    hamming: np.ndarray
    gap: np.ndarray


class GhzSpectrum:
    """Eigenvalue pairs ``(g_plus(k), g_minus(k))`` of the prepared probe.

    ``g_plus(k) = lambda_0 prod_i lambda^{(i)}_{k_i}`` belongs to
    ``(|0,k> + |1,1-k>)/sqrt2`` and ``g_minus(k) = lambda_1 prod_i lambda^{(i)}_{1-k_i}``
    to ``(|0,k> - |1,1-k>)/sqrt2``.  Nothing is materialised up front;
    iteration proceeds in ascending ``k`` over chunks of at most 2**16 strings.
    """

    def __init__(self, p: PurityVector, chunk_bits: int = _CHUNK_BITS):
        self.p = p
        self.n = p.n
        self._chunk_bits = chunk_bits
        weights = p.weights()
        self._spq = weights[0]
        self._rpq = weights[1:]
        self._x = [rapidity(x) for x in p.entries]

    def __len__(self) -> int:
        return 1 << self.n

    def pair(self, k: int) -> tuple[float, float]:
        if not 0 <= k < (1 << self.n):
            raise DomainError(f"bitstring {k} out of range for n={self.n}")
        plus, minus = self._spq.lambda0, self._spq.lambda1
        for i, w in enumerate(self._rpq):
            if (k >> i) & 1:
                plus *= w.lambda1
                minus *= w.lambda0
            else:
                plus *= w.lambda0
                minus *= w.lambda1
        return plus, minus

    def gap(self, k: int) -> float:
        """``g_plus(k) - g_minus(k)`` computed from the log ratio."""
        plus, minus = self.pair(k)
        ratio = self._x[0]
        with np.errstate(invalid="ignore"):
            for i, x in enumerate(self._x[1:]):
                ratio = ratio - x if (k >> i) & 1 else ratio + x
        return float(eigen_gap(np.float64(plus), np.float64(minus), np.float64(ratio)))

    def chunks(self) -> Iterator[SpectrumChunk]:
        low = min(self.n, self._chunk_bits)
        low_w, high_w = self._rpq[:low], self._rpq[low:]
        low_a = _population_products(low_w)
        low_rev = low_a[::-1]
        low_m = _hamming_weights(low)
        high_a = _population_products(high_w)
        n_high = len(high_a)
        x = self._x
        with np.errstate(invalid="ignore"):
            low_s = x[0] + _signed_sums(x[1 : low + 1])
            high_s = _signed_sums(x[low + 1 :])
        for h in range(n_high):
            # complement of (h, l) is (~h, ~l): the product factorises over the split
            plus = self._spq.lambda0 * high_a[h] * low_a
            minus = self._spq.lambda1 * high_a[n_high - 1 - h] * low_rev
            with np.errstate(invalid="ignore"):
                ratio = low_s + high_s[h]
            gap = eigen_gap(plus, minus, ratio)
            yield SpectrumChunk(h << low, plus, minus, low_m + h.bit_count(), gap)

    def __iter__(self) -> Iterator[tuple[int, float, float]]:
        for chunk in self.chunks():
            for offset, (plus, minus) in enumerate(zip(chunk.g_plus.tolist(), chunk.g_minus.tolist())):
                yield chunk.start + offset, plus, minus

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Materialise ``(g_plus, g_minus, hamming_weight)`` indexed by ``k``."""
        parts = list(self.chunks())
        return (
            np.concatenate([c.g_plus for c in parts]),
            np.concatenate([c.g_minus for c in parts]),
            np.concatenate([c.hamming for c in parts]),
        )


def check_enumeration(n: int, cap: int = ENUMERATION_CAP) -> None:
    if n > cap:
        raise ResourceError(
            f"n={n} exceeds the enumeration cap of {cap} RPQs (2**n bitstrings); "
            "use the uniform or tilted closed forms for large probes"
        )


def ghz_spectrum(p: PurityVector | Sequence[float], cap: int = ENUMERATION_CAP) -> GhzSpectrum:
    p = as_purity_vector(p)
    check_enumeration(p.n, cap)
    return GhzSpectrum(p)


def noisy_eigenvalues(g_plus, g_minus, decay):
    """Eigenvalues of a GHZ pair after dephasing that damps its coherence by ``decay``.

    Works elementwise on arrays.  The pair sum is preserved.
    """
    mean = (g_plus + g_minus) / 2.0
    half_gap = decay * (g_plus - g_minus) / 2.0
    return mean + half_gap, mean - half_gap
