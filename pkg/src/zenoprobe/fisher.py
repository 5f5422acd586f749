"""Closed-form classical and quantum Fisher information for frequency estimation.

Per-run quantities carry units of time**2; totals over a budget ``total_time``
are ``total_time / t`` times the per-run value.  Sums over RPQ bitstrings are
accumulated with :func:`math.fsum` (exactly rounded), so a result does not
depend on chunking or evaluation order.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from itertools import chain

import numpy as np

from .errors import DomainError
from .probe import (
    ENUMERATION_CAP,
    NoiseModel,
    PurityVector,
    as_purity_vector,
    ghz_spectrum,
    noisy_eigenvalues,
    rapidity,
    spectral_weights,
)

HALF_PI = math.pi / 2

# Pairs whose total weight falls below this are dropped; their P_k is 0 in the limit.
_TINY = 1e-300


@dataclass(frozen=True)
class EncodingParams:
    """Encoding time ``t``, accumulated phase ``omega_t`` and optional budget."""

    t: float
    omega_t: float = HALF_PI
    total_time: float | None = None

    def __post_init__(self) -> None:
        if not self.t > 0:
            raise DomainError(f"encoding time must be > 0, got {self.t!r}")
        if self.total_time is not None and not self.total_time >= self.t:
            raise DomainError(f"total time {self.total_time!r} must be >= t={self.t!r}")

    @property
    def omega(self) -> float:
        return self.omega_t / self.t


@dataclass
class FisherReport:
    per_run_cfi: float
    per_run_qfi: float
    total_cfi: float | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.per_run_cfi < 0 or self.per_run_qfi < 0:
            raise DomainError("Fisher information cannot be negative")
        if self.per_run_cfi > self.per_run_qfi * (1 + 1e-9) + 1e-300:
            raise DomainError(
                f"CFI {self.per_run_cfi!r} exceeds QFI {self.per_run_qfi!r}; inconsistent inputs"
            )

    def to_dict(self) -> dict:
        return asdict(self)


def _phase_factor(n: int, hamming: np.ndarray) -> np.ndarray:
    return (n + 1 - 2 * hamming).astype(float)


def _pk(total: np.ndarray, gap: np.ndarray) -> np.ndarray:
    safe = np.where(total < _TINY, 1.0, total)
    return np.where(total < _TINY, 0.0, gap**2 / safe)


def pk_weight(p: PurityVector | Sequence[float], k: int | Sequence[int]) -> float:
    """Per-bitstring weight ``(g+ - g-)**2 / (g+ + g-)``; ``k`` is an int or a bit sequence."""
    p = as_purity_vector(p)
    if not isinstance(k, (int, np.integer)):
        bits = list(k)
        if len(bits) != p.n:
            raise DomainError(f"bitstring has length {len(bits)}, expected n={p.n}")
        if any(b not in (0, 1) for b in bits):
            raise DomainError(f"bitstring entries must be 0 or 1, got {bits}")
        k = sum(b << i for i, b in enumerate(bits))
    spectrum = ghz_spectrum(p, cap=max(p.n, ENUMERATION_CAP))
    plus, minus = spectrum.pair(int(k))
    if plus + minus < _TINY:
        return 0.0
    return spectrum.gap(int(k)) ** 2 / (plus + minus)


def fisher_sum(p: PurityVector | Sequence[float], cap: int = ENUMERATION_CAP) -> float:
    """``sum_k P_k (n + 1 - 2 m_k)**2``: the Fisher information stripped of ``t**2`` and decay."""
    p = as_purity_vector(p)
    spec = ghz_spectrum(p, cap)
    parts = (
        (_pk(c.g_plus + c.g_minus, c.gap) * _phase_factor(p.n, c.hamming) ** 2).tolist()
        for c in spec.chunks()
    )
    return math.fsum(chain.from_iterable(parts))


def _prefactor(n: int, t: float, noise: NoiseModel) -> float:
    if not t > 0:
        raise DomainError(f"encoding time must be > 0, got {t!r}")
    return t * t * noise.decay(t, n + 1) ** 2


def _even_probe(p: PurityVector, discard_rpq: bool) -> PurityVector:
    if p.n % 2 == 0:
        return p
    if discard_rpq:
        return p.discard_last()
    raise DomainError(
        f"n={p.n} is odd: at omega*t = pi/2 the optimal readout needs an even number of RPQs; "
        "pass discard_rpq=True (CLI: --discard-rpq) to drop the last RPQ"
    )


def cfi_optimal(
    p: PurityVector | Sequence[float],
    t: float,
    noise: NoiseModel = NoiseModel(),
    *,
    discard_rpq: bool = False,
    cap: int = ENUMERATION_CAP,
) -> float:
    """Per-run CFI of the full readout at ``omega*t = pi/2`` (even ``n``)."""
    p = _even_probe(as_purity_vector(p), discard_rpq)
    return _prefactor(p.n, t, noise) * fisher_sum(p, cap)


def qfi(
    p: PurityVector | Sequence[float],
    t: float,
    noise: NoiseModel = NoiseModel(),
    *,
    cap: int = ENUMERATION_CAP,
) -> float:
    """Per-run QFI, evaluated from the noisy probe eigenvalues.

    Each GHZ pair couples only to its partner through the generator
    ``(t/2) sum_i Z_i``, with matrix element ``t (n + 1 - 2 m_k) / 2``.
    """
    p = as_purity_vector(p)
    if not t > 0:
        raise DomainError(f"encoding time must be > 0, got {t!r}")
    decay = noise.decay(t, p.n_qubits)
    parts = []
    for c in ghz_spectrum(p, cap).chunks():
        plus, minus = noisy_eigenvalues(c.g_plus, c.g_minus, decay)
        total = plus + minus
        # plus - minus, taken from the stable pair gap rather than by subtraction
        noisy_gap = decay * c.gap
        safe = np.where(total < _TINY, 1.0, total)
        w = np.where(total < _TINY, 0.0, noisy_gap**2 / safe)
        parts.append((w * _phase_factor(p.n, c.hamming) ** 2).tolist())
    return t * t * math.fsum(chain.from_iterable(parts))


def cfi_general(
    p: PurityVector | Sequence[float],
    enc: EncodingParams,
    noise: NoiseModel = NoiseModel(),
    *,
    cap: int = ENUMERATION_CAP,
) -> float:
    """Per-run CFI of the full readout for arbitrary phase ``omega*t`` and any ``n``.

    Terms whose numerator vanishes exactly (``sin`` zero, or an empty pair)
    contribute 0, including the removable 0/0 of a pure pair at a fringe
    extremum.
    """
    p = as_purity_vector(p)
    n, t = p.n, enc.t
    d2 = noise.decay(t, n + 1) ** 2
    parts = []
    for chunk in ghz_spectrum(p, cap).chunks():
        a, b = chunk.g_plus, chunk.g_minus
        c = _phase_factor(n, chunk.hamming)
        phase = c * enc.omega_t
        s2 = np.sin(phase) ** 2
        c2 = np.cos(phase) ** 2
        s = a + b
        num = t * t * c * c * d2 * s2 * s * chunk.gap**2
        # (a+b)^2 - (a-b)^2 E rewritten without cancellation
        den = s * s * ((1.0 - d2) + d2 * s2) + 4.0 * a * b * d2 * c2
        ok = (num > 0) & (den > 0)
        parts.append(np.where(ok, num / np.where(ok, den, 1.0), 0.0).tolist())
    return math.fsum(chain.from_iterable(parts))


def outcome_probabilities(
    p: PurityVector | Sequence[float],
    enc: EncodingParams,
    noise: NoiseModel = NoiseModel(),
    *,
    cap: int = ENUMERATION_CAP,
) -> np.ndarray:
    """Closed-form readout distribution, shape ``(2**n, 2)``; column 0 is SPQ ``|+>``."""
    p = as_purity_vector(p)
    a, b, m = ghz_spectrum(p, cap).arrays()
    fringe = noise.decay(enc.t, p.n_qubits) * np.cos(_phase_factor(p.n, m) * enc.omega_t)
    plus = a / 2 * (1 + fringe) + b / 2 * (1 - fringe)
    minus = a / 2 * (1 - fringe) + b / 2 * (1 + fringe)
    return np.stack((plus, minus), axis=1)


def _uniform_sum(p: float, n: int) -> float:
    """Binomially grouped ``sum_k P_k (n+1-2m)**2`` for ``p_i = p`` on all qubits."""
    w = spectral_weights(p)
    if p == 0.0:
        return 0.0
    log0 = math.log(w.lambda0)
    log1 = math.log(w.lambda1) if w.lambda1 > 0 else -math.inf
    x = rapidity(p)
    terms = []
    for m in range(n + 1):
        c = n + 1 - 2 * m
        if c == 0:
            continue
        # g+ = l0^(n+1-m) l1^m and g- = l1^(n+1-m) l0^m; their log ratio is c * x
        la = (n + 1 - m) * log0 + (m * log1 if m else 0.0)
        lb = ((n + 1 - m) * log1 if n + 1 - m else 0.0) + m * log0
        hi = max(la, lb)
        if hi == -math.inf:
            continue
        spread = abs(c) * x
        r = math.exp(-spread)
        log_binom = math.lgamma(n + 1) - math.lgamma(m + 1) - math.lgamma(n - m + 1)
        weight = math.exp(log_binom + hi) * math.expm1(-spread) ** 2 / (1 + r)
        terms.append(weight * c * c)
    return math.fsum(terms)


def uniform_sum(p: float, n: int) -> float:
    """Public form of the uniform-protocol sum; valid for any ``n >= 1``."""
    if n < 1:
        raise DomainError(f"need at least one RPQ, got n={n}")
    return _uniform_sum(p, n)


def cfi_uniform(p: float, n: int, t: float, noise: NoiseModel = NoiseModel()) -> float:
    """Per-run CFI for the uniform protocol ``p_i = p``; no enumeration cap applies."""
    if n < 1 or n % 2:
        raise DomainError(f"uniform protocol at pi/2 needs even n >= 2, got n={n}")
    return _prefactor(n, t, noise) * _uniform_sum(p, n)


def cfi_tilted(n: int, t: float, noise: NoiseModel = NoiseModel()) -> float:
    """Per-run CFI for the tilted protocol (pure SPQ, mixed RPQs): ``t**2 decay**2 (n+1)``."""
    if n < 1:
        raise DomainError(f"need at least one RPQ, got n={n}")
    return _prefactor(n, t, noise) * (n + 1)


def cfi_uncorrelated(
    p: PurityVector | Sequence[float],
    t: float,
    noise: NoiseModel = NoiseModel(),
    *,
    include_t2: bool = True,
) -> float:
    """Per-run CFI of the same qubits used independently.

    With ``include_t2`` (default) the single-qubit value is the frequency
    Fisher information ``t**2 exp(-2 g t**alpha) p_i**2``; without it the
    ``t**2`` generator factor is dropped, giving the phase-estimation form.
    """
    p = as_purity_vector(p)
    if not t > 0:
        raise DomainError(f"encoding time must be > 0, got {t!r}")
    value = noise.decay(t) ** 2 * p.n_qubits * p.mean_square
    return value * t * t if include_t2 else value


def cfi_approx(p: PurityVector | Sequence[float], t: float, noise: NoiseModel = NoiseModel()) -> float:
    """``t**2 decay**2 <p^2> (n+1)**2``, the purity-only approximation."""
    p = as_purity_vector(p)
    return _prefactor(p.n, t, noise) * p.mean_square * p.n_qubits**2


def optimal_time(n: int, noise: NoiseModel) -> float:
    """Run time maximising ``t * exp(-2 (n+1) g t**alpha)``, i.e. the total Fisher information.

    ``n = 0`` gives the single-qubit (uncorrelated) time; in general
    ``t(n) = t(0) / (n+1)**(1/alpha)``.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if noise.g <= 0:
        raise DomainError("optimal time is unbounded without dephasing (g = 0)")
    return (2 * noise.alpha * noise.g * (n + 1)) ** (-1 / noise.alpha)


def total_cfi(
    p: PurityVector | Sequence[float],
    total_time: float | None,
    noise: NoiseModel,
    *,
    t_correlated: float | None = None,
    t_uncorrelated: float | None = None,
    exact: bool = True,
) -> tuple[float, float]:
    """Total Fisher information ``(F_correlated, F_uncorrelated)`` over ``total_time``.

    Missing run times default to :func:`optimal_time`.  The correlated value
    uses the exact bitstring sum (equal to the QFI, and to the CFI of the
    pi/2 readout for even ``n``) or, with ``exact=False``, the purity
    approximation.
    """
    p = as_purity_vector(p)
    if total_time is None:
        raise DomainError("total_cfi needs a total time budget")
    t_c = optimal_time(p.n, noise) if t_correlated is None else t_correlated
    t_u = optimal_time(0, noise) if t_uncorrelated is None else t_uncorrelated
    for name, value in (("correlated", t_c), ("uncorrelated", t_u)):
        if not 0 < value <= total_time:
            raise DomainError(f"{name} run time {value!r} must lie in (0, total_time]")
    per_run = qfi(p, t_c, noise) if exact else cfi_approx(p, t_c, noise)
    return total_time / t_c * per_run, total_time / t_u * cfi_uncorrelated(p, t_u, noise)


def advantage_ratio(n: int, alpha: float) -> float:
    """Asymptotic ``F_correlated / F_uncorrelated = (n+1)**(1 - 1/alpha)`` at optimal times."""
    if n < 1:
        raise DomainError(f"need at least one RPQ, got n={n}")
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha!r}")
    return (n + 1) ** (1 - 1 / alpha)
