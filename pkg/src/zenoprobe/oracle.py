"""Brute-force density-matrix simulation of the protocol.

Used as an independent check on the closed forms, so nothing here imports
:mod:`zenoprobe.fisher`.  Gates act on the density matrix through tensor
contractions; the dephasing channel is applied from its two Kraus operators.

Layout: qubit 0 (the SPQ) is the most significant bit of a basis index and
RPQ ``i`` (1-based) sits on bit ``i - 1``, so an index reads ``s * 2**n + k``
with ``k`` packed as in :mod:`zenoprobe.probe`.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceError
from .probe import NoiseModel, PurityVector, as_purity_vector, spectral_weights

MAX_QUBITS = 12
MAX_QUBITS_QFI = 10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)  # control is the first tensor factor


def rz(angle: float) -> np.ndarray:
    """``exp(-i angle Z / 2)``."""
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


def controlled(u: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = u
    return out


def dephasing_kraus(noise: NoiseModel, t: float) -> tuple[np.ndarray, np.ndarray]:
    d = math.exp(-noise.exponent(t))
    return math.sqrt((1 + d) / 2) * I2, math.sqrt((1 - d) / 2) * Z


@dataclass
class DensityMatrix:
    """Dense ``2**N x 2**N`` state on ``N = n + 1`` qubits."""

    data: np.ndarray

    @property
    def n_qubits(self) -> int:
        return int(self.data.shape[0]).bit_length() - 1

    def copy(self) -> DensityMatrix:
        return DensityMatrix(self.data.copy())

    def check(self, atol: float = 1e-12) -> None:
        rho = self.data
        if not np.allclose(rho, rho.conj().T, atol=atol, rtol=0):
            raise AssertionError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > atol:
            raise AssertionError(f"trace is {np.trace(rho)!r}")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise AssertionError("density matrix has a negative eigenvalue")


def _axis(qubit: int, n_qubits: int) -> int:
    # reshaped tensor axes run from most to least significant bit
    return 0 if qubit == 0 else n_qubits - qubit


def apply_operator(rho: np.ndarray, op: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """``op rho op^dagger`` with ``op`` acting on ``qubits`` (first listed = most significant)."""
    n_qubits = int(rho.shape[0]).bit_length() - 1
    k = len(qubits)
    axes = [_axis(q, n_qubits) for q in qubits]
    tensor = rho.reshape((2,) * (2 * n_qubits))
    gate = op.reshape((2,) * (2 * k))
    # left multiplication on row axes
    tensor = np.tensordot(gate, tensor, axes=(list(range(k, 2 * k)), axes))
    tensor = np.moveaxis(tensor, list(range(k)), axes)
    # right multiplication by op^dagger on column axes
    col_axes = [n_qubits + a for a in axes]
    tensor = np.tensordot(tensor, gate.conj(), axes=(col_axes, list(range(k, 2 * k))))
    tensor = np.moveaxis(tensor, list(range(2 * n_qubits - k, 2 * n_qubits)), col_axes)
    return tensor.reshape(rho.shape)


def apply_channel(rho: np.ndarray, kraus: Sequence[np.ndarray], qubit: int) -> np.ndarray:
    return sum(apply_operator(rho, op, [qubit]) for op in kraus)


def _check_size(n_qubits: int, cap: int) -> None:
    if n_qubits > cap:
        raise ResourceError(f"{n_qubits} qubits exceeds the dense simulation cap of {cap}")


def build_initial(p: PurityVector | Sequence[float], cap: int = MAX_QUBITS) -> DensityMatrix:
    p = as_purity_vector(p)
    _check_size(p.n_qubits, cap)
    rho = np.ones((1, 1), dtype=complex)
    # SPQ first, then RPQ n down to RPQ 1 so that RPQ 1 ends on the lowest bit
    for i in [0, *range(p.n, 0, -1)]:
        w = spectral_weights(p.entries[i], i)
        rho = np.kron(rho, np.diag([w.lambda0, w.lambda1]).astype(complex))
    return DensityMatrix(rho)


def _cnot_layer(rho: np.ndarray, n_qubits: int) -> np.ndarray:
    for target in range(1, n_qubits):
        rho = apply_operator(rho, CNOT, [0, target])
    return rho


def prepare(state: DensityMatrix, *, first_cnot: bool = True) -> DensityMatrix:
    """CNOT layer (optional), Hadamard on the SPQ, CNOT layer."""
    rho = state.data
    n_qubits = state.n_qubits
    if first_cnot:
        rho = _cnot_layer(rho, n_qubits)
    rho = apply_operator(rho, H, [0])
    rho = _cnot_layer(rho, n_qubits)
    return DensityMatrix(rho)


def apply_noise(state: DensityMatrix, noise: NoiseModel, t: float) -> DensityMatrix:
    kraus = dephasing_kraus(noise, t)
    rho = state.data
    for q in range(state.n_qubits):
        rho = apply_channel(rho, kraus, q)
    return DensityMatrix(rho)


def apply_phase(state: DensityMatrix, omega_t: float) -> DensityMatrix:
    u = rz(omega_t)
    rho = state.data
    for q in range(state.n_qubits):
        rho = apply_operator(rho, u, [q])
    return DensityMatrix(rho)


def encode(
    state: DensityMatrix,
    omega_t: float,
    noise: NoiseModel,
    t: float,
    *,
    noise_first: bool = False,
) -> DensityMatrix:
    """Phase ``exp(-i omega t Z/2)`` on every qubit plus per-qubit dephasing."""
    if noise_first:
        return apply_phase(apply_noise(state, noise, t), omega_t)
    return apply_noise(apply_phase(state, omega_t), noise, t)


@dataclass
class MeasurementDistribution:
    """Outcome probabilities indexed ``[k, s]``; ``s = 0`` is SPQ ``|+>``, ``s = 1`` is ``|->``."""

    probabilities: np.ndarray

    def __getitem__(self, key: tuple[int, str]) -> float:
        k, sign = key
        return float(self.probabilities[k, 0 if sign == "+" else 1])

    @property
    def total(self) -> float:
        return float(self.probabilities.sum())


def spq_x_statistics(rho: np.ndarray, n: int) -> np.ndarray:
    """RPQs in Z, SPQ in X: ``q_s(k) = <s,k| rho |s,k>`` with ``s`` in ``{+, -}``."""
    half = 1 << n
    diag = np.real(np.diag(rho))
    coherence = np.real(np.diag(rho[:half, half:]))
    plus = (diag[:half] + diag[half:]) / 2 + coherence
    minus = (diag[:half] + diag[half:]) / 2 - coherence
    return np.stack((plus, minus), axis=1)


def measure(state: DensityMatrix) -> MeasurementDistribution:
    """Final CNOT layer followed by the Z/X readout."""
    rho = _cnot_layer(state.data, state.n_qubits)
    return MeasurementDistribution(spq_x_statistics(rho, state.n_qubits - 1))


def simulate(
    p: PurityVector | Sequence[float],
    omega_t: float,
    t: float,
    noise: NoiseModel,
    *,
    first_cnot: bool = True,
    cap: int = MAX_QUBITS,
) -> MeasurementDistribution:
    """Full protocol from the product state to the readout distribution."""
    probe = prepare(build_initial(p, cap), first_cnot=first_cnot)
    return measure(encode(probe, omega_t, noise, t))


def fisher_from_samples(q0: np.ndarray, dq: np.ndarray, floor: float = 1e-14) -> float:
    keep = q0 > floor
    return math.fsum(((dq[keep] ** 2) / q0[keep]).tolist())


def oracle_cfi(
    p: PurityVector | Sequence[float],
    omega_t: float,
    t: float,
    noise: NoiseModel,
    *,
    first_cnot: bool = True,
    step: float | None = None,
    cap: int = MAX_QUBITS,
) -> float:
    """CFI in ``omega`` by central differences of the simulated distribution.

    Step ``h = 1e-6 / t`` in ``omega``; one Richardson step combines ``h``
    and ``2h`` so truncation error is O(h**4).
    """
    p = as_purity_vector(p)
    _check_size(p.n_qubits, cap)
    if not t > 0:
        raise DomainError(f"encoding time must be > 0, got {t!r}")
    h = 1e-6 / t if step is None else step
    probe = prepare(build_initial(p, cap), first_cnot=first_cnot)
    noisy = apply_noise(probe, noise, t)

    def dist(shift: float) -> np.ndarray:
        return measure(apply_phase(noisy, omega_t + shift * t)).probabilities

    d1 = (dist(h) - dist(-h)) / (2 * h)
    d2 = (dist(2 * h) - dist(-2 * h)) / (4 * h)
    dq = (4 * d1 - d2) / 3
    return fisher_from_samples(dist(0.0), dq)


def qfi_from_state(rho: np.ndarray, generator_diag: np.ndarray, floor: float = 1e-14) -> float:
    """``2 sum_ij (l_i - l_j)**2 / (l_i + l_j) |<i|G|j>|**2`` for a diagonal generator."""
    vals, vecs = np.linalg.eigh(rho)
    g = vecs.conj().T @ (generator_diag[:, None] * vecs)
    diff = vals[:, None] - vals[None, :]
    total = vals[:, None] + vals[None, :]
    keep = (total > floor) & (np.abs(diff) > 1e-12)
    weights = np.where(keep, diff**2 / np.where(keep, total, 1.0), 0.0)
    return 2 * math.fsum((weights * np.abs(g) ** 2).ravel().tolist())


def oracle_qfi(
    p: PurityVector | Sequence[float],
    t: float,
    noise: NoiseModel,
    *,
    cap: int = MAX_QUBITS_QFI,
) -> float:
    """QFI from a dense eigendecomposition of the dephased probe."""
    p = as_purity_vector(p)
    _check_size(p.n_qubits, cap)
    if not t > 0:
        raise DomainError(f"encoding time must be > 0, got {t!r}")
    probe = apply_noise(prepare(build_initial(p, cap)), noise, t)
    n_qubits = p.n_qubits
    ones = np.bitwise_count(np.arange(1 << n_qubits, dtype=np.uint64)).astype(float)
    generator = t / 2 * (n_qubits - 2 * ones)
    return qfi_from_state(probe.data, generator)


def spq_readout_probabilities(
    p: PurityVector | Sequence[float],
    omega_t: float,
    theta: float,
    t: float,
    noise: NoiseModel,
    *,
    cap: int = MAX_QUBITS,
) -> tuple[float, float]:
    """Single-qubit readout: controlled rotation, discard RPQs, measure the SPQ in X.

    Controlled on the SPQ, each RPQ receives ``Rz(2 theta) X`` (a CNOT
    followed by a Z rotation) and the SPQ itself picks up ``diag(1, e^{-i theta})``;
    this undoes the guessed phase ``theta`` on every qubit.
    """
    p = as_purity_vector(p)
    probe = prepare(build_initial(p, cap))
    rho = encode(probe, omega_t, noise, t).data
    n_qubits = p.n_qubits
    gate = controlled(rz(2 * theta) @ X)
    for target in range(1, n_qubits):
        rho = apply_operator(rho, gate, [0, target])
    rho = apply_operator(rho, np.diag([1.0, np.exp(-1j * theta)]), [0])
    tensor = rho.reshape(2, 1 << (n_qubits - 1), 2, 1 << (n_qubits - 1))
    spq = np.einsum("ajbj->ab", tensor)
    coherence = float(np.real(spq[0, 1]))
    return 0.5 + coherence, 0.5 - coherence
