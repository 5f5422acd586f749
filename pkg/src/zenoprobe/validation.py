"""Random cross-checks of the closed forms against the dense simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, ResourceError
from .experiments import sample_rng
from .fisher import EncodingParams, cfi_general, qfi
from .oracle import MAX_QUBITS, MAX_QUBITS_QFI, oracle_cfi, oracle_qfi
from .probe import NoiseModel, PurityVector

CFI_TOLERANCE = 1e-6
QFI_TOLERANCE = 1e-8


@dataclass(frozen=True)
class OracleCase:
    index: int
    p: tuple[float, ...]
    t: float
    omega_t: float
    g: float
    alpha: float

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.g, self.alpha)


@dataclass
class CaseResult:
    case: OracleCase
    cfi: float
    cfi_oracle: float
    qfi: float
    qfi_oracle: float | None

    @property
    def cfi_rel(self) -> float:
        return abs(self.cfi - self.cfi_oracle) / max(abs(self.cfi_oracle), 1e-300)

    @property
    def qfi_rel(self) -> float | None:
        if self.qfi_oracle is None:
            return None
        return abs(self.qfi - self.qfi_oracle) / max(abs(self.qfi_oracle), 1e-300)


@dataclass
class OracleReport:
    results: list[CaseResult] = field(default_factory=list)
    failures: list[CaseResult] = field(default_factory=list)

    @property
    def max_cfi_rel(self) -> float:
        return max(r.cfi_rel for r in self.results)

    @property
    def max_qfi_rel(self) -> float:
        return max((r.qfi_rel for r in self.results if r.qfi_rel is not None), default=0.0)

    @property
    def passed(self) -> bool:
        return not self.failures


def draw_case(seed: int, index: int, min_qubits: int, max_qubits: int) -> OracleCase:
    """Random configuration with total dephasing exponent ``(n+1) g t**alpha`` in ``[0, 2]``."""
    rng = sample_rng(seed, index)
    n_qubits = int(rng.integers(min_qubits, max_qubits + 1))
    p = tuple(float(x) for x in rng.random(n_qubits))
    t = float(rng.uniform(0.2, 1.5))
    alpha = float(rng.uniform(0.5, 3.0))
    g = float(rng.uniform(0.0, 2.0)) / (n_qubits * t**alpha)
    omega_t = float(rng.uniform(0.1, math.pi - 0.1))
    return OracleCase(index, p, t, omega_t, g, alpha)


def check_case(
    case: OracleCase, cfi_tol: float = CFI_TOLERANCE, qfi_tol: float = QFI_TOLERANCE
) -> tuple[CaseResult, bool]:
    probe = PurityVector(case.p)
    noise = case.noise
    closed_cfi = cfi_general(probe, EncodingParams(case.t, case.omega_t), noise)
    sim_cfi = oracle_cfi(probe, case.omega_t, case.t, noise)
    closed_qfi = qfi(probe, case.t, noise)
    sim_qfi = oracle_qfi(probe, case.t, noise) if probe.n_qubits <= MAX_QUBITS_QFI else None
    result = CaseResult(case, closed_cfi, sim_cfi, closed_qfi, sim_qfi)
    ok = result.cfi_rel <= cfi_tol and (result.qfi_rel is None or result.qfi_rel <= qfi_tol)
    return result, ok


def oracle_check(
    samples: int = 200,
    seed: int = 0,
    min_qubits: int = 2,
    max_qubits: int = 8,
    cfi_tol: float = CFI_TOLERANCE,
    qfi_tol: float = QFI_TOLERANCE,
) -> OracleReport:
    if max_qubits > MAX_QUBITS:
        raise ResourceError(f"--max-qubits {max_qubits} exceeds the dense simulation cap of {MAX_QUBITS}")
    if not 2 <= min_qubits <= max_qubits:
        raise DomainError(f"need 2 <= min_qubits <= max_qubits, got [{min_qubits}, {max_qubits}]")
    report = OracleReport()
    for i in range(samples):
        result, ok = check_case(draw_case(seed, i, min_qubits, max_qubits), cfi_tol, qfi_tol)
        report.results.append(result)
        if not ok:
            report.failures.append(result)
    return report
