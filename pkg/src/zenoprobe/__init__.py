"""Fisher information for frequency estimation with GHZ-diagonal probes made from mixed qubits."""

__version__ = "0.1.0"

from .errors import DomainError, ResourceError, ZenoError
from .fisher import (
    EncodingParams,
    FisherReport,
    advantage_ratio,
    cfi_approx,
    cfi_general,
    cfi_optimal,
    cfi_tilted,
    cfi_uncorrelated,
    cfi_uniform,
    fisher_sum,
    optimal_time,
    outcome_probabilities,
    pk_weight,
    qfi,
    total_cfi,
    uniform_sum,
)
from .probe import (
    GhzSpectrum,
    NoiseModel,
    PurityVector,
    SpectralWeights,
    ghz_spectrum,
    noisy_eigenvalues,
    spectral_weights,
)

__all__ = [
    "DomainError",
    "EncodingParams",
    "FisherReport",
    "GhzSpectrum",
    "NoiseModel",
    "PurityVector",
    "ResourceError",
    "SpectralWeights",
    "ZenoError",
    "advantage_ratio",
    "cfi_approx",
    "cfi_general",
    "cfi_optimal",
    "cfi_tilted",
    "cfi_uncorrelated",
    "cfi_uniform",
    "fisher_sum",
    "ghz_spectrum",
    "noisy_eigenvalues",
    "optimal_time",
    "outcome_probabilities",
    "pk_weight",
    "qfi",
    "spectral_weights",
    "total_cfi",
    "uniform_sum",
]
