"""Seeded Monte Carlo studies over random purity vectors.

Sample ``i`` of a study draws from ``Generator(PCG64(seed ^ i))``, so rows do
not depend on how samples are scheduled across threads, and any row can be
regenerated from ``(seed, index)`` alone.  Rows are kept in index order.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import linregress

from .errors import DomainError
from .fisher import (
    EncodingParams,
    advantage_ratio,
    cfi_uncorrelated,
    fisher_sum,
    optimal_time,
    qfi,
    uniform_sum,
)
from .probe import ENUMERATION_CAP, NoiseModel, PurityVector
from .readout import ReadoutGuess, spq_cfi_averaged, spq_cfi_exact

SEED_MAX = 2**64 - 1

#: Purity vector used for the no-first-CNOT asymmetry demonstration.
ASYMMETRY_PROBE = (0.9, 0.2, 0.7)


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    samples: int = 10_000
    n_min: int = 1
    n_max: int = 11
    t: float = 1.0
    g: float = 0.0
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= SEED_MAX:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.samples < 1:
            raise DomainError(f"samples must be >= 1, got {self.samples}")
        if not 1 <= self.n_min <= self.n_max:
            raise DomainError(f"need 1 <= n_min <= n_max, got [{self.n_min}, {self.n_max}]")
        if self.n_max > ENUMERATION_CAP:
            raise DomainError(f"n_max={self.n_max} exceeds the enumeration cap {ENUMERATION_CAP}")
        if not self.t > 0:
            raise DomainError(f"t must be > 0, got {self.t}")

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.g, self.alpha)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class StudyResult:
    study: str
    columns: tuple[str, ...]
    rows: list[tuple]
    summary: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed ^ index))


def _run(fn: Callable[[int], tuple], count: int, threads: int) -> list[tuple]:
    if threads <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count), chunksize=64))


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    return float(linregress(x, y).rvalue)


def _fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    res = linregress(x, y)
    return float(res.slope), float(res.intercept), float(res.rvalue)


def _vector(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


def _random_probe(rng: np.random.Generator, cfg: ExperimentConfig) -> tuple[int, np.ndarray]:
    n = int(rng.integers(cfg.n_min, cfg.n_max + 1))
    return n, rng.random(n + 1)


def _cfi(p, cfg: ExperimentConfig) -> float:
    # pi/2 readout CFI for even n; the same sum is the QFI for every n
    return qfi(p, cfg.t, cfg.noise)


# -- approximation -----------------------------------------------------------

APPROX_COLUMNS = ("index", "n", "p", "mean_sq", "approx", "exact")


def summarize_approx(rows: Sequence[tuple]) -> dict:
    slope, intercept, r = _fit([row[4] for row in rows], [row[5] for row in rows])
    return {"pearson": r, "slope": slope, "intercept": intercept}


def approx_correlation_study(cfg: ExperimentConfig, threads: int = 1) -> StudyResult:
    """``<p^2>(n+1)^2`` against the exact bitstring sum for random probes."""

    def one(i: int) -> tuple:
        n, p = _random_probe(sample_rng(cfg.seed, i), cfg)
        probe = PurityVector(p)
        approx = probe.mean_square * (n + 1) ** 2
        return (i, n, _vector(p), probe.mean_square, approx, fisher_sum(probe))

    rows = _run(one, cfg.samples, threads)
    return StudyResult("approx", APPROX_COLUMNS, rows, summarize_approx(rows))


# -- monotonicity --------------------------------------------------------------

MONO_COLUMNS = ("index", "n", "j", "p", "eps", "mean_eps_sq", "cfi_base", "cfi_perturbed", "diff")


def summarize_mono(rows: Sequence[tuple]) -> dict:
    diffs = [row[8] for row in rows]
    return {"min_diff": min(diffs), "negative_count": sum(d < 0 for d in diffs)}


def monotonicity_study(cfg: ExperimentConfig, mode: str = "single", threads: int = 1) -> StudyResult:
    """CFI before and after raising purities.

    ``single`` raises one random entry ``j`` by ``eps_j`` drawn from
    ``(0, 1 - p_j]``; ``full`` raises every entry by ``eps_i`` in ``[0, 1 - p_i]``
    (``j`` is reported as -1).
    """
    if mode not in ("single", "full"):
        raise DomainError(f"mode must be 'single' or 'full', got {mode!r}")

    def one(i: int) -> tuple:
        rng = sample_rng(cfg.seed, i)
        n, p = _random_probe(rng, cfg)
        eps = np.zeros(n + 1)
        if mode == "single":
            j = int(rng.integers(0, n + 1))
            eps[j] = (1 - p[j]) * (1 - rng.random())
        else:
            j = -1
            eps = (1 - p) * rng.random(n + 1)
        raised = np.minimum(p + eps, 1.0)
        base, perturbed = _cfi(p, cfg), _cfi(raised, cfg)
        mean_eps_sq = float(eps @ eps) / (n + 1)
        return (i, n, j, _vector(p), _vector(eps), mean_eps_sq, base, perturbed, perturbed - base)

    rows = _run(one, cfg.samples, threads)
    summary = summarize_mono(rows) | {"mode": mode}
    return StudyResult(f"mono-{mode}", MONO_COLUMNS, rows, summary)


def ordering_chain(
    p: Sequence[float], j: int, k: int, eps_j: float, eps_k: float, t: float = 1.0, noise: NoiseModel = NoiseModel()
) -> tuple[float, float, float, float]:
    """``(F(p + e_j + e_k), F(p + e_j), F(p + e_k), F(p))`` for perturbations of entries ``j != k``."""
    base = np.asarray(p, dtype=float)
    bump_j = np.zeros_like(base)
    bump_j[j] = eps_j
    bump_k = np.zeros_like(base)
    bump_k[k] = eps_k
    return (
        qfi(base + bump_j + bump_k, t, noise),
        qfi(base + bump_j, t, noise),
        qfi(base + bump_k, t, noise),
        qfi(base, t, noise),
    )


# -- permutation symmetry ------------------------------------------------------

SYMMETRY_COLUMNS = ("index", "n", "p", "perm", "cfi", "cfi_perm", "rel_dev")


def no_first_cnot_asymmetry(p: Sequence[float] = ASYMMETRY_PROBE) -> tuple[float, list[float]]:
    """Largest relative CFI change over all qubit orderings when the first CNOT layer is omitted.

    Evaluated by dense simulation at ``omega*t = pi/2``, ``t = 1``, no noise.
    Returns the deviation and the CFI for each ordering.
    """
    from itertools import permutations

    from .oracle import oracle_cfi

    base = list(p)
    values = [
        oracle_cfi([base[i] for i in order], math.pi / 2, 1.0, NoiseModel(), first_cnot=False)
        for order in permutations(range(len(base)))
    ]
    return max(abs(v - values[0]) for v in values) / values[0], values


def summarize_symmetry(rows: Sequence[tuple]) -> dict:
    return {"max_rel_dev": max(row[6] for row in rows)}


def symmetry_study(cfg: ExperimentConfig, threads: int = 1, *, with_counterexample: bool = True) -> StudyResult:
    """CFI of random probes under random permutations of all n+1 qubits."""

    def one(i: int) -> tuple:
        rng = sample_rng(cfg.seed, i)
        n, p = _random_probe(rng, cfg)
        perm = rng.permutation(n + 1)
        base, permuted = _cfi(p, cfg), _cfi(p[perm], cfg)
        rel = abs(permuted - base) / base if base > 0 else abs(permuted)
        return (i, n, _vector(p), tuple(int(x) for x in perm), base, permuted, rel)

    rows = _run(one, cfg.samples, threads)
    summary = summarize_symmetry(rows)
    if with_counterexample:
        summary["no_first_cnot_rel_dev"] = no_first_cnot_asymmetry()[0]
    return StudyResult("symmetry", SYMMETRY_COLUMNS, rows, summary)


# -- uniform vs tilted crossover ----------------------------------------------

CROSSOVER_COLUMNS = ("n", "p_star", "p_predicted", "deviation")
CROSSOVER_TOLERANCE = 0.05


def crossover_point(n: int, tol: float = 1e-6) -> float:
    """Uniform purity at which the uniform protocol matches the tilted one.

    Bisection on the sign of ``uniform - tilted``; the common ``t**2 decay**2``
    factor cancels, leaving ``uniform_sum(p, n) - (n + 1)``.
    """
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if uniform_sum(mid, n) < n + 1:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def summarize_crossover(rows: Sequence[tuple]) -> dict:
    worst = max(abs(row[3]) for row in rows)
    return {"max_abs_deviation": worst, "within_tolerance": worst <= CROSSOVER_TOLERANCE}


def crossover_study(n_min: int = 2, n_max: int = 12) -> StudyResult:
    rows = []
    for n in range(n_min, n_max + 1):
        found, predicted = crossover_point(n), 1 / math.sqrt(n + 1)
        rows.append((n, found, predicted, found - predicted))
    return StudyResult("crossover", CROSSOVER_COLUMNS, rows, summarize_crossover(rows))


# -- Zeno scaling --------------------------------------------------------------

SCALING_COLUMNS = ("n", "n_qubits", "t_corr", "t_uncorr", "f_corr", "f_uncorr", "ratio", "predicted")


def summarize_scaling(rows: Sequence[tuple]) -> dict:
    x = [math.log(row[1]) for row in rows]
    y = [math.log(row[6]) for row in rows]
    if len(rows) < 2:
        slope = intercept = math.nan
    elif max(y) - min(y) == 0:
        slope, intercept = 0.0, y[0]
    else:
        slope, intercept, _ = _fit(x, y)
    max_dev = max(abs(row[6] / row[7] - 1) for row in rows)
    return {"slope": slope, "intercept": intercept, "max_rel_dev_from_predicted": max_dev}


def scaling_study(
    alpha: float, n_min: int = 1, n_max: int = 11, *, p: float = 1.0, g: float = 1.0
) -> StudyResult:
    """Ratio of total Fisher information, correlated over uncorrelated, at optimal run times."""
    noise = NoiseModel(g, alpha)
    rows = []
    t_u = optimal_time(0, noise)
    for n in range(n_min, n_max + 1):
        probe = PurityVector.uniform(p, n)
        t_c = optimal_time(n, noise)
        f_c = t_u / t_c * qfi(probe, t_c, noise)
        f_u = cfi_uncorrelated(probe, t_u, noise)
        rows.append((n, n + 1, t_c, t_u, f_c, f_u, f_c / f_u, advantage_ratio(n, alpha)))
    result = StudyResult("scaling", SCALING_COLUMNS, rows, summarize_scaling(rows))
    result.summary |= {"alpha": alpha, "predicted_slope": 1 - 1 / alpha}
    return result


# -- majorisation ----------------------------------------------------------------

MAJORISATION_COLUMNS = ("index", "n", "p", "q", "cfi_p", "cfi_q", "agrees")


def t_transform(x: np.ndarray, i: int, j: int, weight: float) -> np.ndarray:
    """Robin Hood transfer: mix entries ``i`` and ``j``; the result is majorised by ``x``."""
    out = x.copy()
    out[i] = weight * x[i] + (1 - weight) * x[j]
    out[j] = weight * x[j] + (1 - weight) * x[i]
    return out


def majorizes(x: Sequence[float], y: Sequence[float], tol: float = 1e-12) -> bool:
    a = np.sort(np.asarray(x, dtype=float))[::-1]
    b = np.sort(np.asarray(y, dtype=float))[::-1]
    if len(a) != len(b) or abs(a.sum() - b.sum()) > tol * max(1.0, a.sum()):
        return False
    return bool(np.all(np.cumsum(a) >= np.cumsum(b) - tol))


def summarize_majorisation(rows: Sequence[tuple]) -> dict:
    agree = sum(row[6] for row in rows)
    disagree = len(rows) - agree
    return {"agree_count": agree, "disagree_count": disagree, "no_hierarchy": agree > 0 and disagree > 0}


def majorisation_study(cfg: ExperimentConfig, threads: int = 1) -> StudyResult:
    """Does ``p`` majorising ``q`` (equal sums) order their Fisher information?

    ``q`` is built from the sorted ``p`` by one to three random T-transforms.
    A pair agrees when ``F(p) >= F(q)``.
    """

    def one(i: int) -> tuple:
        rng = sample_rng(cfg.seed, i)
        n, p = _random_probe(rng, cfg)
        p = np.sort(p)[::-1]
        q = p
        for _ in range(int(rng.integers(1, 4))):
            a, b = rng.choice(n + 1, size=2, replace=False)
            q = t_transform(q, int(a), int(b), float(rng.random()))
        q = np.clip(q, 0.0, 1.0)
        f_p, f_q = _cfi(p, cfg), _cfi(q, cfg)
        return (i, n, _vector(p), _vector(q), f_p, f_q, int(f_p >= f_q))

    rows = _run(one, cfg.samples, threads)
    return StudyResult("majorisation", MAJORISATION_COLUMNS, rows, summarize_majorisation(rows))


# -- single-qubit readout ----------------------------------------------------------

SPQ_COLUMNS = ("index", "n", "p", "delta", "exact", "averaged")

#: Default phase mismatch for the SPQ readout study; inside the small-delta window for n <= 39.
SPQ_DELTA = 0.05


def summarize_spq(rows: Sequence[tuple]) -> dict:
    slope, intercept, r = _fit([row[4] for row in rows], [row[5] for row in rows])
    return {"pearson": r, "slope": slope, "intercept": intercept}


def spq_correlation_study(cfg: ExperimentConfig, threads: int = 1, delta: float = SPQ_DELTA) -> StudyResult:
    """Exact pair-sum SPQ CFI against its ``<p>``-averaged form."""
    noise = cfg.noise
    enc = EncodingParams(cfg.t, math.pi / 2)
    guess = ReadoutGuess(enc.omega_t - delta, delta)

    def one(i: int) -> tuple:
        n, p = _random_probe(sample_rng(cfg.seed, i), cfg)
        probe = PurityVector(p)
        return (
            i,
            n,
            _vector(p),
            delta,
            spq_cfi_exact(probe, enc, noise, guess),
            spq_cfi_averaged(probe, enc, noise, guess),
        )

    rows = _run(one, cfg.samples, threads)
    return StudyResult("spq-corr", SPQ_COLUMNS, rows, summarize_spq(rows))


SUMMARIZERS = {
    "approx": summarize_approx,
    "mono-single": summarize_mono,
    "mono-full": summarize_mono,
    "symmetry": summarize_symmetry,
    "crossover": summarize_crossover,
    "scaling": summarize_scaling,
    "majorisation": summarize_majorisation,
    "spq-corr": summarize_spq,
}
