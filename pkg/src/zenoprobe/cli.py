"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 usage or domain error,
3 resource cap exceeded, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from pathlib import Path

from . import __version__
from .errors import DomainError, ResourceError
from .experiments import (
    SPQ_DELTA,
    ExperimentConfig,
    StudyResult,
    approx_correlation_study,
    crossover_study,
    majorisation_study,
    monotonicity_study,
    scaling_study,
    spq_correlation_study,
    symmetry_study,
)
from .fisher import (
    HALF_PI,
    EncodingParams,
    FisherReport,
    cfi_approx,
    cfi_general,
    cfi_optimal,
    cfi_tilted,
    cfi_uncorrelated,
    cfi_uniform,
    optimal_time,
    qfi,
    uniform_sum,
)
from .persist import build_manifest, csv_text, json_text, read_manifest
from .probe import NoiseModel, PurityVector, check_enumeration
from .readout import ReadoutGuess, spq_cfi_exact
from .validation import CFI_TOLERANCE, QFI_TOLERANCE, oracle_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE, EXIT_IO = 0, 1, 2, 3, 4

STUDIES = ("approx", "mono", "symmetry", "crossover", "scaling", "majorisation", "spq-corr")
STUDY_DEFAULT_RANGE = {"crossover": (2, 12)}
# summary keys that carry a pass/fail verdict for the study
VERDICT_KEYS = ("no_hierarchy", "within_tolerance")


class UsageError(Exception):
    pass


def _phase(text: str) -> tuple[float, bool]:
    """Parse ``--omega-t``; returns the value and whether it was the exact ``pi/2`` token."""
    token = text.strip().lower().replace(" ", "")
    if token in ("pi/2", "π/2"):
        return HALF_PI, True
    if token in ("pi", "π"):
        return math.pi, False
    try:
        return float(token), False
    except ValueError:
        raise UsageError(f"--omega-t expects a number or 'pi/2', got {text!r}") from None


def _default_threads() -> int:
    raw = os.environ.get("ZENO_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenoprobe",
        description="Fisher information of GHZ-diagonal probes from mixed qubits under dephasing.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cfi = sub.add_parser("cfi", help="Fisher information for one configuration.")
    cfi.add_argument("--p", required=True, metavar="LIST|uniform:X|tilted")
    cfi.add_argument("--n", type=int, default=None, help="number of RPQs (required for uniform/tilted)")
    cfi.add_argument("--t", default="1", metavar="T|opt")
    cfi.add_argument("--g", type=float, default=0.0)
    cfi.add_argument("--alpha", type=float, default=1.0)
    cfi.add_argument("--omega-t", default="pi/2", metavar="PHASE|pi/2")
    cfi.add_argument("--mode", choices=["optimal", "general", "uncorrelated", "approx", "spq"], default=None)
    cfi.add_argument("--theta", type=float, default=None, help="guessed phase for --mode spq")
    cfi.add_argument("--total-time", type=float, default=None)
    cfi.add_argument("--discard-rpq", action="store_true")
    cfi.add_argument("--format", choices=["json", "csv"], default="json")

    study = sub.add_parser("study", help="Run a seeded Monte Carlo study.")
    study.add_argument("kind", choices=STUDIES)
    study.add_argument("--samples", type=int, default=10_000)
    study.add_argument("--seed", type=int, default=0)
    study.add_argument("--n-min", type=int, default=None)
    study.add_argument("--n-max", type=int, default=None)
    study.add_argument("--t", type=float, default=1.0)
    study.add_argument("--g", type=float, default=None)
    study.add_argument("--alpha", type=float, default=None)
    study.add_argument("--mode", choices=["single", "full"], default="single", help="monotonicity variant")
    study.add_argument("--delta", type=float, default=SPQ_DELTA, help="phase mismatch for spq-corr")
    study.add_argument("--p", type=float, default=1.0, help="uniform purity for the scaling study")
    study.add_argument("--threads", type=int, default=None)
    study.add_argument("--out", default=None, metavar="PREFIX", help="writes PREFIX.csv and PREFIX.manifest.json")

    replay = sub.add_parser("replay", help="Re-run a study from its manifest.")
    replay.add_argument("manifest")
    replay.add_argument("--out", default=None, metavar="PREFIX")

    check = sub.add_parser("oracle-check", help="Validate closed forms against dense simulation.")
    check.add_argument("--samples", type=int, default=200)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--min-qubits", type=int, default=2)
    check.add_argument("--max-qubits", type=int, default=8)
    check.add_argument("--cfi-tol", type=float, default=CFI_TOLERANCE)
    check.add_argument("--qfi-tol", type=float, default=QFI_TOLERANCE)
    return parser


# -- cfi ---------------------------------------------------------------------


def _parse_probe(spec: str, n: int | None) -> tuple[str, PurityVector | float | None, int]:
    """Returns ``(kind, payload, n)`` with kind in {'vector', 'uniform', 'tilted'}."""
    text = spec.strip().lower()
    if text == "tilted" or text.startswith("uniform:"):
        if n is None:
            raise UsageError(f"--p {spec} needs --n")
        if n < 1:
            raise UsageError(f"--n must be >= 1, got {n}")
        if text == "tilted":
            return "tilted", None, n
        try:
            value = float(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"cannot parse uniform purity in {spec!r}") from None
        if not 0 <= value <= 1:
            raise UsageError(f"uniform purity must lie in [0, 1], got {value}")
        return "uniform", value, n
    try:
        values = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--p expects a comma-separated list, 'uniform:X' or 'tilted', got {spec!r}") from None
    probe = PurityVector(values)
    if n is not None and n != probe.n:
        raise UsageError(f"--n {n} disagrees with the {probe.n} RPQs given in --p")
    return "vector", probe, probe.n


def _materialise(kind: str, payload, n: int) -> PurityVector:
    check_enumeration(n)
    if kind == "tilted":
        return PurityVector.tilted(n)
    if kind == "uniform":
        return PurityVector.uniform(payload, n)
    return payload


def _probe_qfi(kind: str, payload, n: int, t: float, noise: NoiseModel) -> float:
    prefactor = t * t * noise.decay(t, n + 1) ** 2
    if kind == "tilted":
        return prefactor * (n + 1)
    if kind == "uniform":
        return prefactor * uniform_sum(payload, n)
    return qfi(payload, t, noise)


def cmd_cfi(args: argparse.Namespace) -> int:
    kind, payload, n = _parse_probe(args.p, args.n)
    noise = NoiseModel(args.g, args.alpha)
    omega_t, exact_half_pi = _phase(args.omega_t)
    mode = args.mode or ("optimal" if exact_half_pi else "general")

    if args.t.strip().lower() == "opt":
        effective_n = n - 1 if (mode == "optimal" and n % 2 and args.discard_rpq) else n
        t = optimal_time(0 if mode == "uncorrelated" else effective_n, noise)
    else:
        try:
            t = float(args.t)
        except ValueError:
            raise UsageError(f"--t expects a number or 'opt', got {args.t!r}") from None
    enc = EncodingParams(t, omega_t, args.total_time)

    discarded = False
    if mode == "optimal":
        if not exact_half_pi and abs(omega_t - HALF_PI) > 1e-15:
            raise UsageError("--mode optimal fixes omega*t = pi/2; use --mode general for other phases")
        if n % 2:
            if not args.discard_rpq:
                raise DomainError(f"n={n} is odd; pass --discard-rpq to drop one RPQ")
            n, discarded = n - 1, True
            if kind == "vector":
                payload = payload.discard_last()
        if kind == "tilted":
            value = cfi_tilted(n, t, noise)
        elif kind == "uniform":
            value = cfi_uniform(payload, n, t, noise)
        else:
            value = cfi_optimal(payload, t, noise)
        bound = _probe_qfi(kind, payload, n, t, noise)
    elif mode == "general":
        value = cfi_general(_materialise(kind, payload, n), enc, noise)
        bound = _probe_qfi(kind, payload, n, t, noise)
    elif mode == "uncorrelated":
        value = bound = cfi_uncorrelated(_materialise(kind, payload, n), t, noise)
    elif mode == "approx":
        value = bound = cfi_approx(_materialise(kind, payload, n), t, noise)
    else:
        theta = omega_t - SPQ_DELTA if args.theta is None else args.theta
        probe = _materialise(kind, payload, n)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            value = spq_cfi_exact(probe, enc, noise, ReadoutGuess.from_encoding(enc, theta))
        bound = max(qfi(probe, t, noise), value)

    if kind == "vector":
        mean_sq = payload.mean_square
    elif kind == "tilted":
        mean_sq = 1 / (n + 1)
    else:
        mean_sq = payload**2
    report = FisherReport(
        per_run_cfi=value,
        per_run_qfi=bound,
        total_cfi=None if args.total_time is None else args.total_time / t * value,
        metadata={
            "mode": mode,
            "probe": args.p,
            "n": n,
            "mean_sq": mean_sq,
            "t": t,
            "omega_t": omega_t,
            "g": args.g,
            "alpha": args.alpha,
            "discarded_rpq": discarded,
        },
    )
    _emit_report(report, args.format)
    return EXIT_OK


def _emit_report(report: FisherReport, fmt: str) -> None:
    flat = {k: v for k, v in report.to_dict().items() if k != "metadata"}
    flat.update(report.metadata)
    if fmt == "json":
        sys.stdout.write(json_text(report.to_dict()))
        return
    keys = sorted(flat)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys)
    writer.writerow(["" if flat[k] is None else repr(flat[k]) if isinstance(flat[k], float) else flat[k] for k in keys])
    sys.stdout.write(buf.getvalue())


# -- studies -----------------------------------------------------------------


def _resolve_study_params(args: argparse.Namespace) -> dict:
    lo, hi = STUDY_DEFAULT_RANGE.get(args.kind, (1, 11))
    params = {
        "kind": args.kind,
        "samples": args.samples,
        "seed": args.seed,
        "n_min": lo if args.n_min is None else args.n_min,
        "n_max": hi if args.n_max is None else args.n_max,
        "t": args.t,
    }
    if args.kind == "scaling":
        params |= {"alpha": 2.0 if args.alpha is None else args.alpha, "g": 1.0 if args.g is None else args.g, "p": args.p}
    else:
        params |= {"alpha": 1.0 if args.alpha is None else args.alpha, "g": 0.0 if args.g is None else args.g}
    if args.kind == "mono":
        params["mode"] = args.mode
    if args.kind == "spq-corr":
        params["delta"] = args.delta
    return params


def run_study(params: dict, threads: int = 1) -> StudyResult:
    kind = params["kind"]
    if kind == "crossover":
        return crossover_study(params["n_min"], params["n_max"])
    if kind == "scaling":
        return scaling_study(params["alpha"], params["n_min"], params["n_max"], p=params["p"], g=params["g"])
    cfg = ExperimentConfig(
        seed=params["seed"],
        samples=params["samples"],
        n_min=params["n_min"],
        n_max=params["n_max"],
        t=params["t"],
        g=params["g"],
        alpha=params["alpha"],
    )
    if kind == "approx":
        return approx_correlation_study(cfg, threads)
    if kind == "mono":
        return monotonicity_study(cfg, params["mode"], threads)
    if kind == "symmetry":
        return symmetry_study(cfg, threads)
    if kind == "majorisation":
        return majorisation_study(cfg, threads)
    if kind == "spq-corr":
        return spq_correlation_study(cfg, threads, params["delta"])
    raise UsageError(f"unknown study {kind!r}")


def _summary_line(result: StudyResult) -> str:
    parts = []
    for key, value in result.summary.items():
        if isinstance(value, bool):
            text = str(value).lower()
        elif isinstance(value, float):
            text = f"{value:.6g}"
        else:
            text = str(value)
        parts.append(f"{key}={text}")
    return f"{result.study} " + " ".join(parts)


def _write_outputs(result: StudyResult, params: dict, prefix: str, command: str) -> None:
    csv_path = Path(f"{prefix}.csv")
    manifest_path = Path(f"{prefix}.manifest.json")
    manifest = build_manifest(
        command,
        params,
        {"csv": str(csv_path), "manifest": str(manifest_path)},
        result.summary,
    )
    try:
        csv_path.write_text(csv_text(result), encoding="utf-8", newline="")
        manifest_path.write_text(json_text(manifest), encoding="utf-8", newline="")
    except OSError as exc:
        raise _IOFailure(f"cannot write outputs under {prefix!r}: {exc.strerror or exc}") from exc


class _IOFailure(Exception):
    pass


def _verdict(result: StudyResult) -> int:
    for key in VERDICT_KEYS:
        if result.summary.get(key) is False:
            return EXIT_FAIL
    return EXIT_OK


def cmd_study(args: argparse.Namespace) -> int:
    params = _resolve_study_params(args)
    threads = _default_threads() if args.threads is None else max(1, args.threads)
    result = run_study(params, threads)
    if args.out:
        _write_outputs(result, params, args.out, "study")
    print(_summary_line(result))
    return _verdict(result)


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        manifest = read_manifest(args.manifest)
    except (OSError, json.JSONDecodeError) as exc:
        raise _IOFailure(f"cannot read manifest {args.manifest!r}: {exc}") from exc
    params = manifest["parameters"]
    result = run_study(params, _default_threads())
    if args.out:
        _write_outputs(result, params, args.out, manifest.get("command", "study"))
    print(_summary_line(result))
    return _verdict(result)


# -- oracle check ----------------------------------------------------------------


def cmd_oracle_check(args: argparse.Namespace) -> int:
    report = oracle_check(args.samples, args.seed, args.min_qubits, args.max_qubits, args.cfi_tol, args.qfi_tol)
    for failure in report.failures:
        case = failure.case
        record = {
            "seed": args.seed,
            "index": case.index,
            "p": list(case.p),
            "t": case.t,
            "omega_t": case.omega_t,
            "g": case.g,
            "alpha": case.alpha,
            "cfi": failure.cfi,
            "cfi_oracle": failure.cfi_oracle,
            "qfi": failure.qfi,
            "qfi_oracle": failure.qfi_oracle,
        }
        print("FAIL " + json.dumps(record, sort_keys=True))
    print(
        f"oracle-check samples={args.samples} seed={args.seed} qubits=[{args.min_qubits},{args.max_qubits}] "
        f"max_cfi_rel={report.max_cfi_rel:.3e} max_qfi_rel={report.max_qfi_rel:.3e} "
        f"failures={len(report.failures)}"
    )
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {
    "cfi": cmd_cfi,
    "study": cmd_study,
    "replay": cmd_replay,
    "oracle-check": cmd_oracle_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
