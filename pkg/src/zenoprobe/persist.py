"""CSV and manifest persistence for study results.

Floats are written with :func:`repr` (shortest string that round-trips),
vectors as ``;``-separated lists, files as UTF-8 with LF line endings.
Column layouts are listed in ``docs/formats.md``.
"""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone
from pathlib import Path

from .experiments import SUMMARIZERS, StudyResult

INT_COLUMNS = {"index", "n", "j", "n_qubits", "agrees"}
FLOAT_VECTOR_COLUMNS = {"p", "q", "eps"}
INT_VECTOR_COLUMNS = {"perm"}


def _format(column: str, value) -> str:
    if column in FLOAT_VECTOR_COLUMNS:
        return ";".join(repr(float(v)) for v in value)
    if column in INT_VECTOR_COLUMNS:
        return ";".join(str(int(v)) for v in value)
    if column in INT_COLUMNS:
        return str(int(value))
    return repr(float(value))


def _parse(column: str, text: str):
    if column in FLOAT_VECTOR_COLUMNS:
        return tuple(float(v) for v in text.split(";")) if text else ()
    if column in INT_VECTOR_COLUMNS:
        return tuple(int(v) for v in text.split(";")) if text else ()
    if column in INT_COLUMNS:
        return int(text)
    return float(text)


def csv_text(result: StudyResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_format(c, v) for c, v in zip(result.columns, row)])
    return buf.getvalue()


def write_csv(result: StudyResult, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(csv_text(result))
    return path


def parse_csv(text: str, study: str) -> StudyResult:
    reader = csv.reader(io.StringIO(text))
    columns = tuple(next(reader))
    rows = [tuple(_parse(c, v) for c, v in zip(columns, record)) for record in reader]
    summary = SUMMARIZERS[study](rows) if rows else {}
    return StudyResult(study, columns, rows, summary)


def read_csv(path: str | Path, study: str) -> StudyResult:
    return parse_csv(Path(path).read_text(encoding="utf-8"), study)


def json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")


def build_manifest(command: str, parameters: dict, outputs: dict, summary: dict) -> dict:
    from . import __version__

    return {
        "command": command,
        "parameters": parameters,
        "seed": parameters.get("seed"),
        "version": __version__,
        "timestamp": utc_timestamp(),
        "outputs": outputs,
        "summary": summary,
    }


def write_manifest(manifest: dict, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(json_text(manifest))
    return path


def read_manifest(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
