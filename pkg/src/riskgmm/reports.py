"""CSV/JSON emission shared by the CLI: versioned schemas, atomic writes."""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

CSV_VERSION_LINE = "# riskgmm-csv v1"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-riskgmm-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: str, columns: list[str], rows) -> None:
    lines = [CSV_VERSION_LINE, ",".join(columns)]
    for row in rows:
        if isinstance(row, dict):
            lines.append(",".join(_fmt(row[c]) for c in columns))
        else:
            lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_csv(path: str):
    with open(path) as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_VERSION_LINE:
            raise ValueError(f"unexpected CSV schema line: {first!r}")
        columns = fh.readline().rstrip("\n").split(",")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    return columns, rows
