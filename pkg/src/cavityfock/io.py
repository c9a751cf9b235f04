"""File formats: density-matrix JSON, dataset CSV + sidecar, Wigner and rate-table CSV.

All writers go through a temp file in the target directory followed by a
rename, so a reader never sees a half-written artifact.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .cavity import RATE_COLUMNS, RateRow
from .exceptions import ConfigError
from .fock import DensityMatrix
from .homodyne import QuadratureDataset

DATASET_HEADER = ("theta", "x")
WIGNER_HEADER = ("x", "p", "w")


def _fmt(v: float) -> str:
    return f"{v:.9g}"


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, obj) -> Path:
    return atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}", str(path)) from exc


def write_density(path, rho: DensityMatrix) -> Path:
    return write_json(path, rho.to_dict())


def read_density(path) -> DensityMatrix:
    obj = read_json(path)
    try:
        return DensityMatrix.from_dict(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"not a density matrix: {exc}", str(path)) from exc


def _write_csv(path, header, rows) -> Path:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    return atomic_write_text(path, buf.getvalue())


def _read_csv(path, header):
    """Float rows of a CSV with an exact header; errors carry 1-based line numbers."""
    path = Path(path)
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or tuple(h.strip() for h in first) != tuple(header):
            raise ConfigError(f"line 1: expected header {','.join(header)!r}", str(path))
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ConfigError(f"line {line}: expected {len(header)} fields, got {len(row)}", str(path))
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise ConfigError(f"line {line}: non-numeric field in {row!r}", str(path)) from None
            if not all(np.isfinite(vals)):
                raise ConfigError(f"line {line}: non-finite value", str(path))
            rows.append(vals)
    return np.array(rows, dtype=float).reshape(-1, len(header))


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def write_dataset(path, data: QuadratureDataset) -> Path:
    """CSV ``theta,x`` plus a JSON sidecar with the dataset metadata."""
    path = Path(path)
    _write_csv(path, DATASET_HEADER, ((_fmt(t), _fmt(x)) for t, x in zip(data.theta, data.x)))
    write_json(sidecar_path(path), data.meta)
    return path


def read_dataset(path) -> QuadratureDataset:
    arr = _read_csv(path, DATASET_HEADER)
    if arr.shape[0] == 0:
        raise ConfigError("dataset has no records", str(path))
    side = sidecar_path(path)
    meta = read_json(side) if side.exists() else {}
    return QuadratureDataset(arr[:, 0], arr[:, 1], meta)


def write_wigner_csv(path, xvec, pvec, W) -> Path:
    """Row-major over x then p; ``W[i, j]`` is the value at ``(xvec[i], pvec[j])``."""
    W = np.asarray(W)
    rows = ((_fmt(x), _fmt(p), _fmt(W[i, j])) for i, x in enumerate(xvec) for j, p in enumerate(pvec))
    return _write_csv(path, WIGNER_HEADER, rows)


def read_wigner_csv(path):
    """Inverse of ``write_wigner_csv``: returns ``(xvec, pvec, W)``."""
    arr = _read_csv(path, WIGNER_HEADER)
    xvec = np.unique(arr[:, 0])
    pvec = np.unique(arr[:, 1])
    if xvec.size * pvec.size != arr.shape[0]:
        raise ConfigError("Wigner CSV is not a full rectangular grid", str(path))
    return xvec, pvec, arr[:, 2].reshape(xvec.size, pvec.size)


def write_rate_table(path, rows) -> Path:
    return _write_csv(path, RATE_COLUMNS, ((_fmt(v) for v in row) for row in rows))


def read_rate_table(path) -> list[RateRow]:
    return [RateRow(*r) for r in _read_csv(path, RATE_COLUMNS).tolist()]
