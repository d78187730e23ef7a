"""File formats: CSV+JSON grids, binary complex matrices, spectra and tables.

Every writer is atomic per file (write to a temporary sibling, then rename)
and deterministic: JSON keys are sorted and floats use shortest round-trip
formatting.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np


class MixedConfigError(ValueError):
    """Files produced by different configurations were combined."""


def _atomic_write(path: Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def write_json(path, obj) -> None:
    _atomic_write(Path(path), dumps(obj).encode())


def read_json(path):
    return json.loads(Path(path).read_text())


def _stem(path) -> Path:
    path = Path(path)
    return path.with_suffix("") if path.suffix in (".csv", ".json", ".bin") else path


def write_grid(path, values: np.ndarray, metadata: dict) -> tuple[Path, Path]:
    """``<stem>.csv`` (K rows of K values, row index = position cell) plus ``<stem>.json``."""
    stem = _stem(path)
    buf = io.StringIO()
    for row in np.asarray(values, dtype=float):
        buf.write(",".join(repr(float(v)) for v in row))
        buf.write("\n")
    csv_path, json_path = stem.with_suffix(".csv"), stem.with_suffix(".json")
    _atomic_write(csv_path, buf.getvalue().encode())
    write_json(json_path, metadata)
    return csv_path, json_path


def read_grid(path) -> tuple[np.ndarray, dict]:
    stem = _stem(path)
    values = np.loadtxt(stem.with_suffix(".csv"), delimiter=",", ndmin=2)
    return values, read_json(stem.with_suffix(".json"))


def write_operator(path, M: np.ndarray, label: str, metadata: dict | None = None) -> tuple[Path, Path]:
    """Row-major little-endian (re, im) float64 pairs in ``<stem>.bin`` with a JSON header."""
    stem = _stem(path)
    M = np.ascontiguousarray(M, dtype="<c16")
    header = {"shape": list(M.shape), "label": label, "dtype": "complex128-le", "order": "row-major"}
    header.update(metadata or {})
    _atomic_write(stem.with_suffix(".bin"), M.tobytes(order="C"))
    write_json(stem.with_suffix(".json"), header)
    return stem.with_suffix(".bin"), stem.with_suffix(".json")


def read_operator(path) -> tuple[np.ndarray, dict]:
    stem = _stem(path)
    header = read_json(stem.with_suffix(".json"))
    data = np.frombuffer(stem.with_suffix(".bin").read_bytes(), dtype="<c16")
    return data.reshape(header["shape"]).astype(complex), header


def write_spectrum(path, eigenvalues, metadata: dict) -> Path:
    path = Path(path).with_suffix(".json")
    z = np.asarray(eigenvalues, dtype=complex)
    write_json(path, {"eigenvalues": [[float(v.real), float(v.imag)] for v in z], "metadata": metadata})
    return path


def read_spectrum(path) -> tuple[np.ndarray, dict]:
    obj = read_json(Path(path).with_suffix(".json"))
    z = np.array([complex(re, im) for re, im in obj["eigenvalues"]], dtype=complex)
    return z, obj["metadata"]


def write_table(path, rows: list[dict], columns: list[str]) -> Path:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else _cell(row.get(k))) for k in columns})
    path = Path(path)
    _atomic_write(path, buf.getvalue().encode())
    return path


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def read_table(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def check_same_config(metadatas) -> str:
    """Return the common ``config_hash`` of several metadata records, or raise."""
    hashes = {m.get("config_hash") for m in metadatas}
    if len(hashes) != 1 or None in hashes:
        raise MixedConfigError(f"refusing to aggregate outputs from different configurations: {sorted(map(str, hashes))}")
    return hashes.pop()
