"""JSON conversion, dense JSON matrices and Matrix Market ingestion."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import scipy.io

from .errors import InputError
from .numkernel import MAX_DIM, as_matrix


def to_jsonable(obj):
    """Recursively convert numpy/complex values; complex scalars become [re, im]."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    return obj


def _float(x) -> float | str:
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def dumps(obj) -> str:
    # repr-based float formatting round-trips doubles exactly
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"n": a.shape[0],
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in a]}


def matrix_from_json(doc) -> np.ndarray:
    try:
        n = int(doc["n"])
        rows = doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"json-dense matrix needs 'n' and 'entries': {exc}") from None
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InputError(f"json-dense entries are not {n}x{n}")
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(rows):
        for j, z in enumerate(row):
            try:
                if isinstance(z, (list, tuple)):
                    if len(z) != 2:
                        raise ValueError("expected [re, im]")
                    out[i, j] = complex(float(z[0]), float(z[1]))
                else:
                    out[i, j] = float(z)
            except (TypeError, ValueError) as exc:
                raise InputError(f"entry ({i},{j}) is not a number or [re, im] pair: {exc}") from None
    return as_matrix(out)


def read_matrix(path) -> np.ndarray:
    """Load a square matrix from Matrix Market (.mtx) or json-dense (.json)."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    text_head = path.read_text(errors="replace")[:64].lstrip()
    if path.suffix.lower() == ".json" or text_head.startswith("{"):
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc}") from None
        return matrix_from_json(doc)
    try:
        m = scipy.io.mmread(str(path))
    except Exception as exc:  # scipy raises a mix of ValueError/IndexError/OSError
        raise InputError(f"{path}: cannot parse Matrix Market file: {exc}") from None
    if hasattr(m, "toarray"):
        m = m.toarray()
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"{path}: matrix must be square, got shape {m.shape}")
    return as_matrix(m, max_dim=MAX_DIM)


def write_matrix_json(path, a) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(a)) + "\n")
