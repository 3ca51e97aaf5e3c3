"""Readers for the documented run-artifact formats.

Every reader validates the input against its schema and raises SchemaError
naming the offending column or field. Inputs are never modified.
"""

from __future__ import annotations

import csv
import json

import numpy as np

__all__ = [
    "SchemaError",
    "read_trajectory",
    "read_bifurcation",
    "read_state",
    "read_field_dump",
]

TRAJECTORY_COLUMNS = ["t", "X", "Y", "Z", "E_K", "E_P", "E_T", "Q", "V"]
BIFURCATION_COLUMNS = [
    "r",
    "kind",
    "z_periodicity",
    "z_max_min",
    "z_max_max",
    "n_peaks",
    "lyapunov",
]
ATTRACTOR_KINDS = {"FixedPoint", "LimitCycle", "LimitTorus", "Chaotic", "Undetermined"}


class SchemaError(ValueError):
    """An input file does not match its documented schema."""


def _read_csv(path: str, required: list[str], label: str) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{label} {path!r} is empty")
    header, body = rows[0], rows[1:]
    for col in required:
        if col not in header:
            raise SchemaError(f"{label} {path!r} is missing column {col!r}")
    if not body:
        raise SchemaError(f"{label} {path!r} has a header but no data rows")
    width = len(header)
    for i, row in enumerate(body):
        if len(row) != width:
            raise SchemaError(f"{label} {path!r} row {i + 2} has {len(row)} fields, expected {width}")
    return header, body


def read_trajectory(path: str) -> dict[str, np.ndarray]:
    """Trajectory CSV -> column arrays. Requires the full documented header."""
    header, body = _read_csv(path, TRAJECTORY_COLUMNS, "trajectory CSV")
    out: dict[str, np.ndarray] = {}
    for col in header:
        j = header.index(col)
        try:
            out[col] = np.array([float(row[j]) for row in body])
        except ValueError as exc:
            raise SchemaError(f"trajectory CSV {path!r} column {col!r}: {exc}") from None
    return out


def read_bifurcation(path: str) -> list[dict]:
    """Bifurcation sweep CSV -> list of row dicts.

    kind must be one of the documented attractor kinds or an 'error: ...'
    marker; numeric fields may be empty for failed rows.
    """
    header, body = _read_csv(path, BIFURCATION_COLUMNS, "bifurcation CSV")
    idx = {col: header.index(col) for col in BIFURCATION_COLUMNS}
    rows = []
    for i, raw in enumerate(body):
        kind = raw[idx["kind"]]
        if kind not in ATTRACTOR_KINDS and not kind.startswith("error"):
            raise SchemaError(
                f"bifurcation CSV {path!r} row {i + 2} column 'kind': unknown value {kind!r}"
            )
        row: dict = {"kind": kind}
        for col in ("r", "z_max_min", "z_max_max", "lyapunov"):
            text = raw[idx[col]]
            try:
                row[col] = float(text) if text else None
            except ValueError:
                raise SchemaError(
                    f"bifurcation CSV {path!r} row {i + 2} column {col!r}: "
                    f"not a number: {text!r}"
                ) from None
        if row["r"] is None:
            raise SchemaError(f"bifurcation CSV {path!r} row {i + 2} column 'r': empty")
        for col in ("z_periodicity", "n_peaks"):
            text = raw[idx[col]]
            row[col] = int(text) if text else None
        rows.append(row)
    return rows


def read_state(path: str) -> dict:
    """State snapshot JSON -> {'L', 'M', 't', 'r', 'sigma', 'psi_hat', 'theta_hat'}
    with complex (L+1, M) arrays."""
    with open(path) as fh:
        text = fh.read()
    if not text.strip():
        raise SchemaError(f"state JSON {path!r} is empty")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"state JSON {path!r}: {exc}") from None
    for key in ("L", "M", "psi_hat", "theta_hat"):
        if key not in doc:
            raise SchemaError(f"state JSON {path!r} is missing field {key!r}")
    L, M = int(doc["L"]), int(doc["M"])
    out = {"L": L, "M": M, "t": doc.get("t"), "r": doc.get("r"), "sigma": doc.get("sigma")}
    for key in ("psi_hat", "theta_hat"):
        arr = np.asarray(doc[key], dtype=float)
        if arr.shape != (L + 1, M, 2):
            raise SchemaError(
                f"state JSON {path!r} field {key!r}: shape {arr.shape} does not "
                f"match (L+1, M, 2) = {(L + 1, M, 2)}"
            )
        out[key] = arr[..., 0] + 1j * arr[..., 1]
    return out


def read_field_dump(path: str) -> dict:
    """Physical field dump -> {'psi', 'theta', 'x', 'z', 't', 'l_x'}.

    Layout: JSON header line, N_x rows of streamfunction over N_z vertical
    levels (boundary rows included), a blank line, N_x rows of temperature.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].strip():
        raise SchemaError(f"field dump {path!r} is empty")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SchemaError(f"field dump {path!r} header: {exc}") from None
    for key in ("N_x", "N_z", "l_x"):
        if key not in header:
            raise SchemaError(f"field dump {path!r} header is missing {key!r}")
    N_x, N_z = int(header["N_x"]), int(header["N_z"])
    expected = 1 + N_x + 1 + N_x
    if len(lines) < expected:
        raise SchemaError(
            f"field dump {path!r}: {len(lines)} lines, expected at least {expected}"
        )

    def block(start: int, name: str) -> np.ndarray:
        rows = []
        for i in range(N_x):
            parts = lines[start + i].split()
            if len(parts) != N_z:
                raise SchemaError(
                    f"field dump {path!r} {name} row {i}: {len(parts)} values, "
                    f"expected {N_z}"
                )
            rows.append([float(v) for v in parts])
        return np.array(rows)

    psi = block(1, "psi")
    if lines[1 + N_x].strip():
        raise SchemaError(f"field dump {path!r}: expected a blank separator line")
    theta = block(2 + N_x, "theta")
    l_x = float(header["l_x"])
    x = np.arange(N_x) * l_x / N_x
    z = np.linspace(0.0, 1.0, N_z)
    return {"psi": psi, "theta": theta, "x": x, "z": z, "t": header.get("t"), "l_x": l_x}
