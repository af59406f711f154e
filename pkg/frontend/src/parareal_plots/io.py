"""Readers for the laboratory's CSV and JSON artifact formats.

The plot tool is strictly read-only over artifacts: it consumes the grid
CSV (``z1,z2,abs_R,norm_E_inf,accuracy_err,class``), the sweep CSV
(``Ns,error,runtime_s,theoretical_runtime_s,K_bar``) and the JSON
sidecar, and never imports the engine that produced them.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

GRID_COLUMNS = ("z1", "z2", "abs_R", "norm_E_inf", "accuracy_err", "class")
SWEEP_COLUMNS = ("Ns", "error", "runtime_s", "theoretical_runtime_s", "K_bar")

CLASS_TOKENS = ("CONV_STABLE", "CONV_UNSTABLE", "NOCONV_STABLE", "NOCONV_UNSTABLE")


class SchemaError(ValueError):
    """Raised when an input file does not match the documented schema."""


@dataclass(frozen=True)
class GridData:
    """A rectangular (z1, z2) grid, arrays indexed ``[i, j]``."""

    z1_axis: np.ndarray
    z2_axis: np.ndarray
    abs_R: np.ndarray
    norm_E_inf: np.ndarray
    accuracy_err: np.ndarray
    cls: np.ndarray


@dataclass(frozen=True)
class SweepData:
    Ns: np.ndarray
    error: np.ndarray
    runtime_s: np.ndarray
    theoretical_runtime_s: np.ndarray
    K_bar: np.ndarray


def read_grid_csv(path) -> GridData:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if tuple(header) != GRID_COLUMNS:
            raise SchemaError(f"{path}: expected columns {','.join(GRID_COLUMNS)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    try:
        z1 = np.array([float(r[0]) for r in rows])
        z2 = np.array([float(r[1]) for r in rows])
        values = np.array([[float(r[2]), float(r[3]), float(r[4])] for r in rows])
        cls = np.array([r[5] for r in rows])
    except (IndexError, ValueError) as exc:
        raise SchemaError(f"{path}: malformed row ({exc})") from None
    bad = set(cls) - set(CLASS_TOKENS)
    if bad:
        raise SchemaError(f"{path}: unknown class tokens {sorted(bad)}")

    z1_axis = np.unique(z1)
    z2_axis = np.unique(z2)
    n1, n2 = z1_axis.size, z2_axis.size
    if n1 * n2 != len(rows):
        raise SchemaError(f"{path}: rows do not form a complete {n1}x{n2} grid")
    # rows are written z1-major with z2 varying fastest
    shape = (n1, n2)
    return GridData(
        z1_axis=z1_axis,
        z2_axis=z2_axis,
        abs_R=values[:, 0].reshape(shape),
        norm_E_inf=values[:, 1].reshape(shape),
        accuracy_err=values[:, 2].reshape(shape),
        cls=cls.reshape(shape),
    )


def read_sweep_csv(path) -> SweepData:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if tuple(header) != SWEEP_COLUMNS:
            raise SchemaError(f"{path}: expected columns {','.join(SWEEP_COLUMNS)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    try:
        data = np.array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise SchemaError(f"{path}: malformed row ({exc})") from None
    if data.shape[1] != 5:
        raise SchemaError(f"{path}: expected 5 columns per row")
    return SweepData(
        Ns=data[:, 0],
        error=data[:, 1],
        runtime_s=data[:, 2],
        theoretical_runtime_s=data[:, 3],
        K_bar=data[:, 4],
    )


def read_sidecar(path) -> dict:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict) or "axes" not in doc:
        raise SchemaError(f"{path}: not a grid sidecar")
    return doc
