"""Stability, convergence and accuracy maps on the (z1, z2) plane.

Grids are evaluated with the scaled block stability function: the axes
carry the per-fine-step point (z1, z2), the fine propagator takes Nf
such steps and the coarse propagator covers the same interval with Ng
steps scaled by Nf/Ng.  Each cell is classified by the overlay legend
(one-step stability |R| <= 1 versus contractive iteration ||E||_inf < 1).
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dahlquist import PropagatorFactors, propagator_factors, rk_amp
from .parareal_matrix import e_norm_inf_closed, parareal_amp
from .tableaux import IMEXTableau, builtin_tableau, normalize_method_id

# |R| values above this are clamped so log-scale payloads stay finite
OVERFLOW_CLAMP = 1e12

CONV_STABLE = "CONV_STABLE"
CONV_UNSTABLE = "CONV_UNSTABLE"
NOCONV_STABLE = "NOCONV_STABLE"
NOCONV_UNSTABLE = "NOCONV_UNSTABLE"
CLASS_TOKENS = (CONV_STABLE, CONV_UNSTABLE, NOCONV_STABLE, NOCONV_UNSTABLE)

CSV_HEADER = "z1,z2,abs_R,norm_E_inf,accuracy_err,class"


@dataclass(frozen=True)
class MethodPairSpec:
    """A coarse/fine method pairing with its block parameters."""

    coarse: str
    fine: str
    Np: int
    Nf: int
    Ng: int
    K: int

    def __post_init__(self):
        object.__setattr__(self, "coarse", normalize_method_id(self.coarse))
        object.__setattr__(self, "fine", normalize_method_id(self.fine))
        if self.Np < 1 or self.Nf < 1 or self.Ng < 1:
            raise ValueError("Np, Nf and Ng must be >= 1")
        if not 0 <= self.K <= self.Np:
            raise ValueError("iteration count exceeds processors")

    @property
    def NT(self) -> int:
        return self.Np * self.Nf

    def tableaus(self) -> tuple:
        return builtin_tableau(self.coarse), builtin_tableau(self.fine)

    def as_dict(self) -> dict:
        return {
            "coarse": self.coarse,
            "fine": self.fine,
            "Np": self.Np,
            "Nf": self.Nf,
            "Ng": self.Ng,
            "K": self.K,
            "NT": self.NT,
        }


@dataclass
class RegionGrid:
    """Rectangular grid of amplification, convergence and accuracy data.

    Arrays are indexed ``[i, j]`` for the point ``(z1_axis[i], z2_axis[j])``.
    """

    z1_axis: np.ndarray
    z2_axis: np.ndarray
    NT: int
    abs_R: np.ndarray
    norm_E_inf: np.ndarray
    accuracy_err: np.ndarray
    cls: np.ndarray
    log10_abs_R: np.ndarray = field(default=None)

    def class_counts(self) -> dict:
        return {token: int(np.count_nonzero(self.cls == token)) for token in CLASS_TOKENS}


def classify(abs_R: np.ndarray, norm_E_inf: np.ndarray) -> np.ndarray:
    """Overlay classification: pure function of (|R| <= 1, ||E|| < 1)."""
    stable = abs_R <= 1.0
    conv = norm_E_inf < 1.0
    cls = np.full(np.broadcast(stable, conv).shape, NOCONV_UNSTABLE, dtype="<U16")
    cls[stable & conv] = CONV_STABLE
    cls[~stable & conv] = CONV_UNSTABLE
    cls[stable & ~conv] = NOCONV_STABLE
    return cls


def _clamp(R: np.ndarray) -> np.ndarray:
    """Replace non-finite or overflowing amplifications by a large sentinel."""
    R = np.asarray(R, dtype=complex)
    bad = ~np.isfinite(R) | (np.abs(R) > OVERFLOW_CLAMP)
    return np.where(bad, OVERFLOW_CLAMP + 0j, R)


def scaled_parareal_amp(spec: MethodPairSpec, z1, z2):
    """Scaled block stability function at the per-fine-step point (z1, z2)."""
    coarse, fine = spec.tableaus()
    factors = propagator_factors(coarse, fine, spec.Nf, spec.Ng, z1, z2)
    return parareal_amp(factors, spec.Np, spec.K).R


def _block_factors(spec: MethodPairSpec, Z1, Z2) -> PropagatorFactors:
    coarse, fine = spec.tableaus()
    return propagator_factors(coarse, fine, spec.Nf, spec.Ng, Z1, Z2)


def _default_threads(threads=None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("PARAREAL_LAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _chunked_rows(z1_axis, worker, threads):
    """Evaluate per-z1-row payloads, optionally in a thread pool.

    Rows are computed independently and reassembled in index order, so
    the result is identical to serial evaluation.
    """
    n = len(z1_axis)
    nthreads = _default_threads(threads)
    if nthreads <= 1 or n <= 1:
        return [worker(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=nthreads) as pool:
        return list(pool.map(worker, range(n)))


def compute_grid(spec: MethodPairSpec, z1_axis, z2_axis, threads=None) -> RegionGrid:
    """Fill |R|, ||E||_inf, accuracy error and the overlay class per cell."""
    z1_axis = np.asarray(z1_axis, dtype=float)
    z2_axis = np.asarray(z2_axis, dtype=float)
    if z1_axis.size == 0 or z2_axis.size == 0:
        raise ValueError("axes must be nonempty")
    NT = spec.NT

    def row(i):
        z1 = z1_axis[i]
        factors = _block_factors(spec, np.full_like(z2_axis, z1), z2_axis)
        R = _clamp(parareal_amp(factors, spec.Np, spec.K).R)
        norm = e_norm_inf_closed(factors, spec.Np)
        exact = np.exp(1j * NT * (z1 + z2_axis))
        return np.abs(R), np.asarray(norm, float), np.abs(R - exact)

    rows = _chunked_rows(z1_axis, row, threads)
    abs_R = np.vstack([r[0] for r in rows])
    norm_E = np.vstack([r[1] for r in rows])
    acc = np.vstack([r[2] for r in rows])
    return RegionGrid(
        z1_axis=z1_axis,
        z2_axis=z2_axis,
        NT=NT,
        abs_R=abs_R,
        norm_E_inf=norm_E,
        accuracy_err=acc,
        cls=classify(abs_R, norm_E),
    )


def imexrk_amplitude_grid(t: IMEXTableau, z1_axis, z2_axis, threads=None) -> RegionGrid:
    """One-step amplification surface |R(i z1, i z2)| for a single method."""
    z1_axis = np.asarray(z1_axis, dtype=float)
    z2_axis = np.asarray(z2_axis, dtype=float)
    if z1_axis.size == 0 or z2_axis.size == 0:
        raise ValueError("axes must be nonempty")

    def row(i):
        z1 = z1_axis[i]
        R = _clamp(rk_amp(t, np.full_like(z2_axis, z1), z2_axis))
        exact = np.exp(1j * (z1 + z2_axis))
        return np.abs(R), np.abs(R - exact)

    rows = _chunked_rows(z1_axis, row, threads)
    abs_R = np.vstack([r[0] for r in rows])
    acc = np.vstack([r[1] for r in rows])
    norm_E = np.zeros_like(abs_R)
    return RegionGrid(
        z1_axis=z1_axis,
        z2_axis=z2_axis,
        NT=1,
        abs_R=abs_R,
        norm_E_inf=norm_E,
        accuracy_err=acc,
        cls=classify(abs_R, norm_E),
        log10_abs_R=np.log10(np.maximum(abs_R, 1e-300)),
    )


def accuracy_grid(
    spec: MethodPairSpec, z1_axis, z2_axis, for_fine_only: bool = False, threads=None
) -> RegionGrid:
    """Accuracy map |R_hat - exp(i NT (z1 + z2))| over the grid.

    With ``for_fine_only`` the fully-converged reference
    R_F(i z1, i z2)^NT is used instead of the K-iteration block function.
    """
    if not for_fine_only:
        return compute_grid(spec, z1_axis, z2_axis, threads=threads)

    z1_axis = np.asarray(z1_axis, dtype=float)
    z2_axis = np.asarray(z2_axis, dtype=float)
    if z1_axis.size == 0 or z2_axis.size == 0:
        raise ValueError("axes must be nonempty")
    _, fine = spec.tableaus()
    NT = spec.NT

    def row(i):
        z1 = z1_axis[i]
        factors = _block_factors(spec, np.full_like(z2_axis, z1), z2_axis)
        R = _clamp(rk_amp(fine, np.full_like(z2_axis, z1), z2_axis) ** NT)
        norm = e_norm_inf_closed(factors, spec.Np)
        exact = np.exp(1j * NT * (z1 + z2_axis))
        return np.abs(R), np.asarray(norm, float), np.abs(R - exact)

    rows = _chunked_rows(z1_axis, row, threads)
    abs_R = np.vstack([r[0] for r in rows])
    norm_E = np.vstack([r[1] for r in rows])
    acc = np.vstack([r[2] for r in rows])
    return RegionGrid(
        z1_axis=z1_axis,
        z2_axis=z2_axis,
        NT=NT,
        abs_R=abs_R,
        norm_E_inf=norm_E,
        accuracy_err=acc,
        cls=classify(abs_R, norm_E),
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_grid_csv(grid: RegionGrid, path) -> None:
    """Write the grid as CSV rows ``z1,z2,abs_R,norm_E_inf,accuracy_err,class``."""
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for i, z1 in enumerate(grid.z1_axis):
            for j, z2 in enumerate(grid.z2_axis):
                fh.write(
                    ",".join(
                        (
                            _fmt(z1),
                            _fmt(z2),
                            _fmt(grid.abs_R[i, j]),
                            _fmt(grid.norm_E_inf[i, j]),
                            _fmt(grid.accuracy_err[i, j]),
                            str(grid.cls[i, j]),
                        )
                    )
                    + "\n"
                )


def write_grid_sidecar(grid: RegionGrid, path, spec=None, speedup=None, efficiency=None) -> None:
    """Write the JSON sidecar used by the plotter for titles and axes."""
    doc = {
        "spec": spec.as_dict() if spec is not None else None,
        "axes": {
            "z1": [float(v) for v in grid.z1_axis],
            "z2": [float(v) for v in grid.z2_axis],
        },
        "NT": int(grid.NT),
        "speedup": None if speedup is None else float(speedup),
        "efficiency": None if efficiency is None else float(efficiency),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
