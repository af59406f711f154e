"""Amplification factors on the partitioned oscillatory test problem.

The test problem is y' = i*lam1*y + i*lam2*y with the first term treated
implicitly and the second explicitly.  With z1 = h*lam1 and z2 = h*lam2,
one step of an additive RK method multiplies the solution by the
amplification factor R(i z1, i z2), which is computed here by executing
the scheme on y0 = 1 rather than from a precomputed rational function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tableaux import IMEXTableau


class SingularStageSolveError(ArithmeticError):
    """Raised when an implicit stage denominator vanishes."""


@dataclass(frozen=True)
class PropagatorFactors:
    """Coarse and fine block amplification factors at one test point.

    ``F`` spans ``Nf`` fine steps; ``G`` spans the same interval with
    ``Ng`` coarse steps, each ``Nf/Ng`` times larger.  Values may be
    scalars or broadcast-compatible complex arrays.
    """

    F: object
    G: object
    Nf: int
    Ng: int


def rk_amp(t: IMEXTableau, z1, z2):
    """One-step amplification factor R(i z1, i z2) of an additive RK scheme.

    Broadcasts over array-valued ``z1``/``z2``.  Each implicit stage is
    the scalar division by (1 - aI[j,j] * i * z1); a vanishing
    denominator raises :class:`SingularStageSolveError` (impossible for
    real arguments, but guarded).
    """
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    lam_i = 1j * z1
    lam_e = 1j * z2
    shape = np.broadcast(lam_i, lam_e).shape

    fI = []  # implicit right-hand sides i*z1*Y_j
    fE = []  # explicit right-hand sides i*z2*Y_j
    for j in range(t.s):
        r = np.ones(shape, dtype=complex)
        for k in range(j):
            aE = t.aE[j, k]
            if aE != 0.0:
                r = r + aE * fE[k]
            aI = t.aI[j, k]
            if aI != 0.0:
                r = r + aI * fI[k]
        denom = 1.0 - t.aI[j, j] * lam_i
        if np.any(denom == 0.0):
            raise SingularStageSolveError("singular stage solve")
        Y = r / denom
        fI.append(lam_i * Y)
        fE.append(lam_e * Y)

    out = np.ones(shape, dtype=complex)
    for j in range(t.s):
        if t.bE[j] != 0.0:
            out = out + t.bE[j] * fE[j]
        if t.bI[j] != 0.0:
            out = out + t.bI[j] * fI[j]
    if out.ndim == 0:
        return complex(out)
    return out


def propagator_factors(
    coarse: IMEXTableau, fine: IMEXTableau, Nf: int, Ng: int, z1, z2
) -> PropagatorFactors:
    """Amplification of the fine and coarse propagators over one interval.

    ``(z1, z2)`` is the per-fine-step test point.  The coarse propagator
    covers the same interval with ``Ng`` steps, so its per-step point is
    scaled by ``Nf/Ng``.
    """
    if Nf < 1 or Ng < 1:
        raise ValueError("Nf and Ng must be >= 1")
    ratio = Nf / Ng
    F = rk_amp(fine, z1, z2) ** Nf
    G = rk_amp(coarse, ratio * np.asarray(z1, float), ratio * np.asarray(z2, float)) ** Ng
    return PropagatorFactors(F=F, G=G, Nf=Nf, Ng=Ng)
