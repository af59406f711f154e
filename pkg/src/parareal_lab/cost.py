"""Cost, speedup and efficiency model for single- and multi-block Parareal.

Costs are in arbitrary units per method step.  The default per-step
costs equal the number of implicit stage solves of the method, which is
the convention under which the model reproduces the reference
theoretical speedup of 16.18 for the (Np=128, K=3, Ng=1, Nf=16)
configuration with the rk3/rk4 pairing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .tableaux import IMEXTableau, builtin_tableau


class DegenerateFreeModelError(ZeroDivisionError):
    """Raised when both the coarse cost ratio and K-bar vanish."""


@dataclass(frozen=True)
class CostModel:
    """Parameters of one Parareal cost evaluation.

    ``cf``/``cg`` are per-step costs of the fine and coarse methods,
    ``Kbar`` the average iteration count across blocks.
    """

    cf: float
    cg: float
    Ns: int
    Np: int
    Nf: int
    Ng: int
    Nb: int
    Kbar: float

    def __post_init__(self):
        if self.cf <= 0.0 or self.cg <= 0.0:
            raise ValueError("per-step costs must be positive")
        if self.Ns != self.Np * self.Nf * self.Nb:
            raise ValueError(
                f"inconsistent step counts: Ns={self.Ns} != Np*Nf*Nb="
                f"{self.Np * self.Nf * self.Nb}"
            )
        if not 0.0 <= self.Kbar <= self.Np:
            raise ValueError("Kbar must lie in [0, Np]")

    @property
    def CF(self) -> float:
        return self.Nf * self.cf

    @property
    def CG(self) -> float:
        return self.Ng * self.cg

    @property
    def alpha(self) -> float:
        return self.CG / self.CF


def default_step_costs(coarse: IMEXTableau, fine: IMEXTableau) -> tuple:
    """(cg, cf) from the implicit stage-solve counts of the two methods."""
    return float(coarse.implicit_solves), float(fine.implicit_solves)


def serial_cost(m: CostModel) -> float:
    """Cost of the full serial fine run, Ns * cf."""
    return m.Ns * m.cf


def block_cost(m: CostModel, K: int) -> float:
    """Cost of K Parareal iterations on one block: Np*CG + K*(CF + CG)."""
    return m.Np * m.CG + K * (m.CF + m.CG)


def speedup(m: CostModel) -> float:
    """Theoretical speedup S = Np / (Np*alpha + Kbar*(1 + alpha))."""
    denom = m.Np * m.alpha + m.Kbar * (1.0 + m.alpha)
    if denom == 0.0:
        raise DegenerateFreeModelError("degenerate free model")
    return m.Np / denom


def efficiency(m: CostModel) -> float:
    """Parallel efficiency E = S / Np."""
    return speedup(m) / m.Np


def speedup_from_blocks(m: CostModel, iterations) -> float:
    """Total speedup as the harmonic mean of per-block speedups.

    ``iterations`` holds the per-block iteration counts K_i; the result
    equals the direct formula when all K_i coincide with Kbar.
    """
    iterations = list(iterations)
    if len(iterations) != m.Nb:
        raise ValueError("need one iteration count per block")
    inv_sum = 0.0
    for K_i in iterations:
        block = CostModel(
            cf=m.cf, cg=m.cg, Ns=m.Np * m.Nf, Np=m.Np, Nf=m.Nf, Ng=m.Ng, Nb=1, Kbar=float(K_i)
        )
        inv_sum += 1.0 / speedup(block)
    return 1.0 / (inv_sum / m.Nb)


def speedup_table(coarse_id, fine_id, Np, Nf, Ng, K, ns_values, cf=None, cg=None):
    """Rows (Ns, S, E) for a family of total step counts.

    S and E depend on Ns only through the block count, so with fixed K
    the column is constant; the layout mirrors the theoretical-speedup
    column of the reference table.
    """
    coarse = builtin_tableau(coarse_id)
    fine = builtin_tableau(fine_id)
    cg_default, cf_default = default_step_costs(coarse, fine)
    cf = cf_default if cf is None else float(cf)
    cg = cg_default if cg is None else float(cg)
    NT = Np * Nf
    rows = []
    for Ns in ns_values:
        if Ns % NT != 0:
            raise ValueError(f"Ns={Ns} is not a multiple of the block size NT={NT}")
        Nb = Ns // NT
        m = CostModel(cf=cf, cg=cg, Ns=Ns, Np=Np, Nf=Nf, Ng=Ng, Nb=Nb, Kbar=float(K))
        rows.append((Ns, speedup(m), efficiency(m)))
    return rows
