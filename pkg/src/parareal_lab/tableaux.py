"""Additive (implicit-explicit) Runge-Kutta tableaus.

Each method is stored as a pair of Butcher tableaus: a strictly lower
triangular explicit half and a lower triangular (diagonally implicit)
implicit half, so every stage requires a single diagonal solve.

The four built-in methods are the (1,1,1) and (2,3,2) pairs of
Ascher, Ruuth and Spiteri (1997) and the ARK3(2)4L[2]SA and
ARK4(3)6L[2]SA pairs of Kennedy and Carpenter (2003).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

CONSISTENCY_TOL = 1e-12

METHOD_IDS = ("imex-rk1", "imex-rk2", "imex-rk3", "imex-rk4")

# short aliases accepted on the command line
_ALIASES = {
    "rk1": "imex-rk1",
    "rk2": "imex-rk2",
    "rk3": "imex-rk3",
    "rk4": "imex-rk4",
}


class UnknownMethodError(ValueError):
    """Raised when a method identifier does not name a built-in tableau."""


@dataclass(frozen=True)
class IMEXTableau:
    """Dual Butcher tableau of an additive Runge-Kutta method.

    Attributes
    ----------
    id : method identifier.
    s : number of stages.
    order : classical design order.
    aE, bE, cE : explicit coefficients, weights and abscissae.
    aI, bI, cI : implicit coefficients, weights and abscissae.
    """

    id: str
    s: int
    order: int
    aE: np.ndarray
    bE: np.ndarray
    cE: np.ndarray
    aI: np.ndarray
    bI: np.ndarray
    cI: np.ndarray

    def __post_init__(self):
        for name in ("aE", "aI"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        for name in ("bE", "cE", "bI", "cI"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    @property
    def implicit_solves(self) -> int:
        """Number of stages with a nonzero implicit diagonal entry.

        This is the per-step solve count used by the cost model
        (1, 2, 3, 5 for the four built-ins).
        """
        return int(np.count_nonzero(np.diag(self.aI)))


def normalize_method_id(method_id: str) -> str:
    mid = method_id.strip().lower()
    return _ALIASES.get(mid, mid)


def builtin_tableau(method_id: str) -> IMEXTableau:
    """Return one of the four built-in additive RK tableaus.

    Accepts ``imex-rk1`` .. ``imex-rk4`` or the short aliases
    ``rk1`` .. ``rk4``.  Raises :class:`UnknownMethodError` otherwise.
    """
    mid = normalize_method_id(method_id)
    try:
        factory = _BUILTINS[mid]
    except KeyError:
        raise UnknownMethodError(f"unknown method: {method_id!r}") from None
    return factory()


def validate(t: IMEXTableau) -> list:
    """Check structural invariants; returns a list of violation messages.

    An empty list means the tableau is consistent: strictly lower
    triangular explicit half, lower triangular implicit half, row sums
    matching the abscissae and both weight vectors summing to one.
    """
    violations = []
    s = t.s
    for name, arr, expected in (
        ("aE", t.aE, (s, s)),
        ("aI", t.aI, (s, s)),
    ):
        if arr.shape != expected:
            violations.append(f"{name} has shape {arr.shape}, expected {expected}")
    for name, arr in (("bE", t.bE), ("cE", t.cE), ("bI", t.bI), ("cI", t.cI)):
        if arr.shape != (s,):
            violations.append(f"{name} has length {arr.shape}, expected {s}")
    if violations:
        return violations

    if np.any(np.triu(t.aE) != 0.0):
        violations.append("explicit tableau not strictly lower triangular")
    if np.any(np.triu(t.aI, k=1) != 0.0):
        violations.append("implicit tableau not lower triangular")

    for name, a, c in (("aE", t.aE, t.cE), ("aI", t.aI, t.cI)):
        dev = np.max(np.abs(a.sum(axis=1) - c))
        if dev > CONSISTENCY_TOL:
            violations.append(f"row sums of {name} deviate from abscissae by {dev:.3e}")

    for name, b in (("b^E", t.bE), ("b^I", t.bI)):
        total = b.sum()
        if abs(total - 1.0) > CONSISTENCY_TOL:
            violations.append(f"weight sum {name} = {total:.15g} != 1")

    return violations


def tableau_from_dict(doc: dict) -> IMEXTableau:
    """Build a tableau from a JSON-style document (arrays row-major)."""
    try:
        return IMEXTableau(
            id=str(doc["id"]),
            s=int(doc["s"]),
            order=int(doc["order"]),
            aE=np.array(doc["aE"], dtype=float),
            bE=np.array(doc["bE"], dtype=float),
            cE=np.array(doc["cE"], dtype=float),
            aI=np.array(doc["aI"], dtype=float),
            bI=np.array(doc["bI"], dtype=float),
            cI=np.array(doc["cI"], dtype=float),
        )
    except KeyError as exc:
        raise ValueError(f"tableau document missing field {exc}") from None


def load_tableau(path) -> IMEXTableau:
    """Load a user-supplied tableau from a JSON file and validate it."""
    with open(path) as fh:
        doc = json.load(fh)
    t = tableau_from_dict(doc)
    problems = validate(t)
    if problems:
        raise ValueError("invalid tableau: " + "; ".join(problems))
    return t


def _imex_rk1() -> IMEXTableau:
    # forward/backward Euler written as a two-stage additive scheme:
    # the single implicit solve realizes y1 = y0 + h*(FE(y0) + FI(y1)).
    return IMEXTableau(
        id="imex-rk1",
        s=2,
        order=1,
        aE=[[0.0, 0.0], [1.0, 0.0]],
        bE=[1.0, 0.0],
        cE=[0.0, 1.0],
        aI=[[0.0, 0.0], [0.0, 1.0]],
        bI=[0.0, 1.0],
        cI=[0.0, 1.0],
    )


def _imex_rk2() -> IMEXTableau:
    gamma = (2.0 - np.sqrt(2.0)) / 2.0
    delta = -2.0 * np.sqrt(2.0) / 3.0
    return IMEXTableau(
        id="imex-rk2",
        s=3,
        order=2,
        aE=[
            [0.0, 0.0, 0.0],
            [gamma, 0.0, 0.0],
            [delta, 1.0 - delta, 0.0],
        ],
        bE=[0.0, 1.0 - gamma, gamma],
        cE=[0.0, gamma, 1.0],
        aI=[
            [0.0, 0.0, 0.0],
            [0.0, gamma, 0.0],
            [0.0, 1.0 - gamma, gamma],
        ],
        bI=[0.0, 1.0 - gamma, gamma],
        cI=[0.0, gamma, 1.0],
    )


def _imex_rk3() -> IMEXTableau:
    b = [
        1471266399579.0 / 7840856788654.0,
        -4482444167858.0 / 7529755066697.0,
        11266239266428.0 / 11593286722821.0,
        1767732205903.0 / 4055673282236.0,
    ]
    c = [0.0, 1767732205903.0 / 2027836641118.0, 3.0 / 5.0, 1.0]
    gamma = 1767732205903.0 / 4055673282236.0
    aE = [
        [0.0, 0.0, 0.0, 0.0],
        [1767732205903.0 / 2027836641118.0, 0.0, 0.0, 0.0],
        [5535828885825.0 / 10492691773637.0, 788022342437.0 / 10882634858940.0, 0.0, 0.0],
        [
            6485989280629.0 / 16251701735622.0,
            -4246266847089.0 / 9704473918619.0,
            10755448449292.0 / 10357097424841.0,
            0.0,
        ],
    ]
    aI = [
        [0.0, 0.0, 0.0, 0.0],
        [gamma, gamma, 0.0, 0.0],
        [2746238789719.0 / 10658868560708.0, -640167445237.0 / 6845629431997.0, gamma, 0.0],
        [b[0], b[1], b[2], gamma],
    ]
    return IMEXTableau(id="imex-rk3", s=4, order=3, aE=aE, bE=b, cE=c, aI=aI, bI=b, cI=c)


def _imex_rk4() -> IMEXTableau:
    b = [
        82889.0 / 524892.0,
        0.0,
        15625.0 / 83664.0,
        69875.0 / 102672.0,
        -2260.0 / 8211.0,
        1.0 / 4.0,
    ]
    c = [0.0, 1.0 / 2.0, 83.0 / 250.0, 31.0 / 50.0, 17.0 / 20.0, 1.0]
    aE = [
        [0.0] * 6,
        [1.0 / 2.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [13861.0 / 62500.0, 6889.0 / 62500.0, 0.0, 0.0, 0.0, 0.0],
        [
            -116923316275.0 / 2393684061468.0,
            -2731218467317.0 / 15368042101831.0,
            9408046702089.0 / 11113171139209.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            -451086348788.0 / 2902428689909.0,
            -2682348792572.0 / 7519795681897.0,
            12662868775082.0 / 11960479115383.0,
            3355817975965.0 / 11060851509271.0,
            0.0,
            0.0,
        ],
        [
            647845179188.0 / 3216320057751.0,
            73281519250.0 / 8382639484533.0,
            552539513391.0 / 3454668386233.0,
            3354512671639.0 / 8306763924573.0,
            4040.0 / 17871.0,
            0.0,
        ],
    ]
    aI = [
        [0.0] * 6,
        [1.0 / 4.0, 1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
        [8611.0 / 62500.0, -1743.0 / 31250.0, 1.0 / 4.0, 0.0, 0.0, 0.0],
        [
            5012029.0 / 34652500.0,
            -654441.0 / 2922500.0,
            174375.0 / 388108.0,
            1.0 / 4.0,
            0.0,
            0.0,
        ],
        [
            15267082809.0 / 155376265600.0,
            -71443401.0 / 120774400.0,
            730878875.0 / 902184768.0,
            2285395.0 / 8070912.0,
            1.0 / 4.0,
            0.0,
        ],
        [b[0], b[1], b[2], b[3], b[4], b[5]],
    ]
    return IMEXTableau(id="imex-rk4", s=6, order=4, aE=aE, bE=b, cE=c, aI=aI, bI=b, cI=c)


_BUILTINS = {
    "imex-rk1": _imex_rk1,
    "imex-rk2": _imex_rk2,
    "imex-rk3": _imex_rk3,
    "imex-rk4": _imex_rk4,
}
