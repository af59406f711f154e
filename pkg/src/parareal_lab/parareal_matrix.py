"""Block matrices and norms of the Parareal error iteration.

Over one block with Np processors the Parareal update is a fixed point
iteration whose error is multiplied each sweep by
E = I - MG^{-1} MF, where MF and MG are (Np+1)x(Np+1) lower bidiagonal
matrices with unit diagonal and subdiagonals -F and -G.  E is strictly
lower triangular (hence nilpotent) and its infinity norm has the closed
form ((1 - |G|^Np) / (1 - |G|)) * |G - F|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dahlquist import PropagatorFactors

POWER_ITERATION_TOL = 1e-10


class PowerIterationStalledError(RuntimeError):
    """Raised when the dominant-singular-value iteration fails to settle."""


@dataclass(frozen=True)
class IterationMatrices:
    """Dense block matrices for one test point (scalar F, G only)."""

    Np: int
    MF: np.ndarray
    MG: np.ndarray
    E: np.ndarray


@dataclass(frozen=True)
class PararealAmplification:
    """Block stability function value after K corrections."""

    R: object
    K: int
    factors: PropagatorFactors


def _bidiag(value, n: int) -> np.ndarray:
    m = np.eye(n, dtype=complex)
    idx = np.arange(n - 1)
    m[idx + 1, idx] = value
    return m


def _mg_solve(G, rhs):
    """Forward substitution for the unit lower bidiagonal MG (subdiag -G).

    ``rhs`` has the block index on axis 0; trailing axes broadcast with G.
    """
    out = np.empty_like(rhs)
    out[0] = rhs[0]
    for i in range(1, rhs.shape[0]):
        out[i] = rhs[i] + G * out[i - 1]
    return out


def _apply_error_matrix(w, F, G):
    """Apply E = I - MG^{-1} MF to w along axis 0."""
    mf_w = np.empty_like(w)
    mf_w[0] = w[0]
    mf_w[1:] = w[1:] - F * w[:-1]
    return w - _mg_solve(G, mf_w)


def build_matrices(factors: PropagatorFactors, Np: int) -> IterationMatrices:
    """Dense MF, MG and E = I - MG^{-1} MF for scalar propagator factors.

    E is computed by forward substitution on the bidiagonal MG, never by
    general matrix inversion.
    """
    if Np < 1:
        raise ValueError("Np must be >= 1")
    F = complex(factors.F)
    G = complex(factors.G)
    n = Np + 1
    MF = _bidiag(-F, n)
    MG = _bidiag(-G, n)
    E = np.eye(n, dtype=complex) - _mg_solve(G, MF)
    return IterationMatrices(Np=Np, MF=MF, MG=MG, E=E)


def parareal_amp(factors: PropagatorFactors, Np: int, K: int) -> PararealAmplification:
    """Block stability function via K+1 accumulated bidiagonal solves.

    Evaluates c2 (sum_{j=0}^{K} E^j) MG^{-1} c1 with c1 = e_0 and
    c2 = e_Np, at cost O(K*Np).  Broadcasts over array-valued F and G.
    """
    if Np < 1:
        raise ValueError("Np must be >= 1")
    if not 0 <= K <= Np:
        raise ValueError("iteration count exceeds processors")
    F = np.asarray(factors.F, dtype=complex)
    G = np.asarray(factors.G, dtype=complex)
    shape = np.broadcast(F, G).shape

    # v = MG^{-1} c1 has entries G^i
    v = np.empty((Np + 1,) + shape, dtype=complex)
    v[0] = 1.0
    for i in range(1, Np + 1):
        v[i] = G * v[i - 1]

    acc = v.copy()
    w = v
    for _ in range(K):
        w = _apply_error_matrix(w, F, G)
        acc += w
    R = acc[-1]
    if R.ndim == 0:
        R = complex(R)
    return PararealAmplification(R=R, K=K, factors=factors)


def parareal_amp_recursive(factors: PropagatorFactors, Np: int, K: int):
    """Literal scalar Parareal recursion on the test problem.

    Serial coarse predictor y_n^0 = G^n, then K sweeps of
    y_{n+1}^{k+1} = F y_n^k + G y_n^{k+1} - G y_n^k; returns y_Np^K.
    """
    if Np < 1:
        raise ValueError("Np must be >= 1")
    if not 0 <= K <= Np:
        raise ValueError("iteration count exceeds processors")
    F = complex(factors.F)
    G = complex(factors.G)
    y = [G**n for n in range(Np + 1)]
    for _ in range(K):
        ynew = [y[0]]
        for n in range(Np):
            ynew.append(F * y[n] + G * ynew[n] - G * y[n])
        y = ynew
    return y[Np]


def e_norm_inf_closed(factors: PropagatorFactors, Np: int):
    """Exact infinity norm of E: ((1 - |G|^Np) / (1 - |G|)) * |G - F|.

    The removable singularity at |G| = 1 is evaluated as the geometric
    sum limit Np * |G - F|.  Broadcasts over array inputs.
    """
    if Np < 1:
        raise ValueError("Np must be >= 1")
    F = np.asarray(factors.F, dtype=complex)
    G = np.asarray(factors.G, dtype=complex)
    absG = np.abs(G)
    diff = np.abs(G - F)
    near_one = np.abs(1.0 - absG) < 1e-12
    safe = np.where(near_one, 0.5, absG)
    geom = (1.0 - safe**Np) / (1.0 - safe)
    out = np.where(near_one, Np * diff, geom * diff)
    if out.ndim == 0:
        return float(out)
    return out


def e_norm_two(m: IterationMatrices, tol: float = POWER_ITERATION_TOL) -> float:
    """Largest singular value of E by power iteration on E^H E.

    The estimate is the Rayleigh quotient ||E x||; the sweep cap is
    bounded below by 1000 because nearly degenerate leading singular
    values converge too slowly for a bare 10*(Np+1) budget.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    E = m.E
    n = E.shape[0]
    rng = np.random.default_rng(12345)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    sigma_prev = np.inf
    for _ in range(max(10 * (m.Np + 1), 10000)):
        y = E @ x
        sigma = np.linalg.norm(y)
        if sigma == 0.0:
            return 0.0
        if abs(sigma - sigma_prev) <= tol * max(sigma, 1e-300):
            return float(sigma)
        sigma_prev = sigma
        z = E.conj().T @ y
        x = z / np.linalg.norm(z)
    raise PowerIterationStalledError("power iteration stalled")


def appendix_lemma_oracle(gamma: complex, omega: complex, n: int) -> dict:
    """Numerically verify the bidiagonal Toeplitz identities for size n+1.

    Builds A(gamma) (unit diagonal, subdiagonal gamma), inverts it by
    forward substitution and checks the entrywise inverse formula, the
    product formula for A(omega) A^{-1}(gamma), and the closed-form
    infinity norm of I - A(omega) A^{-1}(gamma).  Returns the maximum
    deviation per identity.
    """
    if n < 1 or n > 64:
        raise ValueError("n must be in 1..64")
    size = n + 1
    A_gamma = _bidiag(gamma, size)
    A_omega = _bidiag(omega, size)

    # invert by forward substitution, column by column
    Ainv = np.zeros((size, size), dtype=complex)
    for j in range(size):
        col = np.zeros(size, dtype=complex)
        col[j] = 1.0
        for i in range(j + 1, size):
            col[i] = -gamma * col[i - 1]
        Ainv[:, j] = col

    i_idx, j_idx = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    lower = j_idx <= i_idx
    expected_inv = np.where(lower, (-gamma + 0j) ** np.maximum(i_idx - j_idx, 0), 0.0)
    inverse_dev = float(np.max(np.abs(Ainv - expected_inv)))

    P = A_omega @ Ainv
    strict = j_idx < i_idx
    expected_P = np.where(
        strict,
        (-gamma + 0j) ** np.maximum(i_idx - j_idx - 1, 0) * (omega - gamma),
        np.where(i_idx == j_idx, 1.0, 0.0),
    )
    product_dev = float(np.max(np.abs(P - expected_P)))

    M = np.eye(size) - P
    numeric_norm = float(np.max(np.sum(np.abs(M), axis=0)))
    ag = abs(gamma)
    if abs(1.0 - ag) < 1e-12:
        closed = n * abs(gamma - omega)
    else:
        closed = (1.0 - ag**n) / (1.0 - ag) * abs(gamma - omega)
    norm_dev = float(abs(numeric_norm - closed))

    return {
        "inverse_dev": inverse_dev,
        "product_dev": product_dev,
        "norm_dev": norm_dev,
    }
