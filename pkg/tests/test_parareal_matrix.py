import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parareal_lab import parareal_matrix as pm
from parareal_lab.dahlquist import PropagatorFactors


def _factors(F, G):
    return PropagatorFactors(F=F, G=G, Nf=1, Ng=1)


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


complex_box = st.builds(
    complex,
    st.floats(-1.5, 1.5, allow_nan=False),
    st.floats(-1.5, 1.5, allow_nan=False),
)


def _contractive_pair(rng, Np):
    """(F, G) with ||E||_inf <= 1, where cancellation cannot amplify."""
    absG = rng.uniform(0.05, 0.95)
    G = absG * np.exp(1j * rng.uniform(0, 2 * np.pi))
    radius = (1.0 - absG) / (1.0 - absG**Np) * (1.0 - 1e-9)
    F = G + radius * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    return F, G


def test_build_matrices_structure():
    m = pm.build_matrices(_factors(0.3 + 0.1j, 0.2 - 0.4j), 5)
    n = 6
    assert m.MF.shape == m.MG.shape == m.E.shape == (n, n)
    np.testing.assert_array_equal(np.diag(m.MF), np.ones(n))
    np.testing.assert_array_equal(np.diag(m.MG), np.ones(n))
    assert np.all(m.MF[np.arange(1, n), np.arange(n - 1)] == -(0.3 + 0.1j))
    # E is strictly lower triangular (nilpotent by construction)
    assert np.all(np.abs(np.triu(m.E)) < 1e-15)


def test_error_matrix_against_inverse_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        F = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        G = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        Np = int(rng.integers(1, 17))
        m = pm.build_matrices(_factors(F, G), Np)
        oracle = np.eye(Np + 1) - np.linalg.solve(m.MG, m.MF)
        np.testing.assert_allclose(m.E, oracle, atol=1e-12)


def test_nilpotency():
    rng = np.random.default_rng(4)
    for _ in range(20):
        Np = int(rng.integers(1, 33))
        F = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        G = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        m = pm.build_matrices(_factors(F, G), Np)
        power = np.linalg.matrix_power(m.E, Np + 1)
        scale = max(1.0, np.max(np.abs(m.E))) ** (Np + 1)
        assert np.max(np.abs(power)) <= 1e-10 * scale


@given(F=complex_box, G=complex_box, Np=st.integers(1, 24))
@settings(max_examples=60, deadline=None)
def test_degenerate_limits(F, G, Np):
    """K=0 is the coarse method, K=Np the exact fine method.

    The K=Np identity cancels intermediates of size max(|F|,|G|)^Np, so
    the roundoff floor is scaled by that magnitude.
    """
    f = _factors(F, G)
    assert _rel(pm.parareal_amp(f, Np, 0).R, G**Np) < 1e-12
    scale = (1.0 + max(abs(F), abs(G))) ** Np
    assert abs(pm.parareal_amp(f, Np, Np).R - F**Np) < 1e-12 * scale


def test_matrix_formula_against_dense_oracle():
    """Fast accumulation equals the dense c2 (sum E^j) MG^{-1} c1 product."""
    rng = np.random.default_rng(5)
    for _ in range(100):
        F = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        G = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        Np = int(rng.integers(1, 25))
        K = int(rng.integers(0, Np + 1))
        m = pm.build_matrices(_factors(F, G), Np)
        v = np.linalg.solve(m.MG, np.eye(Np + 1)[:, 0])
        acc = v.copy()
        w = v
        for _ in range(K):
            w = m.E @ w
            acc = acc + w
        dense = acc[-1]
        fast = pm.parareal_amp(_factors(F, G), Np, K).R
        # outside the contractive regime both evaluations cancel
        # intermediates of size up to ||E||^K, which conditions the
        # achievable agreement
        cond = max(1.0, pm.e_norm_inf_closed(_factors(F, G), Np)) ** min(K, Np)
        assert abs(fast - dense) < 1e-13 * max(1.0, abs(dense)) * cond


def test_matrix_equals_recursion_in_contractive_regime():
    rng = np.random.default_rng(6)
    for _ in range(300):
        Np = int(rng.integers(1, 65))
        F, G = _contractive_pair(rng, Np)
        K = int(rng.integers(0, Np + 1))
        f = _factors(F, G)
        fast = pm.parareal_amp(f, Np, K).R
        literal = pm.parareal_amp_recursive(f, Np, K)
        assert _rel(fast, literal) < 1e-12


def test_amp_broadcasts_over_arrays():
    rng = np.random.default_rng(7)
    F = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    G = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    Np, K = 6, 3
    vec = pm.parareal_amp(PropagatorFactors(F=F, G=G, Nf=1, Ng=1), Np, K).R
    assert vec.shape == (9,)
    for i in range(9):
        scalar = pm.parareal_amp(_factors(F[i], G[i]), Np, K).R
        assert vec[i] == scalar


def test_iteration_count_bounds():
    f = _factors(0.5, 0.4)
    with pytest.raises(ValueError, match="iteration count exceeds processors"):
        pm.parareal_amp(f, 4, 5)
    with pytest.raises(ValueError):
        pm.parareal_amp(f, 4, -1)
    with pytest.raises(ValueError):
        pm.parareal_amp_recursive(f, 4, 5)
    with pytest.raises(ValueError):
        pm.build_matrices(f, 0)


def test_inf_norm_closed_form_against_column_sums():
    rng = np.random.default_rng(8)
    for _ in range(200):
        absG = rng.uniform(0.01, 1.49)
        G = absG * np.exp(1j * rng.uniform(0, 2 * np.pi))
        F = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        Np = int(rng.integers(1, 65))
        m = pm.build_matrices(_factors(F, G), Np)
        brute = float(np.max(np.sum(np.abs(m.E), axis=1)))
        closed = pm.e_norm_inf_closed(_factors(F, G), Np)
        assert abs(brute - closed) <= 1e-12 * max(1.0, brute)


def test_inf_norm_unit_modulus_limit():
    """|G| = 1 evaluates the removable singularity as Np * |G - F|."""
    G = np.exp(0.7j)
    F = 0.4 + 0.2j
    for Np in (1, 5, 32):
        got = pm.e_norm_inf_closed(_factors(F, G), Np)
        assert abs(got - Np * abs(G - F)) < 1e-12 * Np
        # the brute-force column sum agrees at the singular point too
        m = pm.build_matrices(_factors(F, G), Np)
        brute = float(np.max(np.sum(np.abs(m.E), axis=1)))
        assert abs(got - brute) < 1e-10 * max(1.0, brute)


def test_inf_norm_broadcasts():
    G = np.array([0.5, 0.9, 1.2]) * np.exp(0.3j)
    F = np.array([0.1, 0.2, 0.3]) + 0j
    out = pm.e_norm_inf_closed(PropagatorFactors(F=F, G=G, Nf=1, Ng=1), 8)
    assert out.shape == (3,)
    for i in range(3):
        scalar = pm.e_norm_inf_closed(_factors(complex(F[i]), complex(G[i])), 8)
        assert abs(out[i] - scalar) < 1e-14


def test_contraction_bound():
    rng = np.random.default_rng(9)
    for _ in range(100):
        F = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        G = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        Np = int(rng.integers(1, 33))
        f = _factors(F, G)
        m = pm.build_matrices(f, Np)
        e = rng.standard_normal(Np + 1) + 1j * rng.standard_normal(Np + 1)
        lhs = np.max(np.abs(m.E @ e))
        rhs = pm.e_norm_inf_closed(f, Np) * np.max(np.abs(e))
        assert lhs <= rhs * (1.0 + 1e-12)


def test_two_norm_against_svd():
    rng = np.random.default_rng(10)
    for _ in range(100):
        F = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        G = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        Np = int(rng.integers(1, 17))
        m = pm.build_matrices(_factors(F, G), Np)
        svd = np.linalg.svd(m.E, compute_uv=False)[0]
        est = pm.e_norm_two(m)
        assert abs(est - svd) <= 1e-8 * max(1.0, svd)


def test_two_norm_zero_matrix():
    m = pm.build_matrices(_factors(0.5 + 0.5j, 0.5 + 0.5j), 4)
    assert pm.e_norm_two(m) == 0.0


def test_two_norm_rejects_bad_tol():
    m = pm.build_matrices(_factors(0.4, 0.3), 4)
    with pytest.raises(ValueError):
        pm.e_norm_two(m, tol=0.0)


def test_appendix_lemma_oracle():
    rng = np.random.default_rng(11)
    for _ in range(100):
        gamma = rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        omega = rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        n = int(rng.integers(1, 65))
        devs = pm.appendix_lemma_oracle(gamma, omega, n)
        assert max(devs.values()) < 1e-12


def test_appendix_oracle_bounds():
    with pytest.raises(ValueError):
        pm.appendix_lemma_oracle(0.1, 0.2, 0)
    with pytest.raises(ValueError):
        pm.appendix_lemma_oracle(0.1, 0.2, 65)


def test_bidiagonal_commutation():
    """Lower bidiagonal Toeplitz matrices commute, so both norm orders agree."""
    rng = np.random.default_rng(12)
    for _ in range(20):
        n = int(rng.integers(1, 33))
        gamma = rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        omega = rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        A_g = pm._bidiag(gamma, n + 1)
        A_o = pm._bidiag(omega, n + 1)
        left = np.eye(n + 1) - A_o @ np.linalg.inv(A_g)
        right = np.eye(n + 1) - np.linalg.inv(A_g) @ A_o
        norm = lambda M: np.max(np.sum(np.abs(M), axis=1))
        assert abs(norm(left) - norm(right)) < 1e-12
