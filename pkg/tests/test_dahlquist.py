import numpy as np
import pytest

from parareal_lab import dahlquist
from parareal_lab.tableaux import builtin_tableau


def test_rk1_closed_form():
    """The two-stage Euler pair has the rational factor (1+iz2)/(1-iz1)."""
    t = builtin_tableau("rk1")
    rng = np.random.default_rng(1)
    for _ in range(50):
        z1, z2 = rng.uniform(-5, 5, size=2)
        got = dahlquist.rk_amp(t, z1, z2)
        want = (1.0 + 1j * z2) / (1.0 - 1j * z1)
        assert abs(got - want) < 1e-14


@pytest.mark.parametrize("mid", ["rk1", "rk2", "rk3", "rk4"])
def test_global_order(mid):
    """Error of n steps over a unit interval decays at the design order."""
    t = builtin_tableau(mid)
    lam1, lam2 = 1.0, 0.6
    exact = np.exp(1j * (lam1 + lam2))
    ns = [2**j for j in range(4, 10)]
    errs = [abs(dahlquist.rk_amp(t, lam1 / n, lam2 / n) ** n - exact) for n in ns]
    slope = np.polyfit(np.log([1.0 / n for n in ns]), np.log(errs), 1)[0]
    assert abs(slope - t.order) < 0.25


@pytest.mark.parametrize("mid", ["rk1", "rk2", "rk3", "rk4"])
def test_l_stable_implicit_damping(mid):
    """Large implicit arguments are strongly damped (L-stable halves)."""
    t = builtin_tableau(mid)
    assert abs(dahlquist.rk_amp(t, 1e6, 0.0)) < 1e-2


def test_broadcasting_matches_scalar():
    t = builtin_tableau("rk3")
    z1 = np.linspace(-2, 2, 7)
    z2 = np.linspace(-1, 1, 7)
    vec = dahlquist.rk_amp(t, z1, z2)
    assert vec.shape == (7,)
    for i in range(7):
        assert vec[i] == dahlquist.rk_amp(t, z1[i], z2[i])


def test_scalar_returns_python_complex():
    t = builtin_tableau("rk2")
    out = dahlquist.rk_amp(t, 0.3, -0.2)
    assert isinstance(out, complex)


def test_propagator_factors_scaling():
    """G covers the interval with Ng steps of size (Nf/Ng) in test units."""
    coarse, fine = builtin_tableau("rk3"), builtin_tableau("rk4")
    z1, z2 = 0.03, -0.01
    Nf, Ng = 8, 2
    f = dahlquist.propagator_factors(coarse, fine, Nf, Ng, z1, z2)
    assert f.F == dahlquist.rk_amp(fine, z1, z2) ** Nf
    ratio = Nf / Ng
    assert f.G == dahlquist.rk_amp(coarse, ratio * z1, ratio * z2) ** Ng
    assert (f.Nf, f.Ng) == (Nf, Ng)


def test_propagator_factors_rejects_bad_counts():
    coarse, fine = builtin_tableau("rk3"), builtin_tableau("rk4")
    with pytest.raises(ValueError):
        dahlquist.propagator_factors(coarse, fine, 0, 1, 0.1, 0.1)


def test_unit_modulus_on_exact_ray():
    """Consistency: amplification tends to the exact unit-modulus factor."""
    t = builtin_tableau("rk4")
    h = 1e-3
    got = dahlquist.rk_amp(t, h, h)
    assert abs(got - np.exp(2j * h)) < 1e-12
