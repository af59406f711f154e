import json

import numpy as np
import pytest

from parareal_lab import regions
from parareal_lab.dahlquist import propagator_factors, rk_amp
from parareal_lab.parareal_matrix import parareal_amp
from parareal_lab.tableaux import builtin_tableau


SPEC = regions.MethodPairSpec(coarse="rk3", fine="rk4", Np=8, Nf=4, Ng=1, K=2)
Z1 = np.linspace(0.0, 0.1, 9)
Z2 = np.linspace(-0.1, 0.1, 9)


def test_spec_normalizes_and_validates():
    assert SPEC.coarse == "imex-rk3" and SPEC.fine == "imex-rk4"
    assert SPEC.NT == 32
    with pytest.raises(ValueError, match="iteration count exceeds processors"):
        regions.MethodPairSpec(coarse="rk3", fine="rk4", Np=4, Nf=4, Ng=1, K=5)
    with pytest.raises(ValueError):
        regions.MethodPairSpec(coarse="rk3", fine="rk4", Np=0, Nf=4, Ng=1, K=0)


def test_classify_truth_table():
    abs_R = np.array([0.5, 2.0, 0.5, 2.0])
    norm_E = np.array([0.5, 0.5, 2.0, 2.0])
    got = regions.classify(abs_R, norm_E)
    assert list(got) == [
        regions.CONV_STABLE,
        regions.CONV_UNSTABLE,
        regions.NOCONV_STABLE,
        regions.NOCONV_UNSTABLE,
    ]
    # boundary membership: |R| = 1 is stable, ||E|| = 1 is not convergent
    edge = regions.classify(np.array([1.0]), np.array([1.0]))
    assert list(edge) == [regions.NOCONV_STABLE]


def test_scaled_amp_composition():
    """The grid semantics equal the explicit factor composition."""
    rng = np.random.default_rng(13)
    coarse, fine = SPEC.tableaus()
    for _ in range(20):
        z1, z2 = rng.uniform(-0.2, 0.2, size=2)
        want_factors = propagator_factors(coarse, fine, SPEC.Nf, SPEC.Ng, z1, z2)
        want = parareal_amp(want_factors, SPEC.Np, SPEC.K).R
        got = regions.scaled_parareal_amp(SPEC, z1, z2)
        assert got == want


def test_grid_values_match_pointwise():
    grid = regions.compute_grid(SPEC, Z1, Z2, threads=1)
    i, j = 3, 5
    R = regions.scaled_parareal_amp(SPEC, Z1[i], Z2[j])
    assert abs(grid.abs_R[i, j] - abs(R)) < 1e-14
    exact = np.exp(1j * SPEC.NT * (Z1[i] + Z2[j]))
    assert abs(grid.accuracy_err[i, j] - abs(R - exact)) < 1e-14


def test_grid_thread_determinism():
    serial = regions.compute_grid(SPEC, Z1, Z2, threads=1)
    threaded = regions.compute_grid(SPEC, Z1, Z2, threads=4)
    np.testing.assert_array_equal(serial.abs_R, threaded.abs_R)
    np.testing.assert_array_equal(serial.norm_E_inf, threaded.norm_E_inf)
    np.testing.assert_array_equal(serial.cls, threaded.cls)


def test_grid_rejects_empty_axes():
    with pytest.raises(ValueError):
        regions.compute_grid(SPEC, [], Z2)


def test_overflow_clamp():
    """Wildly unstable points are clamped to the finite sentinel."""
    spec = regions.MethodPairSpec(coarse="rk2", fine="rk4", Np=64, Nf=16, Ng=1, K=32)
    grid = regions.compute_grid(spec, [2.0], [2.0])
    assert np.all(np.isfinite(grid.abs_R))
    assert np.max(grid.abs_R) <= regions.OVERFLOW_CLAMP


def test_class_counts_total():
    grid = regions.compute_grid(SPEC, Z1, Z2)
    counts = grid.class_counts()
    assert sum(counts.values()) == Z1.size * Z2.size


def test_amplitude_grid_log_payload():
    t = builtin_tableau("rk2")
    grid = regions.imexrk_amplitude_grid(t, Z1, Z2)
    assert grid.NT == 1
    assert grid.log10_abs_R.shape == grid.abs_R.shape
    np.testing.assert_allclose(10.0**grid.log10_abs_R, grid.abs_R, rtol=1e-12)
    i, j = 2, 4
    assert abs(grid.abs_R[i, j] - abs(rk_amp(t, Z1[i], Z2[j]))) < 1e-14


def test_accuracy_grid_fine_only_reference():
    grid = regions.accuracy_grid(SPEC, Z1, Z2, for_fine_only=True)
    _, fine = SPEC.tableaus()
    i, j = 1, 7
    want = abs(
        rk_amp(fine, Z1[i], Z2[j]) ** SPEC.NT
        - np.exp(1j * SPEC.NT * (Z1[i] + Z2[j]))
    )
    assert abs(grid.accuracy_err[i, j] - want) < 1e-12


def test_csv_byte_determinism(tmp_path):
    grid = regions.compute_grid(SPEC, Z1, Z2)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    regions.write_grid_csv(grid, p1)
    regions.write_grid_csv(regions.compute_grid(SPEC, Z1, Z2, threads=3), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_csv_format_and_round_trip(tmp_path):
    grid = regions.compute_grid(SPEC, Z1, Z2)
    path = tmp_path / "grid.csv"
    regions.write_grid_csv(grid, path)
    lines = path.read_text().splitlines()
    assert lines[0] == regions.CSV_HEADER
    assert len(lines) == 1 + Z1.size * Z2.size
    # 17 significant digits reproduce the doubles exactly
    row = lines[1 + 3 * Z2.size + 5].split(",")
    assert float(row[0]) == Z1[3]
    assert float(row[2]) == grid.abs_R[3, 5]
    assert row[5] in regions.CLASS_TOKENS


def test_sidecar_contents(tmp_path):
    grid = regions.compute_grid(SPEC, Z1, Z2)
    path = tmp_path / "grid.json"
    regions.write_grid_sidecar(grid, path, spec=SPEC, speedup=3.2, efficiency=0.4)
    doc = json.loads(path.read_text())
    assert doc["spec"]["coarse"] == "imex-rk3"
    assert doc["NT"] == SPEC.NT
    assert doc["speedup"] == 3.2
    assert doc["axes"]["z1"] == [float(v) for v in Z1]


def test_env_thread_fallback(monkeypatch):
    monkeypatch.setenv("PARAREAL_LAB_THREADS", "2")
    assert regions._default_threads(None) == 2
    assert regions._default_threads(5) == 5
    monkeypatch.delenv("PARAREAL_LAB_THREADS")
    assert regions._default_threads(None) >= 1
