import pytest

from parareal_lab import cost
from parareal_lab.tableaux import builtin_tableau


REF = cost.CostModel(cf=5.0, cg=3.0, Ns=2048, Np=128, Nf=16, Ng=1, Nb=1, Kbar=3.0)


def test_reference_speedup():
    assert abs(cost.speedup(REF) - 16.18) < 0.01
    assert cost.efficiency(REF) < 1.0 / 3.0


def test_block_quantities():
    assert REF.CF == 80.0
    assert REF.CG == 3.0
    assert abs(REF.alpha - 3.0 / 80.0) < 1e-15
    assert cost.serial_cost(REF) == 2048 * 5.0
    assert cost.block_cost(REF, 3) == 128 * 3.0 + 3 * (80.0 + 3.0)


def test_speedup_equals_cost_ratio():
    """S coincides with serial cost over block cost for one block."""
    S = cost.speedup(REF)
    direct = cost.serial_cost(REF) / cost.block_cost(REF, 3)
    assert abs(S - direct) < 1e-12 * direct


def test_default_step_costs():
    cg, cf = cost.default_step_costs(builtin_tableau("rk3"), builtin_tableau("rk4"))
    assert (cg, cf) == (3.0, 5.0)


def test_inconsistent_step_counts_rejected():
    with pytest.raises(ValueError, match="inconsistent step counts"):
        cost.CostModel(cf=5, cg=3, Ns=100, Np=8, Nf=4, Ng=1, Nb=2, Kbar=1)


def test_nonpositive_costs_rejected():
    with pytest.raises(ValueError):
        cost.CostModel(cf=0.0, cg=3, Ns=32, Np=8, Nf=4, Ng=1, Nb=1, Kbar=1)
    with pytest.raises(ValueError):
        cost.CostModel(cf=5, cg=-1.0, Ns=32, Np=8, Nf=4, Ng=1, Nb=1, Kbar=1)


def test_kbar_bounds():
    with pytest.raises(ValueError):
        cost.CostModel(cf=5, cg=3, Ns=32, Np=8, Nf=4, Ng=1, Nb=1, Kbar=9)


def test_harmonic_identity():
    """Uniform per-block iteration counts reproduce the direct formula."""
    m = cost.CostModel(cf=5, cg=3, Ns=8192, Np=128, Nf=16, Ng=1, Nb=4, Kbar=3.0)
    direct = cost.speedup(m)
    harmonic = cost.speedup_from_blocks(m, [3, 3, 3, 3])
    assert abs(direct - harmonic) < 1e-12 * direct


def test_harmonic_mixed_counts():
    m = cost.CostModel(cf=5, cg=3, Ns=8192, Np=128, Nf=16, Ng=1, Nb=4, Kbar=2.5)
    mixed = cost.speedup_from_blocks(m, [2, 3, 2, 3])
    uniform_low = cost.speedup_from_blocks(m, [2, 2, 2, 2])
    uniform_high = cost.speedup_from_blocks(m, [3, 3, 3, 3])
    assert uniform_high < mixed < uniform_low


def test_harmonic_requires_count_per_block():
    m = cost.CostModel(cf=5, cg=3, Ns=8192, Np=128, Nf=16, Ng=1, Nb=4, Kbar=3.0)
    with pytest.raises(ValueError):
        cost.speedup_from_blocks(m, [3, 3])


def test_speedup_table_layout():
    rows = cost.speedup_table("rk3", "rk4", 128, 16, 1, 3, [4096, 8192, 16384])
    assert [r[0] for r in rows] == [4096, 8192, 16384]
    # with fixed K, S and E do not depend on Ns
    assert len({round(r[1], 12) for r in rows}) == 1
    assert abs(rows[0][1] - 16.18) < 0.01


def test_speedup_table_rejects_partial_blocks():
    with pytest.raises(ValueError, match="not a multiple"):
        cost.speedup_table("rk3", "rk4", 128, 16, 1, 3, [1000])


def test_speedup_table_cost_overrides():
    rows = cost.speedup_table("rk3", "rk4", 128, 16, 1, 0, [2048], cf=1.0, cg=1.0)
    # K = 0 leaves only the coarse predictor: S = CF/CG = Nf/Ng
    assert abs(rows[0][1] - 16.0) < 1e-12
