import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phi4lat import budget
from phi4lat.budget import (InfeasibleDistance, InvalidRegime, OutOfRange, SurfaceModel,
                            ZeroAlphaComm, budget_qubitization, budget_trotter, total_cost)
from phi4lat.core import AmplitudeCutoffs, LatticeParams, OccupationCutoffs
from phi4lat.encoding import ConjectureFlagRequired
from phi4lat.lcu import l1_norm_hamp


def test_rz_synthesis_examples():
    assert budget.rz_synthesis_t(2 ** -10) == pytest.approx(29.410)
    assert budget.rz_synthesis_t(1e-6) == pytest.approx(59.85, abs=0.05)
    with pytest.warns(InvalidRegime):
        assert budget.rz_synthesis_t(2) == 0
    with pytest.raises(OutOfRange):
        budget.rz_synthesis_t(0)


def test_aqft_examples():
    assert budget.aqft_t(4, 1e-3) == pytest.approx(545, abs=0.5)
    # n = 3, eps = 1e-4 under the same formula
    a = math.log2(3e4)
    assert budget.aqft_t(3, 1e-4) == pytest.approx(24 * a + a * math.log2(a / 1e-4))
    with pytest.raises(OutOfRange):
        budget.aqft_t(0.5, 1e-3)


def test_aqft_single_qubit_second_term_dominates():
    n, eps = 1, 1e-12
    a = math.log2(n / eps)
    assert a * math.log2(a / eps) > 8 * n * a


def test_trotter_example_m13():
    b = budget_trotter(1.0, 1e-2, 10, 4)
    assert b.m == 13 and b.feasible()


def test_trotter_quarter_eps_grows_repetitions_eightfold():
    a = budget_trotter(3.0, 1e-2, 10, 4)
    b = budget_trotter(3.0, 0.25e-2, 10, 4)
    assert b.repetitions_bound / a.repetitions_bound == pytest.approx(8)
    assert b.repetitions == 8 * a.repetitions


def test_trotter_eps_r_formula():
    b = budget_trotter(1e4, 1e-2, 1e6, 0)
    tau = math.sqrt(1e-2 / (2 ** 1.5 * 1e4))
    assert b.epsilon_r == pytest.approx(math.sqrt(2) * 1e-2 * tau / (8 * 1e6))
    assert b.tau == pytest.approx(tau)


def test_trotter_aqft_variant_split():
    b = budget_trotter(2.0, 1e-3, 50, 8, "aqft")
    want = 2 ** -3.75 * 1e-3 ** 1.5 / (50 * math.sqrt(2.0))
    assert b.epsilon_r == pytest.approx(want)
    assert 2 ** b.m >= math.pi * 2 ** 0.75 * math.sqrt(2.0) / 1e-3 ** 1.5
    assert b.feasible()


def test_trotter_zero_alpha():
    with pytest.raises(ZeroAlphaComm):
        budget_trotter(0.0, 1e-2, 1, 1)


def test_qubitization_examples():
    assert budget_qubitization(100, 0.1, 24, 8).m == 12
    assert budget_qubitization(302.8, 0.01, 24, 8).m == 17
    assert budget_qubitization(1.0, math.pi / math.sqrt(2), 1, 1).m == 0


@given(st.floats(-1, 4), st.floats(-4, -1), st.integers(1, 10 ** 5), st.integers(0, 500))
def test_budgets_feasible(la, le, N_r, N_f):
    a, e = 10 ** la, 10 ** le
    assert budget_trotter(a, e, N_r, N_f).feasible()
    assert budget_trotter(a, e, N_r, N_f, "aqft").feasible()
    assert budget_qubitization(a, e, N_r, N_f).feasible()


def test_budget_infeasible_when_m_lowered():
    b = budget_qubitization(100, 0.1, 24, 8)
    b.m -= 2
    assert not b.feasible()


def test_occ_trotter_report_and_doubling():
    rep = total_cost("occ_trotter", LatticeParams(m=1, lam=1, P=2), OccupationCutoffs(2, 2), 0.1)
    assert math.isfinite(rep.total_t) and rep.total_t > 0
    assert rep.breakdown["aqft"] == 0
    p = LatticeParams(m=1, lam=0.01, P=2)
    r = (total_cost("occ_trotter", p, OccupationCutoffs(128, 2), 0.1).total_t_continuous
         / total_cost("occ_trotter", p, OccupationCutoffs(64, 2), 0.1).total_t_continuous)
    assert abs(r / 2 ** 7 - 1) < 0.2


def test_free_theory_qubitized_alpha():
    params, cut = LatticeParams(m=1, lam=0, P=4), AmplitudeCutoffs(16)
    rep = total_cost("I", params, cut, 1e-2)
    assert rep.alpha == pytest.approx(l1_norm_hamp(params, cut, "equal_weight"))
    eps = np.logspace(-5, -3, 4)
    vals = [total_cost("I", params, cut, e).total_t_continuous for e in eps]
    slope = np.polyfit(np.log(eps), np.log(vals), 1)[0]
    assert -1.1 < slope < -1.0


def test_ordering_at_large_lattice():
    params, cut = LatticeParams(m=1, lam=1, P=100), AmplitudeCutoffs(20)
    t1 = total_cost("I", params, cut, 1e-2).total_t
    t3 = total_cost("IIIa", params, cut, 1e-2).total_t
    assert t3 < t1  # frozen ranking of the implemented formulas


def test_iiib_requires_flag():
    with pytest.raises(ConjectureFlagRequired):
        total_cost("IIIb", LatticeParams(m=1, lam=1, P=4), AmplitudeCutoffs(16), 1e-2)


def test_cost_report_json():
    rep = total_cost("IIIa", LatticeParams(m=1, lam=1, P=4), AmplitudeCutoffs(16), 1e-2)
    assert '"schema_version": 1' in rep.to_json()
    assert rep.total_t == pytest.approx(sum(rep.breakdown.values()))


def test_surface_zero_t_no_factories():
    rep = total_cost("IIIa", LatticeParams(m=1, lam=1, P=4), AmplitudeCutoffs(16), 1e-2)
    rep.total_t = 0
    budget.surface_overlay(rep)
    o = rep.surface_overlay
    assert o["physical_qubits"] == rep.logical_qubits * 2 * o["code_distance"] ** 2
    assert o["wallclock_s"] == 0


def test_surface_distance_monotone_in_error_rate():
    rep = total_cost("IIIa", LatticeParams(m=1, lam=1, P=8), AmplitudeCutoffs(16), 1e-2)
    d = []
    for p in (1e-4, 2e-4, 4e-4, 8e-4):
        budget.surface_overlay(rep, SurfaceModel(p_phys=p))
        d.append(rep.surface_overlay["code_distance"])
    assert d == sorted(d)
    with pytest.raises(InfeasibleDistance):
        budget.surface_overlay(rep, SurfaceModel(p_phys=2e-2))


def test_table_csv_columns():
    rep = total_cost("I", LatticeParams(m=1, lam=1, P=4), AmplitudeCutoffs(16), 1e-2)
    head = budget.table_csv([rep], "x").splitlines()[0]
    assert "qubit_formula_value" in head and "t_formula_value" in head and "anchors" in head


def test_qsvt_queries():
    q = budget.qsvt_queries(10.0, 2.0, 1e-6)
    assert q > 20
    with pytest.raises(OutOfRange):
        budget.qsvt_queries(0, 1, 0.1)
