import math

import numpy as np
import pytest

from phi4lat import encoding
from phi4lat.amp_model import build_amp_hamiltonian
from phi4lat.core import AmplitudeCutoffs, LatticeParams, TooManyQubits
from phi4lat.encoding import (ConjectureFlagRequired, MissingDense, build_block_encoding,
                              build_walk, divide_and_conquer_compose, verify_block_identity)
from phi4lat.lcu import l1_norm_hamp


def test_prep_f_weights():
    amp = encoding.build_prep_f(LatticeParams(m=1, lam=24, P=1))
    assert np.allclose(amp, np.sqrt(np.array([0.5, 3, 1, 2]) / 6.5))
    assert encoding.build_prep_f(LatticeParams(m=1, lam=0, P=1))[2] == 0
    amp = encoding.build_prep_f(LatticeParams(m=0, lam=0, d=0, P=1))
    assert np.allclose(amp ** 2, np.array([0.5, 1, 0, 2]) / 3.5)


def test_alg1_family_counts():
    c = encoding.alg1_family_counts(4, 1, 4)
    assert (c["phiphi"], c["phi2"], c["phi4"]) == (92, 1244, 1400)


@pytest.mark.parametrize("alg", encoding.ALGORITHMS)
@pytest.mark.parametrize("P,lam", [(1, 0.0), (1, 1.0), (2, 0.0), (2, 1.0)])
def test_block_identity_and_walk(alg, P, lam):
    params = LatticeParams(m=1, lam=lam, P=P)
    cut = AmplitudeCutoffs(2)
    h = build_amp_hamiltonian(params, cut)
    be = build_block_encoding(alg, params, cut, dense=True, conjecture=True)
    assert verify_block_identity(be, h) < 1e-10
    assert build_walk(be, h).phase_mismatch < 1e-8


def test_walk_on_scaled_identity():
    be = encoding.dense_from_terms("id", [(2.0, np.eye(4))], 4)
    walk = build_walk(be, 2.0 * np.eye(4))
    phases = np.angle(np.linalg.eigvals(walk.dense))
    assert walk.phase_mismatch < 1e-12
    assert np.allclose(phases[np.abs(phases) < 1], 0)


def test_conjecture_flag_gate():
    params, cut = LatticeParams(m=1, lam=1, P=4), AmplitudeCutoffs(16)
    be = build_block_encoding("IIIb_signature", params, cut)
    with pytest.raises(ConjectureFlagRequired):
        be.require_totals()
    be = build_block_encoding("IIIb_signature", params, cut, conjecture=True)
    assert be.require_totals() > be.extra["n_plus_proven"]


def test_dense_guard_and_missing_dense():
    with pytest.raises(TooManyQubits):
        build_block_encoding("IIIa_z_lcu", LatticeParams(m=1, lam=1, P=8), AmplitudeCutoffs(4),
                             dense=True)
    be = build_block_encoding("IIIa_z_lcu", LatticeParams(m=1, lam=1, P=2), AmplitudeCutoffs(4))
    with pytest.raises(MissingDense):
        encoding.block_of(be)


def test_closed_form_alpha_is_costing_alpha():
    params, cut = LatticeParams(m=1, lam=1, P=4), AmplitudeCutoffs(4)
    be = build_block_encoding("I_equal_weight", params, cut)
    assert be.alpha == pytest.approx(l1_norm_hamp(params, cut, "equal_weight"))


def test_equal_weight_closed_form_bounds_exact():
    params, cut = LatticeParams(m=1, lam=1, P=2), AmplitudeCutoffs(4)
    exact = encoding.exact_alpha("I_equal_weight", params, cut)
    assert exact <= l1_norm_hamp(params, cut, "equal_weight")


def test_compose_two_identical_children():
    params, cut = LatticeParams(m=1, lam=1, P=1), AmplitudeCutoffs(2)
    child = build_block_encoding("IIIa_z_lcu", params, cut, dense=True)
    comp = divide_and_conquer_compose([child, child])
    assert comp.alpha == pytest.approx(2 * child.alpha)
    assert comp.extra["selector_qubits"] == 1
    assert comp.ancilla_qubits == 2 * child.ancilla_qubits + 1
    assert divide_and_conquer_compose([child]) is child


def test_compose_sum_of_two_hamiltonians():
    cut = AmplitudeCutoffs(2)
    pa, pb = LatticeParams(m=1, lam=0, P=2), LatticeParams(m=2, lam=1, P=2)
    kids = [build_block_encoding("IIIa_z_lcu", p, cut, dense=True) for p in (pa, pb)]
    comp = divide_and_conquer_compose(kids)
    H = build_amp_hamiltonian(pa, cut).dense + build_amp_hamiltonian(pb, cut).dense
    assert verify_block_identity(comp, H) < 1e-10


def test_selector_cost():
    params, cut = LatticeParams(m=1, lam=1, P=1), AmplitudeCutoffs(2)
    child = build_block_encoding("IIIa_z_lcu", params, cut)
    comp = divide_and_conquer_compose([child] * 4)
    assert comp.extra["selector_t"] == 2 * 4 * 4 * (2 - 1)


def test_tallies_positive_at_smallest_cutoff():
    t = encoding.alg3a_tallies(1, 1, 2)
    assert t["n_plus"] >= 0 and math.isfinite(t["n_plus"])
