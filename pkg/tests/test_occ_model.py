import math
from fractions import Fraction

import numpy as np
import pytest

from phi4lat.core import LatticeParams, OccupationCutoffs, dispersion_table
from phi4lat.occ_model import (CutoffTooSmall, ZeroMass, alpha_comm_occ, build_occ_hamiltonian,
                               gate_counts_occ, map_ladder, occ_fragments)
from phi4lat.pauli import PauliSum, commutator_norm, restricted, to_dense
from phi4lat.verify import occupation_oracle


def dense(ps, n):
    return to_dense(PauliSum(dict(ps.items()), n), n)


def test_map_ladder_m1():
    ps = map_ladder(0, 1, 0, 1)
    assert ps.coeff(((0, "X"), (1, "X"))) == pytest.approx(0.5)
    assert ps.coeff(((0, "Y"), (1, "Y"))) == pytest.approx(0.5)
    assert len(ps) == 2


def test_map_ladder_m2():
    ps = map_ladder(0, 2, 0, 2)
    assert ps.coeff(((0, "X"), (2, "X"))) == pytest.approx(math.sqrt(2) / 2)
    assert len(ps) == 2


def test_map_ladder_m1_r1_drops_zero_term():
    ps = map_ladder(0, 1, 1, 2)
    assert ps.coeff(((1, "X"), (2, "X"))) == pytest.approx(math.sqrt(2) / 2)
    assert ps.coeff(((0, "X"), (1, "X"))) == 0
    with pytest.raises(CutoffTooSmall):
        map_ladder(0, 2, 0, 1)


def test_free_theory_has_empty_groups():
    params = LatticeParams(m=1, lam=0, P=2)
    h = build_occ_hamiltonian(params, OccupationCutoffs(2, 2))
    assert all(len(g) == 0 for g in h.groups)
    w = dispersion_table(params).omega
    got = np.linalg.eigvalsh(restricted(h.h0, "unary", 3, 2))
    want = sorted(a * w[0] + b * w[1] for a in range(3) for b in range(3))
    assert np.allclose(got, want)


@pytest.mark.parametrize("N,P", [(1, 1), (2, 1), (1, 2), (2, 2)])
def test_groups_match_ladder_oracle(N, P):
    params = LatticeParams(m=1, lam=1, P=P)
    cut = OccupationCutoffs(N, params.Omega)
    h = build_occ_hamiltonian(params, cut)
    ref = occupation_oracle(params, cut)
    for name in ("h0", "h1", "h2", "h3", "h4"):
        ps = PauliSum(dict(getattr(h, name).items()), cut.n_qubits)
        assert np.abs(restricted(ps, "unary", N + 1, params.Omega) - ref[name]).max() < 1e-12


def test_group_four_single_mode_formula():
    params = LatticeParams(m=1, lam=1, P=1)
    h = build_occ_hamiltonian(params, OccupationCutoffs(2, 1))
    a = np.diag(np.sqrt([1.0, 2.0]), 1)
    ad = a.T
    n = ad @ a
    mp = np.linalg.matrix_power
    want = (mp(ad, 4) + mp(a, 4) + 4 * (mp(ad, 2) @ n + n @ mp(a, 2)) + 6 * (n @ n - n)) / 96
    assert np.allclose(restricted(h.h4, "unary", 3, 1), want)


def test_groups_preserve_unary_code_space():
    params = LatticeParams(m=1, lam=1, P=2)
    cut = OccupationCutoffs(1, 2)
    h = build_occ_hamiltonian(params, cut)
    from phi4lat.pauli import unary_basis
    basis = unary_basis(2, 2)
    mask = np.zeros(2 ** 4, bool)
    mask[basis] = True
    for g in [h.h0] + h.groups:
        M = dense(g, 4)
        assert np.abs(M[np.ix_(~mask, mask)]).max(initial=0) < 1e-14


def test_gate_count_examples():
    g = gate_counts_occ(OccupationCutoffs(4, 4))["h1"]
    assert (g.crz, g.t, g.cnot, g.h) == (256, 3072, 8448, 512)
    g = gate_counts_occ(OccupationCutoffs(2, 2))["h3"]
    assert (g.crz, g.t, g.cnot, g.h) == (16, 64, 128, 24)
    g = gate_counts_occ(OccupationCutoffs(2, 3))["h4"]
    assert (g.rz, g.cnot, g.h) == (18, 24, 24)
    assert isinstance(g.rz, Fraction)


def test_alpha_comm_free_and_errors():
    assert alpha_comm_occ(LatticeParams(m=1, lam=0, P=2), OccupationCutoffs(2, 2)) == 0
    with pytest.raises(ZeroMass):
        alpha_comm_occ(LatticeParams(m=0, lam=1, P=2), OccupationCutoffs(2, 2))
    with pytest.raises(ValueError):
        alpha_comm_occ(LatticeParams(m=1, lam=1, P=2), OccupationCutoffs(2, 2), beta=2)


def test_alpha_comm_doubling_window():
    params = LatticeParams(m=1, lam=0.01, P=2)
    r = (alpha_comm_occ(params, OccupationCutoffs(128, 2))
         / alpha_comm_occ(params, OccupationCutoffs(64, 2)))
    assert abs(r / 2 ** 6 - 1) < 0.2


def test_alpha_comm_dominates_dense_commutators():
    params = LatticeParams(m=1, lam=1, P=2)
    cut = OccupationCutoffs(2, 2)
    h = build_occ_hamiltonian(params, cut)
    frags = occ_fragments(h, "groups")
    witness = sum(commutator_norm(a, b, "unary", 3, 2)
                  for i, a in enumerate(frags) for b in frags[i + 1:])
    assert alpha_comm_occ(params, cut) >= witness
