import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phi4lat.core import AmplitudeCutoffs, LatticeParams
from phi4lat.scattering import (BelowThreshold, ZeroMomentum, invert_energy_to_phase,
                                phase_uncertainty, rapidity, read_scatter_rows, reduce_branch,
                                scatter_csv, spectrum_phases)


def test_explicit_free_point():
    ph = invert_energy_to_phase(2 * math.sqrt(2), 2 * math.pi, 1, 1)
    assert ph.p == pytest.approx(1) and abs(ph.delta) < 1e-12


@given(st.floats(0.1, 3), st.floats(1, 50), st.integers(1, 8))
def test_free_energies_give_zero_phase(m, L, n):
    E = 2 * math.sqrt(m * m + (2 * math.pi * n / L) ** 2)
    ph = invert_energy_to_phase(E, L, m, n)
    assert abs(ph.delta) < 1e-6
    assert abs(ph.energy() - E) <= 1e-12 * E


@pytest.mark.parametrize("L", [3.0, 4.0, 5.0])
def test_volume_consistency_free(L):
    for n in (1, 2):
        E = 2 * math.sqrt(1 + (2 * math.pi * n / L) ** 2)
        assert abs(invert_energy_to_phase(E, L, 1.0).delta) < 1e-6


def test_branch_range():
    for x in np.linspace(-20, 20, 81):
        y = reduce_branch(x)
        assert -math.pi < y <= math.pi
    assert reduce_branch(-math.pi) == math.pi


def test_below_threshold():
    with pytest.raises(BelowThreshold):
        invert_energy_to_phase(2.0, 5.0, 1.0, 1)


def test_uncertainty_examples():
    assert phase_uncertainty(10, 3, 1, 0.01) == pytest.approx(-0.0375)
    assert phase_uncertainty(10, 3, 1, 0.0) == 0
    small = [abs(phase_uncertainty(10, 2.0, p, 0.01)) for p in (1e-1, 1e-2, 1e-3)]
    assert small[0] < small[1] < small[2]
    with pytest.raises(ZeroMomentum):
        phase_uncertainty(10, 2, 0, 0.01)


def test_rapidity_examples():
    assert rapidity(2.0, 1.0).theta == 0
    assert rapidity(2 * 1.5 * math.cosh(1), 1.5).theta == pytest.approx(1)
    with pytest.raises(BelowThreshold):
        rapidity(1.0, 1.0)


def test_rapidity_round_trip_from_dense_level():
    ph = spectrum_phases(LatticeParams(m=1, lam=1, P=2), AmplitudeCutoffs(4))[0]
    r = rapidity(ph.E, ph.m_phys)
    assert math.isfinite(r.theta)
    assert abs(r.energy() - ph.E) < 1e-12
    q, mq = r.momenta
    assert q == -mq


def test_dense_pipeline_finite():
    phases = spectrum_phases(LatticeParams(m=1, lam=1, P=2), AmplitudeCutoffs(4), dE=1e-3)
    assert phases
    for ph in phases:
        assert math.isfinite(ph.delta) and ph.delta_uncertainty < 0


def test_csv_round_trip():
    rows = [(2 * math.pi, 2 * math.sqrt(2), 0.01), (10.0, 3.0, 0.0)]
    text = scatter_csv(rows, 1.0, kink_mass=1.0)
    assert text.splitlines()[0] == "L,E,dE,n,p,delta,ddelta,theta"
    assert read_scatter_rows(text) == rows
