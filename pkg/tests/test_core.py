import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phi4lat.core import (AmplitudeCutoffs, ConfigError, LatticeParams, MissingKey,
                          NonPositiveSpacing, NonPowerOfTwoSites, OccupationCutoffs,
                          build_params, dispersion_table, omega, wrap_label)


def test_build_params_identity_rescaling():
    p = build_params({"m": 1, "lam": 0, "a": 1, "d": 1, "P": 4})
    assert (p.Omega, p.E_D, p.M, p.Lambda) == (4, 4, 1, 0)


def test_build_params_rescaling():
    p = build_params({"m": 0.5, "lam": 2, "a": 2, "d": 1, "P": 2})
    assert p.M == 1 and p.Lambda == 16 and p.Omega == 2


def test_build_params_edge_count():
    p = build_params({"m": 1, "lam": 1, "a": 1, "d": 2, "P": 3})
    assert p.Omega == 9 and p.E_D == 18


def test_build_params_aliases():
    p = build_params({"mass": 1, "lambda": 2, "spacing": 1, "dim": 1, "sites_per_dim": 2})
    assert p.lam == 2


def test_build_params_errors():
    with pytest.raises(MissingKey):
        build_params({"m": 1, "lam": 1, "a": 1, "d": 1})
    with pytest.raises(NonPositiveSpacing):
        build_params({"m": 1, "lam": 1, "a": 0, "d": 1, "P": 2})
    with pytest.raises(NonPowerOfTwoSites):
        build_params({"m": 1, "lam": 1, "a": 1, "d": 1, "P": 3}, amplitude=True)
    with pytest.raises(ConfigError):
        build_params({"m": 1, "lam": 1, "a": 1, "d": 0, "P": 2})


@given(st.floats(0.1, 5), st.floats(0, 10), st.floats(0.1, 3), st.integers(1, 3),
       st.integers(1, 6))
def test_rescaling_identities(m, lam, a, d, P):
    p = LatticeParams(m=m, lam=lam, a=a, d=d, P=P)
    assert p.M == pytest.approx(a * m)
    assert p.Lambda == pytest.approx(a ** (4 - d) * lam)
    assert p.E_D == d * P ** d


def test_omega_examples():
    assert omega(1.0, 0.0) == 1.0
    assert omega(3.0, 4.0) == 5.0


def test_dispersion_table_p4():
    disp = dispersion_table(LatticeParams(m=1, lam=0, P=4))
    labels = sorted(lab[0] for lab in disp.labels)
    assert labels == [-1, 0, 1, 2]
    for lab, w in zip(disp.labels, disp.omega):
        assert w == pytest.approx(math.sqrt(1 + (math.pi * lab[0] / 2) ** 2))
    assert disp.omega_min == pytest.approx(1.0)


def test_amplitude_grid():
    cut = AmplitudeCutoffs(4)
    assert cut.delta_phi == pytest.approx(math.sqrt(math.pi / 4))
    assert np.allclose(cut.grid / cut.delta_phi, np.arange(-3, 5))
    assert cut.dim == 8 and cut.qubits_per_site == 3


def test_cutoff_validation():
    with pytest.raises(ConfigError):
        AmplitudeCutoffs(1)
    with pytest.raises(ConfigError):
        OccupationCutoffs(0, 2)
    assert OccupationCutoffs(2, 3).n_qubits == 9


@given(st.integers(-50, 50), st.integers(1, 9))
def test_wrap_label_in_window(n, P):
    w = wrap_label(n, P)
    assert (w - n) % P == 0
