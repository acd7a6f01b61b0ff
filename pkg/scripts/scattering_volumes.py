"""Phases from dense even-sector levels at several box sizes.

At k = 4 the lattice dispersion and field truncation dominate, so the
non-interacting row is the baseline bias rather than zero.
"""
from phi4lat import scattering
from phi4lat.core import AmplitudeCutoffs, LatticeParams

if __name__ == "__main__":
    for lam in (0.0, 1.0):
        print(f"lam={lam}")
        for P in (1, 2, 3):
            params = LatticeParams(m=1.0, lam=lam, P=P)
            ph = scattering.spectrum_phases(params, AmplitudeCutoffs(4), dE=1e-3)[0]
            print(f"  L={P} m={ph.m_phys:.4f} E={ph.E:.4f} n={ph.n} p={ph.p:.4f} "
                  f"delta={ph.delta:+.4f} +/- {abs(ph.delta_uncertainty):.4f}")
