"""Second-order Trotter error against the commutator bound for both bases."""
import numpy as np

from phi4lat import dynamics
from phi4lat.amp_model import build_amp_hamiltonian
from phi4lat.core import AmplitudeCutoffs, LatticeParams, OccupationCutoffs
from phi4lat.occ_model import alpha_comm_occ, build_occ_hamiltonian


def report(label, frags, alpha, taus):
    fit = dynamics.trotter_error_scaling(frags, taus)
    print(f"{label}: slope={fit.slope:.3f} status={fit.status}")
    for tau, err in zip(fit.taus, fit.errors):
        print(f"  tau={tau:.4f} error={err:.3e} bound={alpha * tau ** 3:.3e}")


if __name__ == "__main__":
    p = LatticeParams(m=1.0, lam=1.0, P=2)
    cut = AmplitudeCutoffs(4)
    h = build_amp_hamiltonian(p, cut, dense=False)
    report("amplitude P=2 k=4", dynamics.amp_fragments(h), dynamics.alpha_comm_amp(p, cut),
           np.geomspace(0.005, 0.08, 6))
    oc = OccupationCutoffs(2, 2)
    frags = dynamics.occ_dense_fragments(build_occ_hamiltonian(p, oc), "merged")
    report("occupation P=2 N=2", frags, alpha_comm_occ(p, oc), np.geomspace(0.02, 0.32, 6))
