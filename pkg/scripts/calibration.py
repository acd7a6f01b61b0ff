"""Headline cost estimate plus the epsilon slopes and the occupation N-doubling ratio."""
from phi4lat import budget, cli, verify
from phi4lat.core import AmplitudeCutoffs, LatticeParams, OccupationCutoffs

if __name__ == "__main__":
    raw = cli.DEFAULT_CONFIG
    params = LatticeParams(**raw["lattice"])
    cut = AmplitudeCutoffs(raw["cutoffs"]["k"])
    eps = raw["budget"]["epsilon"]
    for alg in ("I", "IIIa"):
        rep = budget.total_cost(alg, params, cut, eps)
        budget.surface_overlay(rep)
        o = rep.surface_overlay
        print(f"{alg:5s} total_t={rep.total_t:.3e} logical={rep.logical_qubits} "
              f"d={o['code_distance']} physical={o['physical_qubits']:.3e} "
              f"wallclock={o['wallclock_s']:.3e}s")

    for alg, (p, c) in verify.SLOPE_CASES.items():
        print(f"eps slope {alg}: {verify.epsilon_slope(alg, p, c, verify.SLOPE_EPS):.4f}")

    for lam in (0.01, 1.0):
        p = LatticeParams(m=1.0, lam=lam, P=2)
        t = [budget.total_cost("occ_trotter", p, OccupationCutoffs(N, 2), 0.1).total_t_continuous
             for N in (64, 128)]
        print(f"occupation N 64->128 at lam={lam}: ratio {t[1] / t[0]:.1f} (2^7 = 128)")
