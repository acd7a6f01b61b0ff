"""Dense-oracle verification suites shared by the command line and the test-suite.

Each suite returns a ``SuiteResult``.  ``inject`` names suites whose key
quantity is perturbed before comparison, which must make them fail.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import arith, budget, dynamics, encoding, lcu, scattering
from .amp_model import build_amp_hamiltonian
from .core import AmplitudeCutoffs, LatticeParams, OccupationCutoffs, dispersion_table
from .occ_model import build_occ_hamiltonian
from .pauli import PauliSum, restricted, to_dense, unary_basis

PERTURBATION = 1e-3


@dataclass
class SuiteResult:
    name: str
    passed: bool
    seconds: float = 0.0
    details: dict = field(default_factory=dict)
    error: str | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "seconds": round(self.seconds, 3),
                "details": self.details, "error": self.error}


class _Ctx:
    def __init__(self, name: str, inject):
        self.shift = PERTURBATION if name in inject else 0.0


# ----------------------------------------------------------------- suites

def suite_lcu(ctx) -> dict:
    """Integer reconstruction of field powers by every family, z-binary norms."""
    bad = []
    for k in (2, 4, 8, 16):
        for power in (1, 2, 4):
            target = lcu.target_diagonal(k, power)
            ew = lcu.equal_weight_reconstruct(k, power)
            if not np.array_equal(ew, 2 * target):
                bad.append(("equal_weight", k, power))
            zb = lcu.lcu_z_binary(k, power)
            rec = zb.reconstruct()
            rec[0] += ctx.shift
            if any(r != t for r, t in zip(rec, target)):
                bad.append(("z_binary", k, power))
            if zb.l1 != k ** power:
                bad.append(("z_binary_l1", k, power))
            if power != 1:
                sg = lcu.lcu_signature(k, power).reconstruct()
                if any(r != t for r, t in zip(sg, target)):
                    bad.append(("signature", k, power))
        for i in range(0, 2 * k, max(1, k // 2)):
            ew = lcu.lcu_equal_weight(k, 1)
            if not np.array_equal(ew.terms[i][1].diagonal(), lcu.threshold_matrix(k, i)):
                bad.append(("threshold", k, i))
    return {"ok": not bad, "failures": bad}


def suite_block_encoding(ctx) -> dict:
    worst_res = worst_walk = 0.0
    for P in (1, 2):
        for lam in (0.0, 1.0):
            params = LatticeParams(m=1.0, lam=lam, P=P)
            cut = AmplitudeCutoffs(2)
            h = build_amp_hamiltonian(params, cut)
            for alg in ("I_equal_weight", "IIIa_z_lcu"):
                be = encoding.build_block_encoding(alg, params, cut, dense=True)
                worst_res = max(worst_res, encoding.verify_block_identity(be, h) + ctx.shift)
                walk = encoding.build_walk(be, h)
                worst_walk = max(worst_walk, walk.phase_mismatch)
    return {"ok": worst_res < 1e-10 and worst_walk < 1e-8,
            "residual": worst_res, "walk_mismatch": worst_walk}


def _check_adder(n, shift):
    ir, cnt = arith.adder(n)
    x, y = np.meshgrid(np.arange(2 ** n), np.arange(2 ** n), indexing="ij")
    x, y = x.ravel(), y.ravel()
    a, b, _ = arith._registers(n)
    s, _ = arith.simulate(ir, arith.pack([a, b], [x, y]))
    ok = np.array_equal(arith.unpack(s, a), (x + y + int(shift > 0)) % 2 ** n)
    ok &= np.array_equal(arith.unpack(s, b), y)
    return ok and ir.resource_count().t == cnt.t


def suite_arith(ctx) -> dict:
    bad = []
    for n in range(1, 7):
        if not _check_adder(n, ctx.shift):
            bad.append(("adder", n))
    for n in range(1, 6):
        ir, cnt = arith.subtractor(n)
        a, b, _ = arith._registers(n)
        x, y = [v.ravel() for v in np.meshgrid(np.arange(2 ** n), np.arange(2 ** n), indexing="ij")]
        s, _ = arith.simulate(ir, arith.pack([a, b], [x, y]))
        if not np.array_equal(arith.unpack(s, a), (x - y) % 2 ** n):
            bad.append(("subtractor", n))
        for variant in ("CMP_prime", "CMP"):
            ir, _ = arith.comparator(n, variant)
            s, _ = arith.simulate(ir, arith.pack([a, b], [x, y]), check_ancillas=variant == "CMP")
            flag = arith._bit(s, 3 * n - 1 if variant == "CMP_prime" else 3 * n)
            if not np.array_equal(flag, (y < x).astype(np.int64)):
                bad.append((variant, n))
        ir, cnt = arith.multiplier(n)
        lay = arith.multiplier_layout(n)
        s, _ = arith.simulate(ir, arith.pack([lay["a"], lay["b"]], [x, y]))
        if not np.array_equal(arith.unpack(s, lay["acc"]), x * y):
            bad.append(("multiplier", n))
        if ir.resource_count().t != cnt.t:
            bad.append(("multiplier_t", n))
    for n in range(2, 6):
        ir, _ = arith.incrementer(n)
        x = np.arange(2 ** n)
        s, _ = arith.simulate(ir, x)
        if not np.array_equal(arith.unpack(s, list(range(n))), (x + 1) % 2 ** n):
            bad.append(("incrementer", n))
    cited = {"adder4_T": arith.adder_counts(4).t, "adder4_CNOT": arith.adder_counts(4).cnot,
             "cmp5_T": arith.comparator(5)[1].t, "mult3_T": arith.multiplier(3)[1].t}
    want = {"adder4_T": 16, "adder4_CNOT": 45, "cmp5_T": 20, "mult3_T": 68}
    if cited != want:
        bad.append(("counts", cited))
    return {"ok": not bad, "failures": bad, "counts": cited}


def suite_comparator_lcu(ctx) -> dict:
    bad = []
    for k in (2, 4, 8):
        n = int(math.log2(2 * k))
        ir = arith.cmp_prime_phase(n)
        i_reg, j_reg, _ = arith._registers(n)
        b = np.arange(2 * k)
        for i in range(2 * k):
            s, sign = arith.simulate(ir, arith.pack([i_reg, j_reg], [np.full_like(b, i), b]))
            sign = sign + (ctx.shift > 0)
            if not np.array_equal(sign, lcu.threshold_matrix(k, i)):
                bad.append((k, i))
            if not np.array_equal(s, arith.pack([i_reg, j_reg], [np.full_like(b, i), b])):
                bad.append((k, i, "state"))
    return {"ok": not bad, "failures": bad}


def _fock_ops(N: int, n_modes: int):
    lower = np.diag(np.sqrt(np.arange(1, N + 1)), 1)
    eye = np.eye(N + 1)

    def on(op, r):
        mats = [op if q == r else eye for q in range(n_modes)]
        out = np.array([[1.0]])
        for m in reversed(mats):  # register 0 is least significant
            out = np.kron(out, m)
        return out
    return lower, on


def occupation_oracle(params: LatticeParams, cut: OccupationCutoffs) -> dict:
    """Groups built from truncated ladder matrices, in the unary-subspace ordering."""
    N, n = cut.N, cut.mode_count
    disp = dispersion_table(params)
    lower, on = _fock_ops(N, n)
    raise_ = lower.T

    def normal(c):
        return sum(comb(c, j) * np.linalg.matrix_power(raise_, j)
                   @ np.linalg.matrix_power(lower, c - j) for j in range(c + 1))

    g0 = params.Lambda / (24 * params.Omega)
    dim = (N + 1) ** n
    groups = {g: np.zeros((dim, dim)) for g in (1, 2, 3, 4)}
    pattern = {(1, 1, 1, 1): 1, (2, 1, 1): 2, (2, 2): 3, (4,): 4}
    labels = np.array(disp.labels)
    for tup in itertools.product(range(n), repeat=4):
        if np.any((labels[tup[0]] + labels[tup[1]] - labels[tup[2]] - labels[tup[3]]) % params.P):
            continue
        coeff = g0 / math.sqrt(np.prod([2 * disp.omega[r] for r in tup]))
        mult = {r: tup.count(r) for r in set(tup)}
        op = np.eye(dim)
        for r, c in mult.items():
            op = op @ on(normal(c), r)
        groups[pattern[tuple(sorted(mult.values(), reverse=True))]] += coeff * op
    h0 = sum(disp.omega[r] * on(raise_ @ lower, r) for r in range(n))
    # reorder Fock states into the sorted unary basis
    basis = unary_basis(n, N + 1)
    fock = np.zeros(len(basis), dtype=np.int64)
    for r in range(n):
        reg = (basis >> (r * (N + 1))) & ((1 << (N + 1)) - 1)
        fock += np.log2(reg).astype(np.int64) * (N + 1) ** r
    sel = np.ix_(fock, fock)
    out = {f"h{g}": groups[g][sel] for g in (1, 2, 3, 4)}
    out["h0"] = h0[sel]
    return out


def suite_occupation(ctx) -> dict:
    worst = 0.0
    spec_ok = True
    for N in (1, 2):
        for P in (1, 2):
            params = LatticeParams(m=1.0, lam=1.0, P=P)
            cut = OccupationCutoffs(N, params.Omega)
            h = build_occ_hamiltonian(params, cut)
            ref = occupation_oracle(params, cut)
            for name in ("h0", "h1", "h2", "h3", "h4"):
                ps = getattr(h, name)
                ps = PauliSum(dict(ps.items()), cut.n_qubits)
                mat = restricted(ps, "unary", cut.register_width, cut.mode_count)
                worst = max(worst, float(np.abs(mat - ref[name]).max()) + ctx.shift)
            w = dispersion_table(params).omega
            want = sorted(sum(nv * wv for nv, wv in zip(occ, w))
                          for occ in itertools.product(range(N + 1), repeat=len(w)))
            got = np.linalg.eigvalsh(restricted(PauliSum(dict(h.h0.items()), cut.n_qubits),
                                                "unary", cut.register_width, cut.mode_count))
            spec_ok &= bool(np.allclose(got, want, atol=1e-12, rtol=0))
    return {"ok": worst < 1e-12 and spec_ok, "max_abs_diff": worst, "h0_spectrum": spec_ok}


AMP_TROTTER_CASE = {"m": 1.0, "lam": 1.0, "P": 2, "k": 4,
                    "taus": [0.005, 0.01, 0.02, 0.04, 0.08]}
OCC_TROTTER_CASE = {"m": 1.0, "lam": 1.0, "P": 2, "N": 2,
                    "taus": [0.02, 0.04, 0.08, 0.16, 0.32]}


def suite_trotter(ctx) -> dict:
    out = {}
    c = AMP_TROTTER_CASE
    params = LatticeParams(m=c["m"], lam=c["lam"], P=c["P"])
    cut = AmplitudeCutoffs(c["k"])
    frags = dynamics.amp_fragments(build_amp_hamiltonian(params, cut, dense=False))
    fit = dynamics.trotter_error_scaling(frags, c["taus"])
    a = dynamics.alpha_comm_amp(params, cut)
    out["amp"] = (fit.slope + ctx.shift * 1e3, float(np.max(fit.errors / (a * fit.taus ** 3))))
    c = OCC_TROTTER_CASE
    params = LatticeParams(m=c["m"], lam=c["lam"], P=c["P"])
    cut = OccupationCutoffs(c["N"], params.Omega)
    from .occ_model import alpha_comm_occ
    frags = dynamics.occ_dense_fragments(build_occ_hamiltonian(params, cut), "merged")
    fit = dynamics.trotter_error_scaling(frags, c["taus"])
    a = alpha_comm_occ(params, cut)
    out["occ"] = (fit.slope, float(np.max(fit.errors / (a * fit.taus ** 3))))
    ok = all(2.8 <= s <= 3.2 and r <= 1 for s, r in out.values())
    return {"ok": ok, "slope_and_ratio": out}


def epsilon_slope(algorithm: str, params, cut, eps_grid) -> float:
    vals = [budget.total_cost(algorithm, params, cut, e, conjecture=True).total_t_continuous
            for e in eps_grid]
    return float(np.polyfit(np.log(eps_grid), np.log(vals), 1)[0])


SLOPE_CASES = {
    "I": (LatticeParams(m=1.0, lam=1.0, P=10), AmplitudeCutoffs(16)),
    "II": (LatticeParams(m=1.0, lam=1.0, P=10), AmplitudeCutoffs(16)),
    "occ_trotter": (LatticeParams(m=1.0, lam=1.0, P=4), OccupationCutoffs(8, 4)),
}
SLOPE_EPS = np.logspace(-6, -4, 5)
# gated rows; II is reported only (its cost is all synthesized rotations, so the
# log(1/eps) synthesis factor steepens the fit beyond the tolerance)
SLOPE_GATED = {"I": -1.0, "occ_trotter": -1.5}


def suite_budget(ctx) -> dict:
    rng = np.random.default_rng(20240607)
    infeasible = 0
    for _ in range(20):
        a = 10 ** rng.uniform(-1, 4)
        eps = 10 ** rng.uniform(-4, -1)
        N_r, N_f = int(rng.integers(1, 10 ** 4)), int(rng.integers(0, 200))
        for b in (budget.budget_trotter(a, eps, N_r, N_f),
                  budget.budget_trotter(a, eps, N_r, N_f, "aqft"),
                  budget.budget_qubitization(a, eps, N_r, N_f)):
            b.m -= int(ctx.shift > 0) * 3
            infeasible += not b.feasible()
    slopes = {alg: epsilon_slope(alg, p, c, SLOPE_EPS) for alg, (p, c) in SLOPE_CASES.items()}
    ok = infeasible == 0 and all(abs(slopes[a] - w) <= 0.05 for a, w in SLOPE_GATED.items())
    return {"ok": ok, "infeasible": infeasible, "slopes": slopes,
            "gated": "+".join(sorted(SLOPE_GATED))}


CENSUS_EXPECTED = {(2, 1): 64, (2, 2): 0, (2, 14): 37, (2, 15): 1, (4, 8): 32, (4, 28): 20}


def suite_census(ctx) -> dict:
    got = {(p, b): len(lcu.bit_pattern_census(p, 127, b)) for p, b in CENSUS_EXPECTED}
    if ctx.shift:
        got[(2, 14)] += 1
    iff = lcu.binpattern_holds(2, 4096) and lcu.binpattern_holds(4, 4096)
    return {"ok": got == CENSUS_EXPECTED and iff,
            "counts": {f"p{p}_b{b}": v for (p, b), v in got.items()}, "iff": iff}


def suite_harmonic(ctx) -> dict:
    params = LatticeParams(m=1.0, lam=0.0, P=1)
    ev = np.linalg.eigvalsh(build_amp_hamiltonian(params, AmplitudeCutoffs(8)).dense)
    ratio = float((ev[2] - ev[1]) / (ev[1] - ev[0])) + ctx.shift * 100
    return {"ok": 0.95 <= ratio <= 1.05, "ratio": ratio}


def suite_scattering(ctx) -> dict:
    rng = np.random.default_rng(7)
    worst_delta = 0.0
    for _ in range(50):
        m, L, n = rng.uniform(0.2, 2), rng.uniform(2, 40), int(rng.integers(1, 6))
        E = 2 * math.sqrt(m * m + (2 * math.pi * n / L) ** 2)
        ph = scattering.invert_energy_to_phase(E, L, m, n)
        worst_delta = max(worst_delta, abs(ph.delta), abs(ph.energy() - E) / E)
    worst_unc = 0.0
    for _ in range(100):
        L, p, dE = rng.uniform(1, 50), rng.uniform(0.05, 3), rng.uniform(-0.1, 0.1)
        E = 2 * math.sqrt(1 + p * p)
        got = scattering.phase_uncertainty(L, E, p, dE)
        worst_unc = max(worst_unc, abs(got - (-L * E / (8 * p) * dE)))
    phases = scattering.spectrum_phases(LatticeParams(m=1.0, lam=1.0, P=2), AmplitudeCutoffs(4),
                                        dE=1e-3)
    finite = bool(phases) and all(math.isfinite(x.delta) and math.isfinite(x.delta_uncertainty)
                                  for x in phases)
    worst_delta += ctx.shift
    return {"ok": worst_delta < 1e-6 and worst_unc < 1e-15 and finite,
            "max_free_delta": worst_delta, "max_uncertainty_err": worst_unc,
            "pipeline_levels": len(phases)}


def suite_pauli(ctx) -> dict:
    rng = np.random.default_rng(3)
    worst = 0.0
    letters = "IXYZ"
    for _ in range(20):
        def rand_sum():
            terms = {}
            for _ in range(4):
                key = tuple((q, letters[int(rng.integers(1, 4))])
                            for q in range(3) if rng.random() < 0.6)
                terms[key] = terms.get(key, 0) + complex(rng.normal(), rng.normal())
            return PauliSum(terms, 3)
        a, b = rand_sum(), rand_sum()
        worst = max(worst, float(np.abs(to_dense(a * b, 3) - to_dense(a, 3) @ to_dense(b, 3)).max()))
    worst += ctx.shift
    return {"ok": worst < 1e-12, "max_abs_diff": worst}


def suite_compose(ctx) -> dict:
    params = LatticeParams(m=1.0, lam=1.0, P=1)
    cut = AmplitudeCutoffs(2)
    kids = [encoding.build_block_encoding(a, params, cut, dense=True)
            for a in ("I_equal_weight", "IIIa_z_lcu")]
    comp = encoding.divide_and_conquer_compose(kids, [0.25, 0.75])
    H = build_amp_hamiltonian(params, cut).dense
    res = encoding.verify_block_identity(comp, H) + ctx.shift
    return {"ok": res < 1e-10, "residual": res}


def suite_sector(ctx) -> dict:
    """Harmonic single-site check: the odd gap is one quantum, the even gap two."""
    params = LatticeParams(m=1.0, lam=0.0, P=1)
    res = dynamics.sector_spectrum(build_amp_hamiltonian(params, AmplitudeCutoffs(8)))
    odd = res.odd_gap + ctx.shift
    return {"ok": abs(odd - 1) < 1e-3 and abs(res.even_gap - 2) < 1e-3,
            "odd_gap": odd, "even_gap": res.even_gap}


SUITES = {
    "lcu_reconstruction": suite_lcu,
    "block_encoding": suite_block_encoding,
    "arith_primitives": suite_arith,
    "comparator_lcu": suite_comparator_lcu,
    "occupation_oracle": suite_occupation,
    "trotter": suite_trotter,
    "budget": suite_budget,
    "census": suite_census,
    "harmonic": suite_harmonic,
    "scattering": suite_scattering,
    "pauli_algebra": suite_pauli,
    "composition": suite_compose,
    "sector_gaps": suite_sector,
}


def run_suite(name: str, inject=()) -> SuiteResult:
    t0 = time.perf_counter()
    try:
        det = SUITES[name](_Ctx(name, inject))
        ok = bool(det.pop("ok"))
        return SuiteResult(name, ok, time.perf_counter() - t0, det)
    except Exception as exc:  # a crash is a failure, not an abort
        return SuiteResult(name, False, time.perf_counter() - t0, {}, f"{type(exc).__name__}: {exc}")


def run_all(names=None, inject=()) -> list:
    return [run_suite(n, inject) for n in (names or SUITES)]
