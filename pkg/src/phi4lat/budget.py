"""Phase-estimation error budgets, end-to-end T-counts and a surface-code overlay."""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

from .core import AmplitudeCutoffs, ConfigError, LatticeParams, OccupationCutoffs
from .dynamics import alpha_comm_amp
from .encoding import (ConjectureFlagRequired, build_block_encoding, lcu_lengths)
from .encoding import aqft_t as _aqft_formula
from .occ_model import alpha_comm_occ, gate_counts_occ, occ_rotation_count

SCHEMA_VERSION = 1
ALGORITHMS = ("occ_trotter", "II", "I", "IIIa", "IIIb")
_ENCODING_NAME = {"I": "I_equal_weight", "IIIa": "IIIa_z_lcu", "IIIb": "IIIb_signature"}


class OutOfRange(ConfigError):
    pass


class ZeroAlphaComm(ConfigError):
    pass


class InfeasibleDistance(ConfigError):
    pass


class InvalidRegime(UserWarning):
    pass


# ------------------------------------------------------------ gate formulas

def rz_synthesis_t(eps_r: float) -> float:
    """Expected T-count of one Rz synthesized to error eps_r; clamped at 0."""
    if not eps_r > 0:
        raise OutOfRange("eps_r must be positive")
    val = 3.067 * math.log2(2 / eps_r) - 4.327
    if val < 0:
        warnings.warn(f"Rz synthesis formula negative at eps_r={eps_r}", InvalidRegime)
        return 0.0
    return val


def aqft_t(n: float, eps_f: float) -> float:
    if n < 1 or not 0 < eps_f < 1:
        raise OutOfRange("need n >= 1 and 0 < eps_f < 1")
    return _aqft_formula(n, eps_f)


# ---------------------------------------------------------------- budgets

@dataclass
class ErrorBudget:
    method: str
    epsilon_E: float
    epsilon_theta: float
    epsilon_trotter: float
    epsilon_synth: float
    epsilon_qft: float
    epsilon_aqft: float
    epsilon_r: float
    epsilon_f: float
    m: int
    repetitions: int
    repetitions_bound: float  # 2^m before rounding to an integer exponent
    tau: float | None
    alpha: float
    N_r: float
    N_f: float

    def phase_error(self) -> float:
        """Approximate phase error implied by the chosen split."""
        quant = math.pi / 2 ** (self.m + 1)
        if self.method == "qubitization":
            sys = math.pi * (self.N_f * self.epsilon_f) ** 2 + self.N_r * self.epsilon_r
        else:
            trot = self.alpha * self.tau ** 3
            sys = math.pi * self.N_f * self.epsilon_f + self.N_r * self.epsilon_r + trot
        return math.sqrt(quant ** 2 + sys ** 2)

    def feasible(self, rtol: float = 1e-9) -> bool:
        return self.phase_error() <= self.epsilon_theta * (1 + rtol)


def budget_trotter(alpha_comm: float, epsilon_E: float, N_r: float, N_f: float,
                   variant: str = "standard") -> ErrorBudget:
    """Error split for phase estimation on one second-order Trotter step.

    ``standard``: Trotter gets sqrt(2)/4 of the phase error, synthesis and
    QFT sqrt(2)/8 each.  ``aqft``: quantization gets half the variance and
    Trotter, synthesis, AQFT and QFT share the rest equally.
    """
    if not alpha_comm > 0:
        raise ZeroAlphaComm("commutator bound must be positive")
    if not epsilon_E > 0:
        raise OutOfRange("epsilon_E must be positive")
    r2 = math.sqrt(2)
    if variant == "standard":
        tau = math.sqrt(epsilon_E / (2 ** 1.5 * alpha_comm))
        eth = epsilon_E * tau
        bound = math.pi ** 2 * math.sqrt(alpha_comm) / epsilon_E ** 1.5
        m = max(0, math.floor(math.log2(bound)))
        e_syn = r2 * eth / 8
        e_qft = r2 * eth / (8 * math.pi)
        e_trot = r2 * eth / 4
        eps_r = e_syn / N_r if N_r else 0.0
        eps_f = e_qft / N_f if N_f else 0.0
        e_aqft = e_qft
    elif variant == "aqft":
        tau = math.sqrt(epsilon_E / (2 ** 2.5 * alpha_comm))
        eth = epsilon_E * tau
        bound = math.pi * 2 ** 0.75 * math.sqrt(alpha_comm) / epsilon_E ** 1.5
        m = max(0, math.ceil(math.log2(bound)))
        share = eth / (4 * r2)
        e_syn = e_trot = e_aqft = share
        e_qft = share / math.pi
        # per-gate splits, equal to 2^(-15/4) eps^(3/2) / (N sqrt(alpha))
        eps_r = share / N_r if N_r else 0.0
        eps_f = share / (math.pi * N_f) if N_f else 0.0
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return ErrorBudget("trotter", epsilon_E, eth, e_trot, e_syn, e_qft, e_aqft, eps_r, eps_f,
                       m, 2 ** m, bound, tau, alpha_comm, N_r, N_f)


def budget_qubitization(alpha: float, epsilon_E: float, N_r: float, N_f: float) -> ErrorBudget:
    if not alpha > 0:
        raise OutOfRange("alpha must be positive")
    if not epsilon_E > 0:
        raise OutOfRange("epsilon_E must be positive")
    r2 = math.sqrt(2)
    bound = math.pi * alpha / (r2 * epsilon_E)
    m = max(0, math.ceil(math.log2(bound))) if bound > 1 else 0
    eps_r = epsilon_E / (3 * r2 * alpha * N_r) if N_r else 0.0
    eps_f = epsilon_E / (3 * r2 * alpha * N_f) if N_f else 0.0
    return ErrorBudget("qubitization", epsilon_E, epsilon_E / alpha, 0.0, eps_r * N_r, 0.0,
                       eps_f * N_f, eps_r, eps_f, m, 2 ** m, bound, None, alpha, N_r, N_f)


# ------------------------------------------------------------ cost reports

@dataclass
class CostReport:
    algorithm: str
    total_t: float
    total_t_continuous: float  # same with 2^m replaced by its unrounded bound
    logical_qubits: int
    ancilla_qubits: int
    breakdown: dict
    per_step_t: float
    budget: ErrorBudget | None = field(default=None, repr=False)
    alpha: float = 0.0
    flags: dict = field(default_factory=dict)
    surface_overlay: dict | None = None

    def to_json(self) -> str:
        d = {"schema_version": SCHEMA_VERSION, "algorithm": self.algorithm,
             "total_t": self.total_t, "total_t_continuous": self.total_t_continuous,
             "logical_qubits": self.logical_qubits, "ancilla_qubits": self.ancilla_qubits,
             "breakdown": self.breakdown, "per_step_t": self.per_step_t, "alpha": self.alpha,
             "flags": self.flags, "surface_overlay": self.surface_overlay}
        if self.budget is not None:
            d["budget"] = asdict(self.budget)
        return json.dumps(d, sort_keys=True)


def _assemble(alg, bud, N_r, N_f, n_plus, aqft_bits, system_qubits, ancilla, alpha, flags):
    rz = rz_synthesis_t(bud.epsilon_r) if N_r else 0.0
    fq = aqft_t(aqft_bits, bud.epsilon_f) if N_f else 0.0
    per = {"rotations": N_r * rz, "aqft": N_f * fq, "other": n_plus}
    step = sum(per.values())
    reps = bud.repetitions
    breakdown = {k: reps * v for k, v in per.items()}
    anc = int(math.ceil(ancilla - 1e-9)) + bud.m
    return CostReport(algorithm=alg, total_t=reps * step,
                      total_t_continuous=bud.repetitions_bound * step,
                      logical_qubits=int(math.ceil(system_qubits - 1e-9)) + anc,
                      ancilla_qubits=anc, breakdown=breakdown, per_step_t=step,
                      budget=bud, alpha=alpha, flags=flags)


def amp_trotter_rotations(Omega: int, E_D: int, k: float) -> float:
    L1, L2, L3, L4, L5 = lcu_lengths(k)
    return Omega * (L1 + L2 + L3 + L4) + E_D * L5


def total_cost(algorithm: str, params: LatticeParams, cutoffs, epsilon_E: float,
               conjecture: bool = False, kappa: float = 4.0,
               trotter_variant: str = "standard") -> CostReport:
    """End-to-end phase-estimation T-count and logical qubits."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    flags = {"conjecture": conjecture, "kappa": kappa}
    W = params.Omega
    if algorithm == "occ_trotter":
        if not isinstance(cutoffs, OccupationCutoffs):
            raise ConfigError("occupation Trotter needs OccupationCutoffs")
        a = alpha_comm_occ(params, cutoffs)
        N_r = float(occ_rotation_count(cutoffs))
        counts = gate_counts_occ(cutoffs)
        n_plus = float(counts["total"].t)
        bud = budget_trotter(a, epsilon_E, N_r, 0, trotter_variant)
        return _assemble(algorithm, bud, N_r, 0, n_plus, 1, cutoffs.n_qubits, 1, a, flags)
    if not isinstance(cutoffs, AmplitudeCutoffs):
        raise ConfigError("amplitude algorithms need AmplitudeCutoffs")
    k = cutoffs.k
    bits = math.log2(2 * k)
    if algorithm == "II":
        a = alpha_comm_amp(params, cutoffs)
        N_r = amp_trotter_rotations(W, params.E_D, k)
        N_f = 2 * W
        bud = budget_trotter(a, epsilon_E, N_r, N_f, trotter_variant)
        return _assemble(algorithm, bud, N_r, N_f, 0.0, bits, W * bits, 1, a, flags)
    be = build_block_encoding(_ENCODING_NAME[algorithm], params, cutoffs,
                              conjecture=conjecture, kappa=kappa)
    n_plus = be.require_totals()
    bud = budget_qubitization(be.alpha, epsilon_E, be.rz_count, be.aqft_count)
    return _assemble(algorithm, bud, be.rz_count, be.aqft_count, n_plus, bits,
                     be.extra["system"], be.ancilla_qubits, be.alpha, flags)


def qsvt_queries(alpha: float, t: float, eps: float) -> float:
    """Query count alpha t + log(1/eps) / log(e + log(1/eps)/(alpha t)), constants set to 1."""
    if alpha <= 0 or t <= 0 or not 0 < eps < 1:
        raise OutOfRange("need alpha, t > 0 and 0 < eps < 1")
    L = math.log(1 / eps)
    return alpha * t + L / math.log(math.e + L / (alpha * t))


# ---------------------------------------------------------- surface overlay

@dataclass
class SurfaceModel:
    """Toy surface-code model; every constant here is configuration."""
    p_phys: float = 1e-3
    p_threshold: float = 1e-2
    prefactor: float = 0.1
    cycle_ns: float = 1000.0
    factories: int = 4
    factory_tiles: int = 150
    failure_budget: float = 0.01
    d_max: int = 101

    def logical_error(self, d: int) -> float:
        return self.prefactor * (self.p_phys / self.p_threshold) ** ((d + 1) / 2)

    def phys_per_logical(self, d: int) -> int:
        return 2 * d * d


def surface_overlay(report: CostReport, model: SurfaceModel | None = None) -> CostReport:
    model = model or SurfaceModel()
    if min(model.p_phys, model.cycle_ns, model.prefactor, model.failure_budget) <= 0:
        raise ConfigError("surface model parameters must be positive")
    if model.p_phys >= model.p_threshold:
        raise InfeasibleDistance("physical error rate above threshold")
    T = report.total_t
    tiles = report.logical_qubits + (model.factories * model.factory_tiles if T > 0 else 0)
    d = 3
    while True:
        cycles = max(T, 1) * d
        if model.logical_error(d) * tiles * cycles < model.failure_budget:
            break
        d += 2
        if d > model.d_max:
            raise InfeasibleDistance(f"no distance <= {model.d_max} meets the budget")
    overlay = {"code_distance": d, "physical_qubits": tiles * model.phys_per_logical(d),
               "wallclock_s": (T * d * model.cycle_ns * 1e-9 / model.factories) if T else 0.0,
               "model": asdict(model)}
    report.surface_overlay = overlay
    return report


# ---------------------------------------------------------------- table

TABLE_SCALINGS = {
    "occ_trotter": ("N|Omega|", "lambda N^7 |Omega|^3 / (M^(5/2) eps^(3/2))"),
    "II": ("|Omega| log k", "|Omega|^(3/2) sqrt(Lambda^2 k^5 + Lambda M^2 k^4) log^4 k / eps^(3/2)"),
    "I": ("|Omega| log k + log^2 k", "|Omega|^2 (k^2 Lambda + k M^2) log^2 k / eps"),
    "IIIa": ("|Omega| log k", "|Omega|^2 (k^2 Lambda + k M^2)(log^4 k + |Omega|) / eps"),
    "IIIb": ("|Omega| log k", "|Omega|^2 (k^2 Lambda + k M^2) log^2 k / eps (conjecture)"),
}


def formula_source(algorithm: str) -> str:
    """Tag naming the implemented cost path for a row."""
    return {"occ_trotter": "trotter_budget+occ_gate_counts",
            "II": "trotter_budget+amp_rotation_counts",
            "I": "qubitization_budget+alg1_tallies",
            "IIIa": "qubitization_budget+alg3a_tallies",
            "IIIb": "qubitization_budget+alg3b_tallies(conjecture)"}[algorithm]


def table_csv(reports: list, anchors: str = "") -> str:
    """Rows: algorithm, scaling laws, evaluated formula values and the anchor config."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", "algorithm", "qubit_scaling", "t_scaling",
                "qubit_formula_value", "t_formula_value", "anchors", "source"])
    for r in reports:
        q, t = TABLE_SCALINGS[r.algorithm]
        w.writerow([SCHEMA_VERSION, r.algorithm, q, t, r.logical_qubits,
                    f"{r.total_t:.6e}", anchors, formula_source(r.algorithm)])
    return buf.getvalue()
