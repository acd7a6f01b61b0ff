"""Occupation-basis Hamiltonian in a one-hot (unary) mode encoding.

Mode p with cutoff N uses qubits p*(N+1) + n for n = 0..N; occupation n
is the state with only qubit n of the register set.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import ConfigError, Dispersion, LatticeParams, OccupationCutoffs, dispersion_table
from .pauli import PauliSum


class CutoffTooSmall(ConfigError):
    pass


class ZeroMass(ConfigError):
    pass


def qubit(p: int, n: int, N: int) -> int:
    return p * (N + 1) + n


def _hop(p, n, m, N, coeff):
    """coeff * (X_n X_{n+m} + Y_n Y_{n+m}) on register p."""
    a, b = qubit(p, n, N), qubit(p, n + m, N)
    return {((a, "X"), (b, "X")): coeff, ((a, "Y"), (b, "Y")): coeff}


def map_ladder(p: int, m: int, r: int, N: int, n_qubits: int | None = None) -> PauliSum:
    """(a†)^m n^r + n^r a^m on mode p, truncated at occupation N."""
    if m < 1 or r < 0:
        raise ValueError("need m >= 1 and r >= 0")
    if N < m:
        raise CutoffTooSmall(f"N={N} < m={m}")
    nq = (p + 1) * (N + 1) if n_qubits is None else n_qubits
    terms = {}
    for n in range(0, N - m + 1):
        w = math.sqrt(math.factorial(n + m) / math.factorial(n)) * n ** r
        if w == 0:
            continue
        terms.update(_hop(p, n, m, N, 0.5 * w))
    return PauliSum(terms, nq)


def number_power(p: int, r: int, N: int, n_qubits: int | None = None) -> PauliSum:
    """n^r on mode p as sum_n (n^r / 2)(I - Z_n)."""
    nq = (p + 1) * (N + 1) if n_qubits is None else n_qubits
    out = PauliSum(n_qubits=nq)
    for n in range(1, N + 1):
        c = n ** r / 2
        out = out + PauliSum({(): c, ((qubit(p, n, N), "Z"),): -c}, nq)
    return out


def normal_field_power(p: int, c: int, N: int, nq: int) -> PauliSum:
    """Normal-ordered :(a + a†)^c: on mode p for c in {1, 2, 4}."""
    def ladder(m, r):
        return map_ladder(p, m, r, N, nq) if N >= m else PauliSum(n_qubits=nq)

    if c == 1:
        return ladder(1, 0)
    if c == 2:
        return ladder(2, 0) + 2 * number_power(p, 1, N, nq)
    if c == 4:
        # a†^4 + a^4 + 4(a†^2 n + n a^2) + 6 a†^2 a^2, with a†^2 a^2 = n^2 - n
        return (ladder(4, 0) + 4 * ladder(2, 1)
                + 6 * (number_power(p, 2, N, nq) - number_power(p, 1, N, nq)))
    raise ValueError(f"no normal-ordered block for multiplicity {c}")


def momentum_tuples(P: int, d: int):
    """Ordered 4-tuples of mode indices with p1 + p2 = p3 + p4 (mod P per axis)."""
    labels = list(itertools.product(range(P), repeat=d))
    index = {lab: i for i, lab in enumerate(labels)}
    out = []
    for p1, p2, q in itertools.product(labels, repeat=3):
        p3 = tuple((a + b) % P for a, b in zip(p1, q))
        p4 = tuple((a - b) % P for a, b in zip(p2, q))
        out.append((index[p1], index[p2], index[p3], index[p4]))
    return out


def group_of(tup) -> int:
    """Group id from the multiset pattern of a 4-tuple of modes."""
    mult = sorted(Counter(tup).values(), reverse=True)
    if mult == [1, 1, 1, 1]:
        return 1
    if mult == [2, 1, 1]:
        return 2
    if mult == [2, 2]:
        return 3
    if mult == [4]:
        return 4
    raise AssertionError(f"momentum conservation forbids pattern {mult}")


def _mode_order(disp: Dispersion, P: int, d: int):
    """Map from the 0..P-1 grid used in tuple enumeration to dispersion rows."""
    lo = min(min(lab) for lab in disp.labels) if disp.labels else 0
    order = []
    for lab in itertools.product(range(P), repeat=d):
        shifted = tuple(((x - lo) % P) + lo for x in lab)
        order.append(disp.index(shifted))
    return order


@dataclass
class OccHamiltonian:
    h0: PauliSum
    h1: PauliSum
    h2: PauliSum
    h3: PauliSum
    h4: PauliSum
    cutoffs: OccupationCutoffs
    params: LatticeParams
    normalization: str = "volume"

    @property
    def groups(self) -> list:
        return [self.h1, self.h2, self.h3, self.h4]

    @property
    def total(self) -> PauliSum:
        return (self.h0 + self.h1 + self.h2 + self.h3 + self.h4).simplify()

    @property
    def n_qubits(self) -> int:
        return self.cutoffs.n_qubits


def prefactor(params: LatticeParams, normalization: str = "volume") -> float:
    if normalization == "volume":
        return params.Lambda / (24 * params.Omega)
    if normalization == "continuum":
        return params.Lambda / (24 * (2 * math.pi) ** params.d)
    raise ValueError(f"unknown normalization {normalization!r}")


def free_hamiltonian(params: LatticeParams, cutoffs: OccupationCutoffs) -> PauliSum:
    disp = dispersion_table(params)
    nq = cutoffs.n_qubits
    h0 = PauliSum(n_qubits=nq)
    for p, w in enumerate(disp.omega):
        h0 = h0 + float(w) * number_power(p, 1, cutoffs.N, nq)
    return h0.simplify()


def build_occ_hamiltonian(params: LatticeParams, cutoffs: OccupationCutoffs,
                          normalization: str = "volume") -> OccHamiltonian:
    if cutoffs.mode_count != params.Omega:
        raise ConfigError("mode_count must equal Omega")
    N, nq = cutoffs.N, cutoffs.n_qubits
    disp = dispersion_table(params)
    order = _mode_order(disp, params.P, params.d)
    w = disp.omega[order]
    h0 = free_hamiltonian(params, cutoffs)
    groups = {g: PauliSum(n_qubits=nq) for g in (1, 2, 3, 4)}
    g0 = prefactor(params, normalization)
    if g0 != 0:
        # collect identical multisets first; each contributes count * block
        weights = Counter()
        for tup in momentum_tuples(params.P, params.d):
            weights[tuple(sorted(tup))] += 1
        cache = {}
        for ms, count in sorted(weights.items()):
            coeff = g0 * count / math.sqrt(np.prod([2 * w[i] for i in ms]))
            mult = Counter(ms)
            term = PauliSum.identity(coeff, nq)
            for mode, c in sorted(mult.items()):
                key = (order[mode], c)
                if key not in cache:
                    cache[key] = normal_field_power(order[mode], c, N, nq)
                term = term * cache[key]
            groups[group_of(ms)] = groups[group_of(ms)] + term
    hs = [groups[g].simplify() for g in (1, 2, 3, 4)]
    return OccHamiltonian(h0, *hs, cutoffs=cutoffs, params=params, normalization=normalization)


# ---------------------------------------------------------------- gate counts

@dataclass(frozen=True)
class GateCountOcc:
    crz: Fraction
    t: Fraction
    cnot: Fraction
    h: Fraction
    rz: Fraction = Fraction(0)

    def __add__(self, o):
        return GateCountOcc(self.crz + o.crz, self.t + o.t, self.cnot + o.cnot,
                            self.h + o.h, self.rz + o.rz)

    def ceil(self) -> dict:
        return {k: math.ceil(v) for k, v in self.as_dict().items()}

    def as_dict(self) -> dict:
        return dict(crz=self.crz, t=self.t, cnot=self.cnot, h=self.h, rz=self.rz)


def gate_counts_occ(cutoffs: OccupationCutoffs, params: LatticeParams | None = None) -> dict:
    """Per-step gate tallies per group, plus their total."""
    N = Fraction(cutoffs.N)
    W = Fraction(cutoffs.mode_count)
    g1 = N ** 4 * W ** 2 * (W - 1)
    g2 = N ** 3 * W ** 2
    g3 = N ** 2 * W * (W - 1)
    out = {
        "h1": GateCountOcc(crz=g1 / 48, t=g1 / 4, cnot=11 * g1 / 16, h=g1 / 24),
        "h2": GateCountOcc(crz=g2 / 3, t=8 * g2 / 3, cnot=20 * g2 / 3, h=2 * g2 / 3),
        "h3": GateCountOcc(crz=2 * g3, t=8 * g3, cnot=16 * g3, h=3 * g3),
        "h4": GateCountOcc(crz=Fraction(0), t=Fraction(0), cnot=4 * N * W, h=4 * N * W,
                           rz=3 * N * W),
        "h0": GateCountOcc(crz=Fraction(0), t=Fraction(0), cnot=Fraction(0), h=Fraction(0),
                           rz=N * W),
    }
    tot = GateCountOcc(*(Fraction(0),) * 5)
    for v in out.values():
        tot = tot + v
    out["total"] = tot
    return out


def occ_rotation_count(cutoffs: OccupationCutoffs) -> Fraction:
    """Single-qubit rotations per Trotter step (controlled ones counted once)."""
    g = gate_counts_occ(cutoffs)
    return g["h1"].crz + g["h2"].crz + g["h3"].crz + 4 * Fraction(cutoffs.N * cutoffs.mode_count)


# ------------------------------------------------------ commutator bound

def occ_norm_sum(params: LatticeParams, cutoffs: OccupationCutoffs) -> float:
    disp = dispersion_table(params)
    N = cutoffs.N
    wmin, wmax = disp.omega_min, disp.omega_max
    g = params.Lambda / (96 * wmin ** 2)
    return (wmax * N * (N + 1) / 2
            + g * params.Omega * ((N + 1) ** 2 / 2 + (N + 2) ** 2 + (N + 2) + (N + 4) ** 2))


def occ_commutator_bounds(params: LatticeParams, cutoffs: OccupationCutoffs,
                          beta: float = 1.0) -> dict:
    """Closed-form first-level commutator bounds between the interaction groups."""
    disp = dispersion_table(params)
    N = cutoffs.N
    lam, w = params.Lambda, disp.omega_min
    wmax = disp.omega_max
    g = lam / (96 * w ** 2)
    B = beta * wmax + lam * beta * (N * beta - 1) / (16 * w ** 2)
    s12 = math.sqrt((N + 1) * (N + 2))
    s34 = math.sqrt((N + 3) * (N + 4))
    sq1 = math.sqrt(N + 1)
    sq2 = math.sqrt(N + 2)
    return {
        "H1": (lam / w ** 2) ** 2 * (N + 1) ** 4 / (3 * 2 ** 11),
        "H2": g ** 2 * 3 * (4 * N ** 2 * (N + 1) ** 2 + 8 * N * (N + 1) ** 2.5 * sq2),
        "H3": g ** 2 * (2 * N ** 2 * (N + 1) * (N + 2) + 16 * N ** 3 * sq1 * sq2),
        "H4": (g ** 2 * (N + 1) * (N + 2) * ((N + 3) * (N + 4) + 16 * N * s34 + 16 * N ** 2)
               + lam / (48 * w ** 2) * s12 * (s34 + 4 * N) * B),
        "H12": g ** 2 * 16 * N * (N + 1) ** 3 * (s12 + 2 * N),
        "H13": g ** 2 * 64 * (N + 1) ** 2 * ((N + 1) * (N + 2) + 4 * N * s12 + 3 * N ** 2),
        "H14": (g ** 2 * 32 * (N + 1) ** 2.5 * sq2 * (s34 + 4 * N)
                + g * 16 * N * (N + 1) ** 2 * B),
        "H23": g ** 2 * (48 * N ** 2 * (N + 1) ** 1.5 * sq2 + 288 * N ** 3 * (N + 1)),
        "H24": (g ** 2 * 24 * N * (N + 1) ** 1.5 * sq2 * (s12 + 2 * N) * (s34 + 4 * N)
                + g * 12 * N ** 2 * (N + 1) * (s12 + 2 * N) * B),
        "H34": (g ** 2 * 16 * s12 * (s12 + N) * (s12 + 3 * N) * (s12 + 4 * N)
                + g * 4 * N * (2 * (N + 1) * (N + 2) + 8 * N * s12 + 3 * N ** 2) * B),
    }


def alpha_comm_occ(params: LatticeParams, cutoffs: OccupationCutoffs, beta: float = 1.0,
                   p: int = 2, p_prime: int = 1) -> float:
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    if params.M <= 0:
        raise ZeroMass("occupation bound needs M > 0")
    if params.Lambda == 0:
        return 0.0
    comm = sum(occ_commutator_bounds(params, cutoffs, beta).values())
    return 2.0 ** (p - p_prime - 1) * comm * occ_norm_sum(params, cutoffs)


def occ_fragments(h: OccHamiltonian, scheme: str = "groups") -> list:
    """Trotter fragments: five groups, or free part merged into the diagonal group."""
    if scheme == "groups":
        parts = [h.h0, h.h1, h.h2, h.h3, h.h4]
    elif scheme == "merged":
        parts = [h.h0 + h.h4, h.h1, h.h2, h.h3]
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return [p for p in parts if len(p)]
