"""Reversible arithmetic: a small gate IR, a basis-state simulator and resource counts.

Bit 0 is least significant in every register.  The simulator tracks
computational basis states together with a +-1 sign, which is exact for
circuits built from X/CNOT/Toffoli/MCX (permutations) and Z/CZ/MCZ (signs).
Measurement-based AND uncomputation is modeled as the exact inverse of the
AND: on basis inputs the measurement outcome is deterministic and its Clifford
fix-up contributes no phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from fractions import Fraction

import numpy as np

from .core import ConfigError, is_pow2


class InvalidPartition(ConfigError):
    pass


class AncillaError(RuntimeError):
    """An AND target was not in the state its contract requires."""


# per logical-AND compute/uncompute pair
AND_T, AND_CNOT, AND_CZ, AND_S, AND_H = 4, 6, 1, 1, 2


@dataclass
class ResourceCount:
    t: int = 0
    cnot: int = 0
    cz: int = 0
    s: int = 0
    h: int = 0
    x: int = 0
    rz: int = 0
    ancilla: int = 0
    measurement_depth: int = 0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be nonnegative")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def __add__(self, other: "ResourceCount") -> "ResourceCount":
        if not isinstance(other, ResourceCount):
            return NotImplemented
        return ResourceCount(**{k: v + getattr(other, k) for k, v in self.as_dict().items()})

    def __radd__(self, other):
        if other == 0:
            return self
        return self.__add__(other)

    def __mul__(self, n) -> "ResourceCount":
        return ResourceCount(**{k: v * n for k, v in self.as_dict().items()})

    __rmul__ = __mul__


# ------------------------------------------------------------------------ IR

_ARITY = {"X": 1, "Z": 1, "CNOT": 2, "CZ": 2, "TOFFOLI": 3, "AND": 3, "AND_DG": 3}


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple
    polarity: tuple | None = None  # per control, True = fires on 1 (MCX only)

    def __post_init__(self):
        if self.name in _ARITY and len(self.qubits) != _ARITY[self.name]:
            raise ValueError(f"{self.name} takes {_ARITY[self.name]} qubits")
        if self.name not in _ARITY and self.name not in ("MCX", "MCZ"):
            raise ValueError(f"unknown gate {self.name}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("repeated qubit in gate")

    def text(self) -> str:
        if self.name == "MCX" and self.polarity is not None:
            ctrl = [f"{q}{'' if p else '!'}" for q, p in zip(self.qubits[:-1], self.polarity)]
            return "MCX " + ",".join(ctrl + [str(self.qubits[-1])])
        return f"{self.name} " + ",".join(map(str, self.qubits))


@dataclass(frozen=True)
class CircuitIR:
    n_qubits: int
    gates: tuple = ()
    ancillas: frozenset = field(default_factory=frozenset)

    def inverse(self) -> "CircuitIR":
        swap = {"AND": "AND_DG", "AND_DG": "AND"}
        inv = tuple(Gate(swap.get(g.name, g.name), g.qubits, g.polarity)
                    for g in reversed(self.gates))
        return CircuitIR(self.n_qubits, inv, self.ancillas)

    def then(self, other: "CircuitIR") -> "CircuitIR":
        return CircuitIR(max(self.n_qubits, other.n_qubits), self.gates + other.gates,
                         self.ancillas | other.ancillas)

    def tally(self) -> dict:
        out = {}
        for g in self.gates:
            out[g.name] = out.get(g.name, 0) + 1
        return out

    def resource_count(self) -> ResourceCount:
        """Counts implied by the IR itself (explicit gates plus per-AND costs)."""
        c = self.tally()
        n_and = c.get("AND", 0)
        return ResourceCount(t=AND_T * n_and, cnot=c.get("CNOT", 0) + AND_CNOT * n_and,
                             cz=c.get("CZ", 0) + AND_CZ * n_and, s=AND_S * n_and,
                             h=AND_H * n_and, x=c.get("X", 0), ancilla=len(self.ancillas),
                             measurement_depth=c.get("AND_DG", 0))

    def to_text(self) -> str:
        head = f"QUBITS {self.n_qubits}\nANCILLA " + ",".join(map(str, sorted(self.ancillas)))
        return head + "\n" + "\n".join(g.text() for g in self.gates) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CircuitIR":
        n, anc, gates = 0, frozenset(), []
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            name, args = parts[0], parts[1] if len(parts) > 1 else ""
            if name == "QUBITS":
                n = int(args)
            elif name == "ANCILLA":
                anc = frozenset(int(a) for a in args.split(",") if a)
            else:
                toks = args.split(",")
                qs = tuple(int(t.rstrip("!")) for t in toks)
                pol = None
                if name == "MCX":
                    pol = tuple(not t.endswith("!") for t in toks[:-1])
                gates.append(Gate(name, qs, pol))
        return cls(n, tuple(gates), anc)


# ----------------------------------------------------------------- simulator

def _bit(states, q):
    return (states >> q) & 1


def simulate(ir: CircuitIR, states, check_ancillas: bool = True):
    """Apply ir to an array of basis-state integers; returns (states, signs)."""
    s = np.array(states, dtype=np.int64, copy=True).reshape(-1)
    sign = np.ones_like(s)
    for g in ir.gates:
        q = g.qubits
        if g.name == "X":
            s ^= 1 << q[0]
        elif g.name == "CNOT":
            s ^= _bit(s, q[0]) << q[1]
        elif g.name == "TOFFOLI":
            s ^= (_bit(s, q[0]) & _bit(s, q[1])) << q[2]
        elif g.name == "MCX":
            pol = g.polarity or (True,) * (len(q) - 1)
            fire = np.ones_like(s)
            for c, p in zip(q[:-1], pol):
                fire &= _bit(s, c) if p else 1 - _bit(s, c)
            s ^= fire << q[-1]
        elif g.name == "Z":
            sign *= 1 - 2 * _bit(s, q[0])
        elif g.name in ("CZ", "MCZ"):
            allq = np.ones_like(s)
            for c in q:
                allq &= _bit(s, c)
            sign *= 1 - 2 * allq
        elif g.name == "AND":
            if np.any(_bit(s, q[2])):
                raise AncillaError(f"AND target {q[2]} not in |0>")
            s |= (_bit(s, q[0]) & _bit(s, q[1])) << q[2]
        elif g.name == "AND_DG":
            if np.any(_bit(s, q[2]) != (_bit(s, q[0]) & _bit(s, q[1]))):
                raise AncillaError(f"AND uncompute target {q[2]} does not hold the AND")
            s &= ~(1 << q[2])
    if check_ancillas and ir.ancillas:
        mask = sum(1 << a for a in ir.ancillas)
        if np.any(s & mask):
            raise AncillaError("ancillas not returned to |0>")
    return s, sign


def pack(registers: list, values: list) -> np.ndarray:
    """Basis integers from per-register values; registers are lists of qubits."""
    out = np.zeros(np.broadcast(*[np.asarray(v) for v in values]).shape, dtype=np.int64)
    for qs, v in zip(registers, values):
        v = np.asarray(v, dtype=np.int64)
        for i, q in enumerate(qs):
            out |= ((v >> i) & 1) << q
    return out


def unpack(states, qubits: list) -> np.ndarray:
    states = np.asarray(states, dtype=np.int64)
    out = np.zeros_like(states)
    for i, q in enumerate(qubits):
        out |= _bit(states, q) << i
    return out


# ------------------------------------------------------------------- builders

def _carry_compute(a: list, b: list, c: list) -> list:
    """c[i] <- carry into bit i+1 of a + b; modifies a[i], b[i] (i >= 1) by c[i-1]."""
    n = len(a)
    gates = [Gate("AND", (a[0], b[0], c[0]))]
    for i in range(1, n):
        gates += [Gate("CNOT", (c[i - 1], a[i])), Gate("CNOT", (c[i - 1], b[i])),
                  Gate("AND", (a[i], b[i], c[i])), Gate("CNOT", (c[i - 1], c[i]))]
    return gates


def _adder_gates(a: list, b: list, c: list) -> list:
    """a <- a + b mod 2^n using n carry ancillas c (all returned to 0)."""
    n = len(a)
    gates = _carry_compute(a, b, c)
    for i in range(n - 1, 0, -1):
        gates += [Gate("CNOT", (c[i - 1], c[i])), Gate("AND_DG", (a[i], b[i], c[i])),
                  Gate("CNOT", (c[i - 1], b[i])), Gate("CNOT", (b[i], a[i]))]
    gates += [Gate("AND_DG", (a[0], b[0], c[0])), Gate("CNOT", (b[0], a[0]))]
    return gates


def adder_counts(n: int) -> ResourceCount:
    return ResourceCount(t=4 * n, cnot=12 * n - 3, cz=n, s=n, h=2 * n,
                         ancilla=n, measurement_depth=n)


def _registers(n: int):
    return list(range(n)), list(range(n, 2 * n)), list(range(2 * n, 3 * n))


def adder(n: int):
    """Registers: x on 0..n-1 (overwritten by the sum), y on n..2n-1, carries 2n..3n-1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b, c = _registers(n)
    ir = CircuitIR(3 * n, tuple(_adder_gates(a, b, c)), frozenset(c))
    return ir, adder_counts(n)


def subtractor(n: int):
    """x <- x - y mod 2^n as NOT(NOT x + y)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b, c = _registers(n)
    flips = [Gate("X", (q,)) for q in a]
    ir = CircuitIR(3 * n, tuple(flips + _adder_gates(a, b, c) + flips), frozenset(c))
    return ir, adder_counts(n) + ResourceCount(x=2 * n)


def incrementer(n: int):
    """x <- x + 1 mod 2^n on qubits 0..n-1.

    Carries c_2..c_n sit on n..2n-2; c_n is left holding the high carry
    (set only when x = 2^n - 1), the others return to 0.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    a = list(range(n))
    c = {i: n + i - 2 for i in range(2, n + 1)}
    c[1] = a[0]
    gates = [Gate("AND", (a[0], a[1], c[2]))]
    for i in range(2, n):
        gates.append(Gate("AND", (c[i], a[i], c[i + 1])))
    for i in range(n - 1, 1, -1):
        gates.append(Gate("CNOT", (c[i], a[i])))
        gates.append(Gate("AND_DG", (c[i - 1], a[i - 1], c[i])))
    gates += [Gate("CNOT", (a[0], a[1])), Gate("X", (a[0],))]
    anc = frozenset(c[i] for i in range(2, n))
    ir = CircuitIR(2 * n - 1, tuple(gates), anc)
    counts = ResourceCount(t=4 * (n - 1), cnot=7 * (n - 1), cz=n - 1, s=n, h=2 * (n - 1),
                           x=1, ancilla=n - 1, measurement_depth=n - 1)
    return ir, counts


def high_carry_qubit(n: int) -> int:
    return 2 * n - 2


def comparator(n: int, variant: str = "CMP_prime"):
    """Registers i on 0..n-1, j on n..2n-1, scratch carries 2n..3n-1.

    CMP_prime computes [j < i] into the top carry and leaves the scratch
    populated; ``cmp_prime_phase`` wraps it into the diagonal sign oracle.
    CMP copies the flag onto qubit 3n and uncomputes the scratch.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    i_reg, j_reg, c = _registers(n)
    flips = [Gate("X", (q,)) for q in j_reg]
    fwd = CircuitIR(3 * n, tuple(flips + _carry_compute(j_reg, i_reg, c)))
    counts = adder_counts(n) + ResourceCount(x=2 * n)
    if variant == "CMP_prime":
        return fwd, counts
    if variant == "CMP":
        out = 3 * n
        ir = CircuitIR(3 * n + 1, fwd.gates + (Gate("CNOT", (c[-1], out)),)
                       + fwd.inverse().gates, frozenset(c))
        return ir, counts + ResourceCount(ancilla=1)
    raise ValueError(f"unknown comparator variant {variant!r}")


def cmp_prime_phase(n: int) -> CircuitIR:
    """CMP'^dag Z CMP': sign 2 Theta(j - i) - 1 on |i>|j>, scratch restored."""
    fwd, _ = comparator(n, "CMP_prime")
    top = 3 * n - 1
    return CircuitIR(3 * n, fwd.gates + (Gate("Z", (top,)),) + fwd.inverse().gates,
                     frozenset(range(2 * n, 3 * n)))


def multiplier_layout(n: int) -> dict:
    a = list(range(n))
    b = list(range(n, 2 * n))
    acc = list(range(2 * n, 4 * n))
    pp = list(range(4 * n, 5 * n + 1))        # n partial products + zero top bit
    carry = list(range(5 * n + 1, 6 * n + 2))  # n+1 carries, reused per row
    return {"a": a, "b": b, "acc": acc, "pp": pp, "carry": carry, "n_qubits": 6 * n + 2}


def multiplier(n: int):
    """acc (2n bits, starts at 0) <- a * b by shifted partial-product additions."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lay = multiplier_layout(n)
    a, b, acc, pp, carry = lay["a"], lay["b"], lay["acc"], lay["pp"], lay["carry"]
    gates = [Gate("AND", (a[t], b[0], acc[t])) for t in range(n)]
    for i in range(1, n):
        row = [Gate("AND", (a[t], b[i], pp[t])) for t in range(n)]
        gates += row
        gates += _adder_gates(acc[i:i + n + 1], pp, carry)
        gates += [Gate("AND_DG", g.qubits) for g in reversed(row)]
    ir = CircuitIR(lay["n_qubits"], tuple(gates), frozenset(pp + carry))
    counts = ResourceCount(t=8 * n * n - 4, cnot=12 * n * n - 6, cz=2 * n * n - 1,
                           s=2 * n * n - 1, h=4 * n * n - 2,
                           ancilla=(n + 1) * (2 * n - 1) + 1,
                           measurement_depth=2 * n * n - 1)
    return ir, counts


# --------------------------------------------------------------- cost models

def grouped_mcx_cost(M: int, group_fractions) -> ResourceCount:
    """T-count for an M-fold controlled operation split into groups of size M^(1/r_i)."""
    if not is_pow2(M) or M < 2:
        raise InvalidPartition(f"M={M} must be a power of two >= 2")
    r = [Fraction(x) for x in group_fractions]
    if not r or any(x <= 0 for x in r) or sum(1 / x for x in r) != 1:
        raise InvalidPartition("sum of 1/r_i must equal 1")
    lg = int(math.log2(M))
    t = 0
    for ri in r:
        bits = Fraction(lg) / ri
        if bits.denominator != 1:
            raise InvalidPartition(f"log2(M)/r = {bits} is not an integer")
        t += 2 ** int(bits) * (4 * int(bits) - 4)
    t += M * (4 * len(r) - 4)
    return ResourceCount(t=int(t))


def unary_iteration_cost(L: int) -> ResourceCount:
    if L < 1:
        raise ValueError("L must be >= 1")
    return ResourceCount(t=4 * L - 4)
