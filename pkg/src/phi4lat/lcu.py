"""Three LCU families for powers of the field operator, plus bit-pattern tools.

All targets are integer diagonals indexed by the bin b = j + k - 1, i.e.
field label j = b - k + 1 in units of delta_phi.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import AmplitudeCutoffs, LatticeParams, NonPowerOfTwoCutoff, is_pow2


@dataclass(frozen=True)
class UnitaryDescriptor:
    """A +-1 diagonal on one 2k-point register.

    kinds: ``signature_threshold`` (payload i, n_max, power, k),
    ``pauli_z_product`` (payload indices, k), ``signature_bits``
    (payload bit, power, k), ``identity`` (payload k).
    """
    kind: str
    payload: tuple

    def params(self) -> dict:
        return dict(self.payload)

    def diagonal(self) -> np.ndarray:
        p = self.params()
        k = p["k"]
        b = np.arange(2 * k)
        if self.kind == "identity":
            return np.ones(2 * k, dtype=np.int64)
        if self.kind == "signature_threshold":
            target = target_diagonal(k, p["power"])
            return np.where(p["n_max"] + target - p["i"] - 1 >= 0, 1, -1).astype(np.int64)
        if self.kind == "pauli_z_product":
            out = np.ones(2 * k, dtype=np.int64)
            for q in p["indices"]:
                out *= 1 - 2 * ((b >> q) & 1)
            return out
        if self.kind == "signature_bits":
            vals = target_diagonal(k, p["power"])
            return 1 - 2 * ((vals >> (p["bit"] - 1)) & 1)
        raise ValueError(f"unknown kind {self.kind}")

    def to_json(self) -> dict:
        pl = {key: (list(v) if isinstance(v, tuple) else v) for key, v in self.payload}
        return {"kind": self.kind, "payload": pl}


@dataclass
class LcuDecomposition:
    family: str
    power: int
    k: int
    terms: list = field(default_factory=list)  # [(coeff, UnitaryDescriptor)]

    @property
    def l1(self):
        return sum(abs(c) for c, _ in self.terms)

    @property
    def target_dim(self) -> int:
        return 2 * self.k

    def __len__(self):
        return len(self.terms)

    def reconstruct(self) -> np.ndarray:
        """Sum of coeff * diagonal, kept exact when all coefficients are Fractions."""
        out = np.zeros(2 * self.k, dtype=object)
        for c, u in self.terms:
            out = out + np.array([c * int(v) for v in u.diagonal()], dtype=object)
        return out

    def reconstruct_float(self) -> np.ndarray:
        return np.sum([float(c) * u.diagonal() for c, u in self.terms], axis=0)

    def non_identity_count(self) -> int:
        return sum(1 for _, u in self.terms
                   if not np.all(u.diagonal() == 1))

    def to_json(self) -> str:
        rows = [{"coeff": float(c), **u.to_json()} for c, u in self.terms]
        return json.dumps(rows, sort_keys=True)


def target_diagonal(k: int, power: int) -> np.ndarray:
    """Integer diagonal of (Phi/delta_phi)^power."""
    j = np.arange(2 * k, dtype=np.int64) - k + 1
    return j ** power


def _desc(kind, **payload):
    items = tuple(sorted((key, tuple(v) if isinstance(v, (list, tuple)) else v)
                         for key, v in payload.items()))
    return UnitaryDescriptor(kind, items)


# ------------------------------------------------------------ equal weight

def lcu_equal_weight(k: int, power: int = 1) -> LcuDecomposition:
    """diag(n_j) = 1/2 sum_i U^(i), U^(i)_jj = 2 Theta(n_max + n_j - i - 1) - 1."""
    if k < 2:
        raise ValueError("k must be >= 2")
    n_max = k ** power
    half = Fraction(1, 2)
    terms = [(half, _desc("signature_threshold", i=i, n_max=n_max, power=power, k=k))
             for i in range(2 * n_max)]
    return LcuDecomposition("equal_weight", power, k, terms)


def lcu_equal_weight_phi(k):
    return lcu_equal_weight(k, 1)


def lcu_equal_weight_phi2(k):
    return lcu_equal_weight(k, 2)


def lcu_equal_weight_phi4(k):
    return lcu_equal_weight(k, 4)


def threshold_matrix(k: int, i: int, power: int = 1) -> np.ndarray:
    return _desc("signature_threshold", i=i, n_max=k ** power, power=power, k=k).diagonal()


def equal_weight_reconstruct(k: int, power: int) -> np.ndarray:
    """Vectorised reconstruction (the term count grows like k^power)."""
    n_max = k ** power
    target = target_diagonal(k, power)
    # number of i in [0, 2 n_max) with i <= n_max + n_j - 1
    plus = np.clip(n_max + target, 0, 2 * n_max)
    return plus - (2 * n_max - plus)  # = 2 * reconstructed, integer


# ---------------------------------------------------------------- z binary

def z_expansion(k: int, power: int) -> dict:
    """(Phi/delta_phi)^power as {frozenset(qubits): Fraction} over Z-strings.

    Phi/delta_phi = 1/2 I - 1/2 sum_{j=0}^{log2 k} 2^j Z_j.
    """
    if not is_pow2(k):
        raise NonPowerOfTwoCutoff(f"k={k} is not a power of two")
    nq = int(math.log2(2 * k))
    base = {frozenset(): Fraction(1, 2)}
    for j in range(nq):
        base[frozenset([j])] = Fraction(-(2 ** j), 2)
    out = {frozenset(): Fraction(1)}
    for _ in range(power):
        nxt = {}
        for sa, ca in out.items():
            for sb, cb in base.items():
                s = sa ^ sb
                nxt[s] = nxt.get(s, 0) + ca * cb
        out = {s: c for s, c in nxt.items() if c != 0}
    return out


def lcu_z_binary(k: int, power: int) -> LcuDecomposition:
    if power not in (1, 2, 4):
        raise ValueError("power must be 1, 2 or 4")
    exp = z_expansion(k, power)
    terms = []
    for s in sorted(exp, key=lambda s: (len(s), sorted(s))):
        terms.append((exp[s], _desc("pauli_z_product", indices=tuple(sorted(s)), k=k)))
    return LcuDecomposition("z_binary", power, k, terms)


# --------------------------------------------------------------- signature

def lcu_signature(k: int, power: int) -> LcuDecomposition:
    """Bit-plane split: diag = sum_l 2^(l-1) b_l, with b_l = (1 - U_l)/2."""
    if not is_pow2(k):
        raise NonPowerOfTwoCutoff(f"k={k} is not a power of two")
    if power not in (1, 2, 4):
        raise ValueError("power must be 2 or 4 (1 allowed for odd tests)")
    vals = target_diagonal(k, power)
    if vals.min() < 0:
        raise ValueError("signature family needs a nonnegative diagonal")
    nbits = int(vals.max()).bit_length()
    c0 = Fraction(0)
    terms = []
    for l in range(1, nbits + 1):
        plane = (vals >> (l - 1)) & 1
        if not plane.any():
            continue
        w = Fraction(2 ** (l - 1), 2)
        c0 += w
        terms.append((-w, _desc("signature_bits", bit=l, power=power, k=k)))
    out = [(c0, _desc("identity", k=k))] if c0 else []
    return LcuDecomposition("signature", power, k, out + terms)


def signature_active_bits(k: int, power: int) -> list:
    vals = target_diagonal(k, power)
    nbits = int(vals.max()).bit_length()
    return [l for l in range(1, nbits + 1) if ((vals >> (l - 1)) & 1).any()]


# ----------------------------------------------------------------- census

def census_values(n_max: int) -> range:
    """Integers present on the diagonal for k = n_max + 1: 1..n_max+1."""
    return range(1, n_max + 2)


def bit_pattern_census(power: int, n_max: int, bit: int) -> list:
    if n_max > 2 ** 20:
        raise ValueError("n_max too large")
    return [n for n in census_values(n_max) if (n ** power >> (bit - 1)) & 1]


def census_table(power: int, n_max: int) -> list:
    """Rows (bit, count, integers) for every bit up to the largest power."""
    top = ((n_max + 1) ** power).bit_length()
    return [(l, len(s), s) for l in range(1, top + 1)
            for s in [bit_pattern_census(power, n_max, l)]]


def binint_holds(n_max: int) -> bool:
    """b_l(n) = 1 iff n mod 2^l >= 2^(l-1)."""
    for n in range(n_max + 1):
        for l in range(1, n.bit_length() + 2):
            if bool((n >> (l - 1)) & 1) != (n % 2 ** l >= 2 ** (l - 1)):
                return False
    return True


def s1(l: int) -> set:
    return {j for j in range(1, 2 ** (l - 1)) if (j * j) % 2 ** l >= 2 ** (l - 1)}


def s2(l: int) -> set:
    return {j for j in range(1, 2 ** (l - 2)) if j ** 4 % 2 ** l >= 2 ** (l - 1)}


def binpattern_holds(power: int, n_max: int) -> bool:
    """Residue characterization of the bits of n^2 and n^4.

    power 2: b_1 = parity, b_2 = 0, and for l > 2 b_l(n^2) = 1 iff
    (n mod 2^(l-1)) is in S_1l.  power 4: b_2 = b_3 = b_4 = 0 and for
    l > 4 b_l(n^4) = 1 iff (n mod 2^(l-2)) is in S_2l.
    """
    top = (n_max ** power).bit_length()
    for n in range(n_max + 1):
        v = n ** power
        for l in range(1, top + 1):
            bit = (v >> (l - 1)) & 1
            if l == 1:
                want = n & 1
            elif power == 2 and l == 2:
                want = 0
            elif power == 4 and l in (2, 3, 4):
                want = 0
            else:
                want = int(_in_residue_set(n, l, power))
            if bit != want:
                return False
    return True


def _in_residue_set(n: int, l: int, power: int) -> bool:
    """Membership of n mod 2^(l-1) (power 2) or 2^(l-2) (power 4) in S_l."""
    r = n % 2 ** (l - 1 if power == 2 else l - 2)
    return r != 0 and (r ** power) % 2 ** l >= 2 ** (l - 1)


def reflection_holds(power: int, lmax: int) -> bool:
    for l in range(3 if power == 2 else 5, lmax + 1):
        S, span = (s1(l), 2 ** (l - 1)) if power == 2 else (s2(l), 2 ** (l - 2))
        if any((span - j) not in S for j in S):
            return False
    return True


def census_csv(power: int, n_max: int) -> str:
    lines = ["bit,count,integers"]
    for l, cnt, ints in census_table(power, n_max):
        body = " ".join(map(str, ints)) if ints else "-"
        lines.append(f"b{l},{cnt},{body}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------- l1 norms

def l1_norm_hamp(params: LatticeParams, cutoffs: AmplitudeCutoffs, variant: str) -> float:
    k, D = cutoffs.k, cutoffs.delta_phi
    M2, lam, d, W = params.M ** 2, params.Lambda, params.d, params.Omega
    if variant == "equal_weight":
        return W * (k ** 4 * D ** 4 * lam / 24 + k ** 2 * D ** 2 * (M2 + 3 * d + 1.5))
    if variant in ("z_binary", "z_binary_decomposition"):
        return abs(W) * (lam * D ** 4 * k ** 4 / 27
                         + k ** 2 * ((M2 + 7 * d + 1) / 3 * D ** 2 - 0.048611 * lam * D ** 4)
                         + k * (-3 * d * D ** 2 + 0.03125 * lam * D ** 4)
                         + D ** 2 * (-M2 + 8 * d - 4) / 6 - 0.0081019 * lam * D ** 4)
    if variant in ("signature", "signature_decomposition"):
        return (W / 4 * (k ** 2 * D ** 2 * (2 + M2 + d) + lam / 12 * k ** 4 * D ** 4)
                + 0.75 * params.E_D * D ** 2 * k ** 2)
    raise ValueError(f"unknown variant {variant!r}")
