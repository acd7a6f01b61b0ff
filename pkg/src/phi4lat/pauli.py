"""Weighted Pauli strings with a dense/sparse matrix realization.

Qubit q is bit q of the computational-basis index (bit 0 least significant).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import ORACLE_MAX_QUBITS, TooManyQubits

# single-qubit products: (a, b) -> (phase, result) with a*b = phase*result
_MUL = {
    ("X", "X"): (1, "I"), ("Y", "Y"): (1, "I"), ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


@dataclass(frozen=True)
class PauliTerm:
    coeff: float
    factors: tuple  # ((qubit, "X"|"Y"|"Z"), ...) strictly increasing qubits

    def __post_init__(self):
        qs = [q for q, _ in self.factors]
        if any(b <= a for a, b in zip(qs, qs[1:])):
            raise ValueError("qubit indices must be strictly increasing")
        if any(p not in "XYZ" or len(p) != 1 for _, p in self.factors):
            raise ValueError("pauli labels must be X, Y or Z")


def _mul_strings(a: tuple, b: tuple):
    da, db = dict(a), dict(b)
    phase = 1
    out = {}
    for q in set(da) | set(db):
        pa, pb = da.get(q), db.get(q)
        if pa is None:
            out[q] = pb
        elif pb is None:
            out[q] = pa
        else:
            ph, r = _MUL.get((pa, pb), (1, "I")) if pa != pb else (1, "I")
            phase *= ph
            if r != "I":
                out[q] = r
    return phase, tuple(sorted(out.items()))


class PauliSum:
    """Immutable-by-convention map from Pauli strings to coefficients."""

    def __init__(self, terms=None, n_qubits: int = 0):
        self._terms: dict = {}
        self.n_qubits = int(n_qubits)
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for key, c in items:
                if isinstance(key, PauliTerm):
                    key, c = key.factors, key.coeff
                key = tuple(sorted((int(q), str(p)) for q, p in key))
                self._add(key, c)
        top = max((q for key in self._terms for q, _ in key), default=-1)
        if top >= self.n_qubits:
            self.n_qubits = top + 1

    def _add(self, key, c):
        self._terms[key] = self._terms.get(key, 0) + c

    # construction helpers
    @classmethod
    def identity(cls, coeff=1.0, n_qubits=0):
        return cls({(): coeff}, n_qubits)

    @classmethod
    def single(cls, coeff, factors, n_qubits=0):
        return cls({tuple(factors): coeff}, n_qubits)

    @property
    def terms(self) -> list:
        out = []
        for key in sorted(self._terms):
            c = self._terms[key]
            out.append(PauliTerm(float(np.real(c)), key))
        return out

    def items(self):
        return sorted(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def coeff(self, factors) -> complex:
        key = tuple(sorted((int(q), p) for q, p in factors))
        return self._terms.get(key, 0)

    def copy(self):
        return PauliSum(dict(self._terms), self.n_qubits)

    def simplify(self, tol: float = 1e-14) -> "PauliSum":
        return PauliSum({k: c for k, c in self._terms.items() if abs(c) > tol}, self.n_qubits)

    def is_real(self, tol: float = 1e-12) -> bool:
        return all(abs(np.imag(c)) <= tol for c in self._terms.values())

    def __add__(self, other):
        if not isinstance(other, PauliSum):
            other = PauliSum.identity(other)
        out = PauliSum(dict(self._terms), max(self.n_qubits, other.n_qubits))
        for k, c in other._terms.items():
            out._add(k, c)
        return out

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other if isinstance(other, PauliSum) else -other)

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            out = PauliSum(n_qubits=max(self.n_qubits, other.n_qubits))
            for ka, ca in self._terms.items():
                for kb, cb in other._terms.items():
                    ph, key = _mul_strings(ka, kb)
                    out._add(key, ph * ca * cb)
            return out
        return PauliSum({k: c * other for k, c in self._terms.items()}, self.n_qubits)

    __rmul__ = __mul__

    def __repr__(self):
        return f"PauliSum({len(self)} terms, n_qubits={self.n_qubits})"

    # text format: "coeff q:P q:P ..."
    def to_text(self) -> str:
        lines = []
        for key, c in self.items():
            body = " ".join(f"{q}:{p}" for q, p in key)
            lines.append(f"{float(np.real(c))!r} {body}".rstrip())
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, n_qubits: int = 0):
        out = cls(n_qubits=n_qubits)
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            key = tuple(sorted((int(f.split(":")[0]), f.split(":")[1]) for f in parts[1:]))
            out._add(key, float(parts[0]))
        top = max((q for k in out._terms for q, _ in k), default=-1)
        out.n_qubits = max(out.n_qubits, top + 1)
        return out


def _term_action(key, n):
    """Return (flip_mask, z_mask, y_count) for a Pauli string."""
    xm = zm = ny = 0
    for q, p in key:
        if p in "XY":
            xm |= 1 << q
        if p in "YZ":
            zm |= 1 << q
        if p == "Y":
            ny += 1
    return xm, zm, ny


def _parity(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    out = np.zeros_like(x)
    while np.any(x):
        out ^= x & 1
        x >>= 1
    return out


def to_sparse(ps: PauliSum, basis: np.ndarray | None = None, n_qubits: int | None = None):
    """Sparse matrix of ps; if ``basis`` (sorted index array) is given, restrict to it.

    Restriction is exact for operators that map span(basis) into itself.
    """
    n = ps.n_qubits if n_qubits is None else max(n_qubits, ps.n_qubits)
    if basis is None:
        if n > 24:
            raise TooManyQubits(f"{n} qubits")
        cols = np.arange(2 ** n, dtype=np.int64)
    else:
        cols = np.asarray(basis, dtype=np.int64)
    dim = len(cols)
    rows_all, cols_all, vals_all = [], [], []
    pos = None
    if basis is not None:
        lookup = {int(b): i for i, b in enumerate(cols)}
    for key, c in ps._terms.items():
        if c == 0:
            continue
        xm, zm, ny = _term_action(key, n)
        out = cols ^ xm
        # Y = i X Z acting on |b>: i * (-1)^b |b^1>
        sign = 1 - 2 * _parity(cols & zm)
        val = c * (1j ** ny) * sign
        if basis is None:
            r = out
            keep = np.ones(dim, dtype=bool)
        else:
            r = np.array([lookup.get(int(o), -1) for o in out], dtype=np.int64)
            keep = r >= 0
        rows_all.append(r[keep])
        cols_all.append(np.arange(dim)[keep])
        vals_all.append(val[keep])
    if not rows_all:
        return sp.csr_matrix((dim, dim), dtype=complex)
    m = sp.coo_matrix((np.concatenate(vals_all).astype(complex),
                       (np.concatenate(rows_all), np.concatenate(cols_all))), shape=(dim, dim))
    return m.tocsr()


def to_dense(ps: PauliSum, n_qubits: int | None = None) -> np.ndarray:
    n = ps.n_qubits if n_qubits is None else max(n_qubits, ps.n_qubits)
    if n > ORACLE_MAX_QUBITS:
        raise TooManyQubits(f"{n} qubits exceeds dense cap {ORACLE_MAX_QUBITS}")
    return to_sparse(ps, n_qubits=n).toarray()


def unary_basis(n_modes: int, width: int) -> np.ndarray:
    """Indices of states with exactly one set bit in each width-bit register."""
    idx = np.zeros(1, dtype=np.int64)
    for p in range(n_modes):
        one_hot = np.array([1 << (p * width + n) for n in range(width)], dtype=np.int64)
        idx = (idx[None, :] + one_hot[:, None]).ravel()
    return np.sort(idx)


def unary_state_index(occupations, width: int) -> int:
    return sum(1 << (p * width + n) for p, n in enumerate(occupations))


def restricted(ps: PauliSum, subspace: str = "full", register_width: int | None = None,
               n_modes: int | None = None) -> np.ndarray:
    if subspace == "full":
        return to_dense(ps)
    if subspace != "unary":
        raise ValueError(f"unknown subspace {subspace!r}")
    if register_width is None:
        raise ValueError("unary subspace needs register_width")
    if n_modes is None:
        n_modes = -(-ps.n_qubits // register_width)
    basis = unary_basis(n_modes, register_width)
    if len(basis) > 2 ** ORACLE_MAX_QUBITS:
        raise TooManyQubits(f"unary subspace dimension {len(basis)}")
    return to_sparse(ps, basis=basis, n_qubits=n_modes * register_width).toarray()


def spectral_norm(ps: PauliSum, subspace: str = "full", register_width: int | None = None,
                  n_modes: int | None = None) -> float:
    mat = restricted(ps, subspace, register_width, n_modes)
    if mat.size == 0:
        return 0.0
    return float(np.linalg.norm(mat, 2))


def commutator_norm(a: PauliSum, b: PauliSum, subspace: str = "full",
                    register_width: int | None = None, n_modes: int | None = None) -> float:
    n = max(a.n_qubits, b.n_qubits)
    if n_modes is None and register_width:
        n_modes = -(-n // register_width)
    A = restricted(PauliSum(dict(a._terms), n), subspace, register_width, n_modes)
    B = restricted(PauliSum(dict(b._terms), n), subspace, register_width, n_modes)
    return float(np.linalg.norm(A @ B - B @ A, 2))


def is_hermitian(mat: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.allclose(mat, mat.conj().T, atol=tol, rtol=0))
