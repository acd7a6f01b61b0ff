"""Amplitude-basis Hamiltonian: per-site field registers of 2k grid points.

Site x occupies qubits [x*q, (x+1)*q) with q = log2(2k); the full basis
index is sum_x b_x (2k)^x.  Field value of bin b is (b - k + 1) * delta_phi.
"""
from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .core import (ORACLE_MAX_QUBITS, AmplitudeCutoffs, ConfigError, LatticeParams,
                   TooManyQubits)


class NonPositiveEnergy(ConfigError):
    pass


def field_labels(k: int) -> np.ndarray:
    """Signed integer labels j = b - k + 1 for b = 0..2k-1."""
    return np.arange(2 * k) - k + 1


def dft(k: int) -> np.ndarray:
    """Unitary DFT on 2k points indexed by the signed labels.

    F[j, l] = exp(-2 pi i j l / 2k) / sqrt(2k) with j, l in field_labels(k).
    Using signed labels makes F symmetric and F^dag D F real for even D.
    """
    j = field_labels(k)
    return np.exp(-2j * np.pi * np.outer(j, j) / (2 * k)) / np.sqrt(2 * k)


def site_operators(cut: AmplitudeCutoffs) -> dict:
    """Single-site phi, phi^2, phi^4 (diagonal) and pi^2 (dense)."""
    phi = np.diag(cut.grid).astype(complex)
    F = dft(cut.k)
    phi2 = phi @ phi
    return {
        "phi": phi,
        "phi2": phi2,
        "phi4": phi2 @ phi2,
        "pi": F.conj().T @ phi @ F,
        "pi2": F.conj().T @ phi2 @ F,
        "F": F,
    }


def embed(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """op acting on ``site`` with identities elsewhere (site 0 least significant)."""
    dim = op.shape[0]
    left = np.eye(dim ** (n_sites - 1 - site))
    right = np.eye(dim ** site)
    return np.kron(np.kron(left, op), right)


def lattice_sites(params: LatticeParams) -> list:
    return list(itertools.product(range(params.P), repeat=params.d))


def lattice_edges(params: LatticeParams) -> list:
    """Periodic nearest-neighbour pairs (x, x + e_i) for every site and axis.

    There are d * Omega of them; for P <= 2 some pairs repeat or are
    self-loops, which is what the periodic sum over x and i gives.
    """
    sites = lattice_sites(params)
    index = {s: i for i, s in enumerate(sites)}
    edges = []
    for s in sites:
        for axis in range(params.d):
            t = list(s)
            t[axis] = (t[axis] + 1) % params.P
            edges.append((index[s], index[tuple(t)]))
    return edges


def site_coefficients(params: LatticeParams, mass_sq: float | None = None) -> dict:
    """Site/edge weights; ``mass_sq`` overrides M^2 (may be negative)."""
    m2 = params.M ** 2 if mass_sq is None else mass_sq
    return {"pi2": 0.5, "phi2": 0.5 * (m2 + params.d + 1),
            "phi4": params.Lambda / 24.0, "edge": -1.0}


@dataclass
class AmpHamiltonian:
    params: LatticeParams
    cutoffs: AmplitudeCutoffs
    site_blocks: dict
    edges: list
    coeff_1norm: float
    dense: np.ndarray | None = field(default=None, repr=False)
    mass_sq: float | None = None

    @property
    def n_sites(self) -> int:
        return self.params.Omega

    @property
    def n_qubits(self) -> int:
        return self.n_sites * self.cutoffs.qubits_per_site

    def local_site(self) -> np.ndarray:
        """One-site part 1/2 Pi^2 + 1/2 (M^2+d+1) Phi^2 + Lambda/24 Phi^4."""
        c = site_coefficients(self.params, self.mass_sq)
        b = self.site_blocks
        return c["pi2"] * b["pi2"] + c["phi2"] * b["phi2"] + c["phi4"] * b["phi4"]

    def kinetic(self) -> np.ndarray:
        n = self.n_sites
        return sum(0.5 * embed(self.site_blocks["pi2"], x, n) for x in range(n))

    def potential(self) -> np.ndarray:
        c = site_coefficients(self.params, self.mass_sq)
        b = self.site_blocks
        n = self.n_sites
        diag_site = np.real(np.diag(c["phi2"] * b["phi2"] + c["phi4"] * b["phi4"]))
        phi = np.real(np.diag(b["phi"]))
        total = np.zeros((2 * self.cutoffs.k) ** n)
        for x in range(n):
            total += _embed_diag(diag_site, x, n)
        for x, y in self.edges:
            total -= _embed_diag(phi, x, n) * _embed_diag(phi, y, n)
        return np.diag(total).astype(complex)


def _embed_diag(vec: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    dim = len(vec)
    return np.kron(np.kron(np.ones(dim ** (n_sites - 1 - site)), vec), np.ones(dim ** site))


def equal_weight_alpha(params: LatticeParams, cut: AmplitudeCutoffs) -> float:
    """Coefficient 1-norm in the closed form quoted for the equal-weight LCU."""
    k, D = cut.k, cut.delta_phi
    return params.Omega * (k ** 4 * D ** 4 * params.Lambda / 24
                           + k ** 2 * D ** 2 * (params.M ** 2 + 3 * params.d + 1.5))


def build_amp_hamiltonian(params: LatticeParams, cutoffs: AmplitudeCutoffs,
                          dense: bool = True, mass_sq: float | None = None) -> AmpHamiltonian:
    cutoffs.require_pow2()
    blocks = site_operators(cutoffs)
    h = AmpHamiltonian(params=params, cutoffs=cutoffs, site_blocks=blocks,
                       edges=lattice_edges(params),
                       coeff_1norm=equal_weight_alpha(params, cutoffs), mass_sq=mass_sq)
    if dense:
        nq = h.n_qubits
        if nq > ORACLE_MAX_QUBITS:
            raise TooManyQubits(f"{nq} qubits exceeds dense cap {ORACLE_MAX_QUBITS}")
        h.dense = h.kinetic() + h.potential()
    return h


def phi_max_for_energy(E_max: float, eps: float, params: LatticeParams,
                       d: int | None = None) -> float:
    """Field cutoff holding the tail probability below eps for energies <= E_max."""
    if E_max <= 0:
        raise NonPositiveEnergy("E_max must be positive")
    if not 0 < eps < 1:
        raise ConfigError("eps must lie in (0, 1)")
    d = params.d if d is None else d
    C = params.M ** 2 + 3 * d + params.Lambda / 24 + 1.5
    return (eps * E_max / (C * params.Omega)) ** 0.25


# ------------------------------------------------------------------ sectors

@dataclass(frozen=True)
class SectorProjector:
    k: int
    n_sites: int

    @property
    def site_perm(self) -> np.ndarray:
        b = np.arange(2 * self.k)
        out = 2 * self.k - 2 - b
        out[-1] = 2 * self.k - 1
        return out

    def symmetric_basis(self) -> np.ndarray:
        """Basis indices with no site on the unpaired bin b = 2k - 1."""
        dim = 2 * self.k
        ok = [i for i in range(dim ** self.n_sites)
              if all((i // dim ** x) % dim != dim - 1 for x in range(self.n_sites))]
        return np.array(ok, dtype=np.int64)

    def global_perm(self) -> np.ndarray:
        dim = 2 * self.k
        perm = self.site_perm
        idx = np.arange(dim ** self.n_sites)
        out = np.zeros_like(idx)
        for x in range(self.n_sites):
            digit = (idx // dim ** x) % dim
            out += perm[digit] * dim ** x
        return out

    def matrix(self) -> np.ndarray:
        perm = self.global_perm()
        U = np.zeros((len(perm), len(perm)))
        U[perm, np.arange(len(perm))] = 1.0
        return U

    def projector(self, parity: int) -> np.ndarray:
        U = self.matrix()
        return 0.5 * (np.eye(len(U)) + parity * U)


def sector_bases(proj: SectorProjector) -> tuple:
    """Orthonormal bases (columns) of the even and odd subspaces within the symmetric set."""
    sym = proj.symmetric_basis()
    perm = proj.global_perm()
    dim = (2 * proj.k) ** proj.n_sites
    even, odd = [], []
    seen = set()
    for i in sym:
        if i in seen:
            continue
        j = int(perm[i])
        seen.update((int(i), j))
        v = np.zeros(dim)
        if j == i:
            v[i] = 1.0
            even.append(v)
            continue
        v[i] = v[j] = 1 / math.sqrt(2)
        even.append(v)
        w = np.zeros(dim)
        w[i], w[j] = 1 / math.sqrt(2), -1 / math.sqrt(2)
        odd.append(w)
    return np.array(even).T, np.array(odd).T


def sector_split(h: AmpHamiltonian) -> tuple:
    """Eigenvalues of H on the even and odd subspaces of the symmetric grid."""
    if h.dense is None:
        raise TooManyQubits("dense realization required")
    proj = SectorProjector(h.cutoffs.k, h.n_sites)
    Ve, Vo = sector_bases(proj)
    ev = np.linalg.eigvalsh(Ve.T @ h.dense @ Ve) if Ve.size else np.array([])
    od = np.linalg.eigvalsh(Vo.T @ h.dense @ Vo) if Vo.size else np.array([])
    return np.sort(ev.real), np.sort(od.real)


def symmetric_restriction(h: AmpHamiltonian) -> np.ndarray:
    sym = SectorProjector(h.cutoffs.k, h.n_sites).symmetric_basis()
    return h.dense[np.ix_(sym, sym)]


# --------------------------------------------------------- controlled negation

def controlled_negation_cost(cutoffs: AmplitudeCutoffs, Omega: int, reuse: bool = True):
    from .arith import ResourceCount
    cutoffs.require_pow2()
    m = cutoffs.qubits_per_site
    per_site = 2 * m * (m + 1) - 8
    if reuse:
        anc = (m * m - m - 4) // 2
    else:
        anc = Omega * (m * m - m - 6) // 2 + 1
    return ResourceCount(t=Omega * per_site, ancilla=max(anc, 0))


# ------------------------------------------------------------- serialization

DENSE_MAGIC = b"PHI4DENS"


def write_dense(path, mat: np.ndarray) -> None:
    """16-byte header (8-byte magic, uint64 dim) then column-major complex128."""
    mat = np.asarray(mat, dtype=np.complex128)
    with open(path, "wb") as fh:
        fh.write(DENSE_MAGIC + struct.pack("<Q", mat.shape[0]))
        fh.write(np.asfortranarray(mat).tobytes(order="F"))


def read_dense(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if head[:8] != DENSE_MAGIC:
            raise ValueError("not a dense operator file")
        (dim,) = struct.unpack("<Q", head[8:])
        data = np.frombuffer(fh.read(), dtype=np.complex128)
    return data.reshape((dim, dim), order="F")
