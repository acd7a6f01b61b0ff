"""Block encodings of the amplitude Hamiltonian.

Two layers: closed-form gate tallies used for costing, and dense LCU
realizations (PREP, SELECT, walk) at oracle sizes used for verification.
A dense LCU is a list of (c_i >= 0, U_i) with signs folded into U_i; every U_i
here is a Hermitian +-1 diagonal or its Fourier conjugate, so SELECT is an
involution.  Index register is the high part of the full basis index.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .amp_model import AmpHamiltonian, _embed_diag, dft, embed, lattice_edges
from .core import (ORACLE_MAX_QUBITS, AmplitudeCutoffs, ConfigError, LatticeParams,
                   TooManyQubits)
from .lcu import (l1_norm_hamp, lcu_equal_weight, lcu_signature, lcu_z_binary,
                  signature_active_bits, z_expansion)

ALGORITHMS = ("I_equal_weight", "IIIa_z_lcu", "IIIb_signature")


class ConjectureFlagRequired(RuntimeError):
    pass


class MissingDense(RuntimeError):
    pass


class SelectNotInvolution(RuntimeError):
    pass


# ----------------------------------------------------------------- PREP_F

def build_prep_f(params: LatticeParams) -> np.ndarray:
    """Amplitudes on |00>,|01>,|10>,|11> for weights (1/2, M^2+d+1, Lambda/24, 2)."""
    w = np.array([0.5, params.M ** 2 + params.d + 1, params.Lambda / 24.0, 2.0])
    if np.any(w < 0):
        raise ConfigError("PREP weights must be nonnegative")
    return np.sqrt(w / w.sum())


# --------------------------------------------------------- closed-form tallies

def _lg(x: float) -> float:
    return math.log2(x)


def aqft_t(n: float, eps: float) -> float:
    """T-count of an n-qubit approximate QFT at error eps."""
    if n < 1 or not 0 < eps < 1:
        raise ValueError("need n >= 1 and 0 < eps < 1")
    a = _lg(n / eps)
    return 8 * n * a + a * _lg(a / eps)


def alg1_family_counts(Omega: int, D: int, k: float, main_text_phi4: bool = False,
                       eps_aqft: float | None = None) -> dict:
    """T-counts of the four SELECT families of the equal-weight encoding.

    The pi2 entry excludes its two AQFTs unless ``eps_aqft`` is given.
    ``main_text_phi4`` switches to the shorter (and for small k negative)
    phi^4 formula.
    """
    L = _lg(k)
    phiphi = 4 * Omega * (2 * D + L + 2) - 4
    phi2 = 8 * Omega * (4 * L * L + 11 * L + 1) - 4
    if main_text_phi4:
        phi4 = 8 * Omega * (L * L - 6 * L - 7) - 4
    else:
        phi4 = 2 * Omega * (20 * L * L + 38 * L + 2 * _lg(Omega) + 15)
    pi2 = phi2
    if eps_aqft is not None:
        pi2 += 2 * Omega * aqft_t(_lg(2 * k), eps_aqft)
    return {"phiphi": phiphi, "phi2": phi2, "pi2": pi2, "phi4": phi4}


def alg1_tallies(Omega: int, D: int, k: float) -> dict:
    L = _lg(k)
    n_plus = 72 * Omega * L * L + 168 * Omega * L + 8 * Omega * D - 32 * Omega - 16
    ancilla = 18 * L * L + 60 * L + _lg(Omega * D) + 29
    return {"n_plus": n_plus, "n_r": 24, "n_f": 2 * Omega, "ancilla": ancilla,
            "system": Omega * _lg(2 * k)}


def lcu_lengths(k: float) -> tuple:
    l = _lg(k) + 1
    return l, l * (l - 1) / 2, l * (l - 1) * (l - 2) / 6, l * (l - 1) * (l - 2) * (l - 3) / 24, l * l


def alg3a_tallies(Omega: int, E_D: int, k: float) -> dict:
    L1, L2, L3, L4, L5 = lcu_lengths(k)
    A, B = L1 + L2, L3 + L4

    def grp(x, t):
        return 4 * math.sqrt(x) * (_lg(x) - 2) + t * x if x > 0 else 0.0

    n_plus = (Omega * (grp(A, 12) + grp(B, 12)) + E_D * grp(L5, 8)
              + grp(Omega, 4) + grp(E_D, 4))
    n_r = 4 * A + 2 * B + 2 * L5 - 4
    ancilla = _lg(Omega) + (_lg(_lg(k)) if k > 2 else 0.0)
    return {"n_plus": n_plus, "n_r": n_r, "n_f": 2 * Omega, "ancilla": ancilla,
            "system": Omega * _lg(2 * k)}


def conjecture_signature_t(k: int, kappa: float = 4.0) -> float:
    """Per-site T for the signature matrices under the min(l, log2 k) shape."""
    lk = _lg(k)
    s2 = sum(min(l, lk) for l in signature_active_bits(k, 2))
    s4 = sum(min(l, lk) for l in signature_active_bits(k, 4))
    return kappa * (2 * s2 + s4)  # phi^2 and pi^2 share the power-2 planes


def alg3b_tallies(Omega: int, E_D: int, k: float, conjecture: bool = False,
                  kappa: float = 4.0) -> dict:
    lk = _lg(k)
    l1 = lk + 1

    def grp(x, t):
        return 4 * math.sqrt(x) * (_lg(x) - 2) + t

    proven = (Omega * (grp(2 * lk, 8 * lk) + grp(4 * lk, 16 * lk))
              + 4 * math.sqrt(Omega) * (_lg(Omega) - 2) + 4 * Omega
              + E_D * (8 * l1 * (_lg(l1) - 1) + 4 * l1 * l1 + 4)
              + 4 * math.sqrt(E_D) * (_lg(E_D) - 2))
    out = {"n_plus_proven": proven, "n_r": 12 * lk + 2 * l1 * l1 - 3, "n_f": 2 * Omega,
           "ancilla": _lg(Omega) + _lg(l1) + 2, "system": Omega * _lg(2 * k),
           "n_plus": None}
    if conjecture:
        out["conjecture_t"] = Omega * conjecture_signature_t(int(round(k)), kappa)
        out["n_plus"] = proven + out["conjecture_t"]
    return out


# ---------------------------------------------------------------- containers

@dataclass
class BlockEncoding:
    algorithm: str
    alpha: float
    ancilla_qubits: float
    t_count: float | None
    rz_count: float
    aqft_count: int
    lcu_terms: list | None = field(default=None, repr=False)  # [(c >= 0, dense U)]
    dense_prep: np.ndarray | None = field(default=None, repr=False)
    dense_select: np.ndarray | None = field(default=None, repr=False)
    dense_alpha: float | None = None
    system_dim: int | None = None
    extra: dict = field(default_factory=dict)

    def require_totals(self) -> float:
        if self.t_count is None:
            raise ConjectureFlagRequired(
                f"{self.algorithm} totals need the conjecture flag")
        return self.t_count

    @property
    def index_dim(self) -> int:
        return self.dense_prep.shape[0] if self.dense_prep is not None else 0

    def g_state(self) -> np.ndarray:
        if self.dense_prep is None:
            raise MissingDense("no dense PREP")
        return self.dense_prep[:, 0]

    def to_json(self) -> str:
        return json.dumps({"algorithm": self.algorithm, "alpha": self.alpha,
                           "t_count": self.t_count, "rz_count": self.rz_count,
                           "aqft_count": self.aqft_count,
                           "ancilla_qubits": self.ancilla_qubits}, sort_keys=True)


@dataclass
class WalkOperator:
    dense: np.ndarray
    alpha: float
    source: BlockEncoding
    phase_mismatch: float = float("nan")


# ------------------------------------------------------------ dense LCU terms

def _site_diag_ops(cut: AmplitudeCutoffs, n_sites: int):
    """Helpers mapping per-site +-1 diagonals to full-space diagonals."""
    def on_site(diag, x):
        return _embed_diag(np.asarray(diag, dtype=float), x, n_sites)
    return on_site


def _append(terms, coeff, U):
    if coeff == 0:
        return
    if coeff < 0:
        coeff, U = -coeff, -U
    terms.append((float(coeff), U))


def _as_matrix(diag_or_mat) -> np.ndarray:
    a = np.asarray(diag_or_mat)
    return np.diag(a).astype(complex) if a.ndim == 1 else a.astype(complex)


def _fourier_site(diag: np.ndarray, x: int, n_sites: int, k: int) -> np.ndarray:
    F = dft(k)
    return embed(F.conj().T @ np.diag(diag) @ F, x, n_sites)


def terms_equal_weight(params: LatticeParams, cut: AmplitudeCutoffs) -> list:
    """Unmerged threshold-signature terms (one per comparator branch)."""
    k, D = cut.k, cut.delta_phi
    n = params.Omega
    on_site = _site_diag_ops(cut, n)
    phi1 = [(float(c), u.diagonal()) for c, u in lcu_equal_weight(k, 1).terms]
    phi2 = [(float(c), u.diagonal()) for c, u in lcu_equal_weight(k, 2).terms]
    phi4 = [(float(c), u.diagonal()) for c, u in lcu_equal_weight(k, 4).terms]
    m2 = params.M ** 2 + params.d + 1
    terms = []
    for x in range(n):
        for c, d in phi2:
            _append(terms, 0.5 * D * D * c, _fourier_site(d, x, n, k))
            _append(terms, 0.5 * m2 * D * D * c, _as_matrix(on_site(d, x)))
        for c, d in phi4:
            _append(terms, params.Lambda / 24 * D ** 4 * c, _as_matrix(on_site(d, x)))
    for x, y in lattice_edges(params):
        for ca, da in phi1:
            for cb, db in phi1:
                _append(terms, -D * D * ca * cb, _as_matrix(on_site(da, x) * on_site(db, y)))
    return terms


def _merge(acc: dict, key, coeff):
    acc[key] = acc.get(key, 0.0) + coeff


def _finish_merged(acc: dict, params: LatticeParams, cut: AmplitudeCutoffs,
                   site_diag_fn, fourier_diag_fn) -> list:
    n = params.Omega
    terms = []
    dim = (2 * cut.k) ** n
    for key, c in sorted(acc.items(), key=lambda kv: repr(kv[0])):
        if abs(c) < 1e-15:
            continue
        kind, payload = key
        if kind == "I":
            U = np.eye(dim, dtype=complex)
        elif kind == "D":
            full = np.ones(dim)
            for x, sub in payload:
                full = full * _embed_diag(site_diag_fn(sub).astype(float), x, n)
            U = _as_matrix(full)
        else:  # Fourier-conjugated single-site term
            x, sub = payload
            U = _fourier_site(fourier_diag_fn(sub), x, n, cut.k)
        _append(terms, c, U)
    return terms


def _z_diag(k):
    b = np.arange(2 * k)

    def f(s):
        out = np.ones(2 * k)
        for q in s:
            out *= 1 - 2 * ((b >> q) & 1)
        return out
    return f


def terms_z_binary(params: LatticeParams, cut: AmplitudeCutoffs, coeffs_only: bool = False):
    """Z-string decomposition with like terms and all identities merged."""
    k, D = cut.k, cut.delta_phi
    z1, z2, z4 = (z_expansion(k, p) for p in (1, 2, 4))
    m2 = params.M ** 2 + params.d + 1
    acc = {}

    def add_diag(x_to_set, c):
        parts = tuple(sorted((x, s) for x, s in x_to_set if s))
        _merge(acc, ("I", ()) if not parts else ("D", parts), c)

    for x in range(params.Omega):
        for s, c in z2.items():
            if s:
                _merge(acc, ("F", (x, s)), 0.5 * D * D * float(c))
            else:
                _merge(acc, ("I", ()), 0.5 * D * D * float(c))
            add_diag([(x, s)], 0.5 * m2 * D * D * float(c))
        for s, c in z4.items():
            add_diag([(x, s)], params.Lambda / 24 * D ** 4 * float(c))
    for x, y in lattice_edges(params):
        if x == y:
            for s, c in z2.items():
                add_diag([(x, s)], -D * D * float(c))
            continue
        for sa, ca in z1.items():
            for sb, cb in z1.items():
                add_diag([(x, sa), (y, sb)], -D * D * float(ca * cb))
    if coeffs_only:
        return acc
    return _finish_merged(acc, params, cut, _z_diag(k), _z_diag(k))


def terms_signature(params: LatticeParams, cut: AmplitudeCutoffs, coeffs_only: bool = False):
    """Signature planes for phi^2, phi^4 (and pi^2 by conjugation); Z strings for phi phi'."""
    k, D = cut.k, cut.delta_phi
    sig2 = [(float(c), u) for c, u in lcu_signature(k, 2).terms]
    sig4 = [(float(c), u) for c, u in lcu_signature(k, 4).terms]
    z1, z2 = z_expansion(k, 1), z_expansion(k, 2)
    m2 = params.M ** 2 + params.d + 1
    acc = {}
    zd = _z_diag(k)

    def sig_key(u):
        p = u.params()
        return ("sig", p["power"], p["bit"])

    for x in range(params.Omega):
        for c, u in sig2:
            if u.kind == "identity":
                _merge(acc, ("I", ()), (0.5 + 0.5 * m2) * D * D * c)
                continue
            _merge(acc, ("F", (x, sig_key(u))), 0.5 * D * D * c)
            _merge(acc, ("D", ((x, sig_key(u)),)), 0.5 * m2 * D * D * c)
        for c, u in sig4:
            key = ("I", ()) if u.kind == "identity" else ("D", ((x, sig_key(u)),))
            _merge(acc, key, params.Lambda / 24 * D ** 4 * c)
    for x, y in lattice_edges(params):
        if x == y:
            for c, u in sig2:
                key = ("I", ()) if u.kind == "identity" else ("D", ((x, sig_key(u)),))
                _merge(acc, key, -D * D * c)
            continue
        for sa, ca in z1.items():
            for sb, cb in z1.items():
                parts = tuple(sorted((s_x, ("z", tuple(sorted(s)))) for s_x, s in
                                     ((x, sa), (y, sb)) if s))
                _merge(acc, ("I", ()) if not parts else ("D", parts), -D * D * float(ca * cb))
    del z2
    if coeffs_only:
        return acc

    def site_diag(sub):
        if sub[0] == "z":
            return zd(sub[1])
        _, power, bit = sub
        vals = (np.arange(2 * k) - k + 1) ** power
        return (1 - 2 * ((vals >> (bit - 1)) & 1)).astype(float)

    return _finish_merged(acc, params, cut, site_diag, site_diag)


def exact_alpha(algorithm: str, params: LatticeParams, cut: AmplitudeCutoffs) -> float:
    """Coefficient 1-norm of the dense LCU actually assembled for ``algorithm``."""
    if algorithm == "I_equal_weight":
        k, D = cut.k, cut.delta_phi
        return params.Omega * (params.Lambda * k ** 4 * D ** 4 / 24
                               + k * k * D * D * (params.M ** 2 / 2 + 1.5 * params.d + 1))
    builder = {"IIIa_z_lcu": terms_z_binary, "IIIb_signature": terms_signature}[algorithm]
    return float(sum(abs(c) for c in builder(params, cut, coeffs_only=True).values()))


_TERM_BUILDERS = {"I_equal_weight": terms_equal_weight, "IIIa_z_lcu": terms_z_binary,
                  "IIIb_signature": terms_signature}


# --------------------------------------------------------- dense assembly

def householder_prep(amplitudes: np.ndarray) -> np.ndarray:
    """Real reflection mapping |0> to the given normalized state."""
    g = np.asarray(amplitudes, dtype=complex)
    g = g / np.linalg.norm(g)
    e0 = np.zeros_like(g)
    e0[0] = 1
    v = e0 - g
    nv = np.vdot(v, v).real
    if nv < 1e-30:
        return np.eye(len(g), dtype=complex)
    return np.eye(len(g), dtype=complex) - 2 * np.outer(v, v.conj()) / nv


def assemble_dense(terms: list, system_dim: int):
    """(PREP, SELECT, alpha) for an LCU term list with nonnegative coefficients."""
    n_terms = max(len(terms), 1)
    idx_q = max(1, math.ceil(math.log2(n_terms)))
    sys_q = int(round(math.log2(system_dim)))
    if idx_q + sys_q > ORACLE_MAX_QUBITS:
        raise TooManyQubits(f"{idx_q + sys_q} qubits exceeds dense cap {ORACLE_MAX_QUBITS}")
    T = 2 ** idx_q
    coeffs = np.zeros(T)
    for i, (c, _) in enumerate(terms):
        coeffs[i] = c
    alpha = float(coeffs.sum())
    amps = np.sqrt(coeffs / alpha) if alpha > 0 else np.eye(T)[0]
    prep = householder_prep(amps)
    select = np.zeros((T * system_dim, T * system_dim), dtype=complex)
    for i in range(T):
        U = terms[i][1] if i < len(terms) else np.eye(system_dim, dtype=complex)
        sl = slice(i * system_dim, (i + 1) * system_dim)
        select[sl, sl] = U
    return prep, select, alpha


def build_block_encoding(algorithm: str, params: LatticeParams, cutoffs: AmplitudeCutoffs,
                         dense: bool = False, conjecture: bool = False,
                         kappa: float = 4.0) -> BlockEncoding:
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    k, W, E_D = cutoffs.k, params.Omega, params.E_D
    if algorithm == "I_equal_weight":
        tal = alg1_tallies(W, params.d, k)
        alpha = l1_norm_hamp(params, cutoffs, "equal_weight")
        tal["families"] = alg1_family_counts(W, params.d, k)
    elif algorithm == "IIIa_z_lcu":
        tal = alg3a_tallies(W, E_D, k)
        alpha = l1_norm_hamp(params, cutoffs, "z_binary")
    else:
        tal = alg3b_tallies(W, E_D, k, conjecture, kappa)
        alpha = l1_norm_hamp(params, cutoffs, "signature")
    be = BlockEncoding(algorithm=algorithm, alpha=float(alpha), ancilla_qubits=tal["ancilla"],
                       t_count=tal["n_plus"], rz_count=tal["n_r"], aqft_count=tal["n_f"],
                       extra=tal)
    if dense:
        cutoffs.require_pow2()
        sys_dim = (2 * k) ** W
        if W * cutoffs.qubits_per_site > ORACLE_MAX_QUBITS:
            raise TooManyQubits("system register exceeds dense cap")
        terms = _TERM_BUILDERS[algorithm](params, cutoffs)
        be.lcu_terms = terms
        be.dense_prep, be.dense_select, be.dense_alpha = assemble_dense(terms, sys_dim)
        be.system_dim = sys_dim
    return be


def dense_from_terms(algorithm: str, terms: list, system_dim: int, **kw) -> BlockEncoding:
    prep, select, alpha = assemble_dense(terms, system_dim)
    return BlockEncoding(algorithm=algorithm, alpha=alpha, ancilla_qubits=kw.get("ancilla", 0),
                         t_count=kw.get("t_count", 0), rz_count=kw.get("rz_count", 0),
                         aqft_count=kw.get("aqft_count", 0), lcu_terms=terms,
                         dense_prep=prep, dense_select=select, dense_alpha=alpha,
                         system_dim=system_dim)


def block_of(be: BlockEncoding) -> np.ndarray:
    """(<G| x I) SELECT (|G> x I)."""
    if be.dense_select is None:
        raise MissingDense("dense realization required")
    g = be.g_state()
    S = be.system_dim
    T = len(g)
    sel = be.dense_select.reshape(T, S, T, S)
    return np.einsum("i,iajb,j->ab", g.conj(), sel, g)


def verify_block_identity(be: BlockEncoding, h) -> float:
    if be.dense_select is None:
        raise MissingDense("dense realization required")
    H = h.dense if isinstance(h, AmpHamiltonian) else np.asarray(h)
    if H is None:
        raise MissingDense("Hamiltonian has no dense form")
    return float(np.linalg.norm(block_of(be) - H / be.dense_alpha, 2))


def build_walk(be: BlockEncoding, h=None) -> WalkOperator:
    """W = (2|G><G| x I - I) SELECT; checks eigenphases against arccos(E/alpha)."""
    if be.dense_select is None:
        raise MissingDense("dense realization required")
    T, D = len(be.g_state()), be.system_dim
    blocks = be.dense_select.reshape(T, D, T, D)
    diag_blocks = np.stack([blocks[i, :, i, :] for i in range(T)])
    # SELECT is block diagonal, so SELECT^2 = I iff every block squares to I
    sq = np.einsum("iab,ibc->iac", diag_blocks, diag_blocks)
    off = blocks.copy()
    for i in range(T):
        off[i, :, i, :] = 0
    if np.abs(sq - np.eye(D)).max() > 1e-10 or np.abs(off).max() > 0:
        raise SelectNotInvolution("SELECT^2 != I")
    g = be.g_state()
    refl = 2 * np.outer(g, g.conj()) - np.eye(T)
    W = (refl[:, None, :, None] * diag_blocks.transpose(1, 0, 2)[None, :, :, :]).reshape(T * D, T * D)
    walk = WalkOperator(dense=W, alpha=be.dense_alpha, source=be)
    if h is not None:
        H = h.dense if isinstance(h, AmpHamiltonian) else np.asarray(h)
        walk.phase_mismatch = walk_phase_mismatch(walk, H)
    return walk


def walk_phase_mismatch(walk: WalkOperator, H: np.ndarray) -> float:
    """Max deviation of walk eigenphases on each qubitized 2-D subspace from +-arccos(E/alpha)."""
    evals, evecs = np.linalg.eigh(H)
    g = walk.source.g_state()
    W = walk.dense
    worst = 0.0
    for E, psi in zip(evals, evecs.T):
        v0 = np.kron(g, psi)
        v1 = W @ v0
        Q, _ = np.linalg.qr(np.stack([v0, v1], axis=1))
        # drop the second direction when v1 is parallel to v0 (|E| = alpha)
        if np.linalg.norm(v1 - np.vdot(v0, v1) * v0) < 1e-9:
            Q = v0[:, None]
        sub = Q.conj().T @ W @ Q
        leak = np.linalg.norm(W @ Q - Q @ sub)
        theta = math.acos(max(-1.0, min(1.0, E / walk.alpha)))
        phases = np.angle(np.linalg.eigvals(sub))
        want = [theta, -theta][: len(phases)]
        d = sum(min(abs(np.angle(np.exp(1j * (p - w)))) for p in phases) for w in want)
        worst = max(worst, d, leak)
    return float(worst)


def divide_and_conquer_compose(children: list, weights=None) -> BlockEncoding:
    """Block-encode sum_i w_i H_i from child encodings of H_i.

    alpha = sum w_i alpha_i; a uniform selector over M children costs
    M pairs of C^(log M) X (4(log2 M - 1) T each, zero for M = 2).
    Dense children are flattened into one LCU over the union of terms.
    """
    if not children:
        raise ValueError("need at least one child")
    weights = [1.0] * len(children) if weights is None else list(weights)
    if len(weights) != len(children):
        raise ValueError("one weight per child")
    if len(children) == 1 and weights[0] == 1:
        return children[0]
    M = len(children)
    sel_q = math.ceil(math.log2(M)) if M > 1 else 0
    extra_t = 2 * M * 4 * max(sel_q - 1, 0)
    alpha = sum(abs(w) * c.alpha for w, c in zip(weights, children))
    tcounts = [c.t_count for c in children]
    out = BlockEncoding(algorithm="composite", alpha=alpha,
                        ancilla_qubits=sum(c.ancilla_qubits for c in children) + sel_q,
                        t_count=None if None in tcounts else sum(tcounts) + extra_t,
                        rz_count=sum(c.rz_count for c in children),
                        aqft_count=sum(c.aqft_count for c in children),
                        extra={"selector_qubits": sel_q, "selector_t": extra_t})
    if all(c.lcu_terms is not None for c in children):
        dims = {c.system_dim for c in children}
        if len(dims) != 1:
            raise ValueError("children act on different system sizes")
        terms = []
        for w, c in zip(weights, children):
            for coeff, U in c.lcu_terms:
                _append(terms, w * coeff, U)
        dim = dims.pop()
        out.lcu_terms = terms
        out.dense_prep, out.dense_select, out.dense_alpha = assemble_dense(terms, dim)
        out.system_dim = dim
    return out
