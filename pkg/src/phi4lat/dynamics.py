"""Dense time evolution, second-order Trotter steps and sector spectra."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .amp_model import AmpHamiltonian, sector_split
from .core import ORACLE_MAX_QUBITS, AmplitudeCutoffs, LatticeParams, TooManyQubits
from .occ_model import OccHamiltonian, occ_fragments
from .pauli import restricted


class NonHermitianFragment(ValueError):
    pass


class DegenerateFit(ValueError):
    pass


def _check_dim(dim: int) -> None:
    if dim > 2 ** ORACLE_MAX_QUBITS:
        raise TooManyQubits(f"dimension {dim} exceeds dense cap")


def expm_hermitian(H: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) through the eigendecomposition of Hermitian H."""
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w * t)) @ V.conj().T


@dataclass
class TrotterStep:
    fragments: list = field(repr=False)
    tau: float
    order: int = 2
    matrix: np.ndarray | None = field(default=None, repr=False)


def trotter_s2(fragments: list, tau: float) -> np.ndarray:
    """Symmetric product prod_g e^{-i H_g tau/2} followed by the reverse product."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    mats = [np.asarray(f, dtype=complex) for f in fragments]
    if not mats:
        raise ValueError("need at least one fragment")
    _check_dim(len(mats[0]))
    for f in mats:
        if not np.allclose(f, f.conj().T, atol=1e-10):
            raise NonHermitianFragment("fragment is not Hermitian")
    halves = [expm_hermitian(f, tau / 2) for f in mats]
    U = np.eye(len(mats[0]), dtype=complex)
    for h in halves:  # first fragment acts first
        U = h @ U
    for h in reversed(halves):
        U = h @ U
    return U


def trotter_step(fragments: list, tau: float) -> TrotterStep:
    return TrotterStep(list(fragments), tau, 2, trotter_s2(fragments, tau))


def trotter_error(fragments: list, tau: float) -> float:
    H = sum(np.asarray(f, dtype=complex) for f in fragments)
    return float(np.linalg.norm(trotter_s2(fragments, tau) - expm_hermitian(H, tau), 2))


@dataclass
class ScalingFit:
    slope: float | None
    status: str  # "ok" or "noise_floor"
    taus: np.ndarray
    errors: np.ndarray


def trotter_error_scaling(fragments: list, taus, floor: float = 1e-12) -> ScalingFit:
    taus = np.sort(np.asarray(taus, dtype=float))
    if len(taus) < 4 or taus[-1] / taus[0] < 10:
        raise DegenerateFit("need >= 4 step sizes spanning a decade")
    errs = np.array([trotter_error(fragments, t) for t in taus])
    if np.all(errs < floor):
        return ScalingFit(None, "noise_floor", taus, errs)
    keep = errs >= floor
    if keep.sum() < 2:
        raise DegenerateFit("too few points above the noise floor")
    slope = np.polyfit(np.log(taus[keep]), np.log(errs[keep]), 1)[0]
    return ScalingFit(float(slope), "ok", taus, errs)


# ------------------------------------------------------------ fragmentations

def amp_fragments(h: AmpHamiltonian) -> list:
    """Kinetic and potential (diagonal) parts."""
    if h.n_qubits > ORACLE_MAX_QUBITS:
        raise TooManyQubits("dense fragments exceed cap")
    return [h.kinetic(), h.potential()]


def occ_dense_fragments(h: OccHamiltonian, scheme: str = "merged",
                        subspace: str = "unary") -> list:
    w = h.cutoffs.register_width
    n = h.cutoffs.mode_count
    out = []
    for f in occ_fragments(h, scheme):
        ps = f.copy()
        ps.n_qubits = max(ps.n_qubits, w * n)
        out.append(restricted(ps, subspace, w, n))
    return out


def alpha_comm_amp(params: LatticeParams, cut: AmplitudeCutoffs) -> float:
    """Nested-commutator bound for the kinetic/potential split of H_amp."""
    k, D = cut.k, cut.delta_phi
    M2, lam, d = params.M ** 2, params.Lambda, params.d
    kd2 = (k * D) ** 2
    return params.Omega * (lam ** 2 / 576 * kd2 ** 5
                           + lam / 48 * (2 * M2 + 8 * d * d + 2 * d + 3) * kd2 ** 4
                           + (0.25 * (M2 + d + 1) * (M2 + d + 2)
                              + d * d * (2 * M2 + 2 * d + 11)) * kd2 ** 3)


# ----------------------------------------------------------------- spectra

@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    sectors: list
    ground_energy: float
    even_gap: float  # second even level minus even ground (two-particle proxy)
    odd_gap: float   # lowest odd level minus even ground (one-particle proxy)


def sector_spectrum(h: AmpHamiltonian) -> SpectrumResult:
    if h.dense is None:
        raise TooManyQubits("dense realization required")
    ev, od = sector_split(h)
    vals = np.concatenate([ev, od])
    labels = ["even"] * len(ev) + ["odd"] * len(od)
    order = np.argsort(vals, kind="stable")
    e0 = float(ev[0])
    even_gap = float(ev[1] - ev[0]) if len(ev) > 1 else math.nan
    odd_gap = float(od[0] - ev[0]) if len(od) else math.nan
    return SpectrumResult(vals[order], [labels[i] for i in order], float(vals.min()),
                          even_gap, odd_gap)


def spectrum_csv(res: SpectrumResult) -> str:
    buf = io.StringIO()
    buf.write("index,eigenvalue,sector\n")
    for i, (e, s) in enumerate(zip(res.eigenvalues, res.sectors)):
        buf.write(f"{i},{e:.15g},{s}\n")
    return buf.getvalue()
