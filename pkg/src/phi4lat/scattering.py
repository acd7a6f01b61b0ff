"""Elastic two-particle phases from finite-volume energies in one spatial dimension."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .amp_model import build_amp_hamiltonian
from .core import AmplitudeCutoffs, LatticeParams
from .dynamics import sector_spectrum


class BelowThreshold(ValueError):
    pass


class ZeroMomentum(ValueError):
    pass


@dataclass(frozen=True)
class PhaseExtraction:
    L: float
    m_phys: float
    E: float
    n: int
    p: float
    delta: float
    delta_uncertainty: float = 0.0

    def energy(self) -> float:
        return 2 * math.sqrt(self.m_phys ** 2 + self.p ** 2)


@dataclass(frozen=True)
class Rapidity:
    theta: float
    kink_mass: float

    def energy(self) -> float:
        return 2 * self.kink_mass * math.cosh(self.theta)

    @property
    def momenta(self) -> tuple:
        q = self.kink_mass * math.sinh(self.theta)
        return (q, -q)


def reduce_branch(x: float) -> float:
    """Map an angle to (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y


def nearest_level(p: float, L: float) -> int:
    """Quantization index of the free level closest to momentum p."""
    return int(round(p * L / (2 * math.pi)))


def phase_uncertainty(L: float, E: float, p: float, dE: float) -> float:
    """First-order propagation of an energy error into the phase."""
    if p <= 0:
        raise ZeroMomentum("relative momentum must be positive")
    return -L * E / (8 * p) * dE


def invert_energy_to_phase(E: float, L: float, m: float, n: int | None = None,
                           dE: float = 0.0) -> PhaseExtraction:
    """Solve E = 2 sqrt(m^2 + p^2) and read off delta = 2 pi n - p L.

    If ``n`` is None the nearest free level is used.
    """
    E, L, m = float(E), float(L), float(m)
    if not E > 2 * m:
        raise BelowThreshold(f"E={E} is not above 2m={2 * m}")
    p = math.sqrt(E * E / 4 - m * m)
    if n is None:
        n = nearest_level(p, L)
    delta = reduce_branch(2 * math.pi * n - p * L)
    ddelta = float(phase_uncertainty(L, E, p, dE)) if dE else 0.0
    return PhaseExtraction(L, m, E, int(n), p, delta, ddelta)


def rapidity(E: float, kink_mass: float) -> Rapidity:
    if kink_mass <= 0:
        raise ValueError("kink mass must be positive")
    if E < 2 * kink_mass:
        raise BelowThreshold(f"E={E} is below 2 M_k={2 * kink_mass}")
    return Rapidity(math.acosh(E / (2 * kink_mass)), kink_mass)


# ------------------------------------------------------------ dense pipeline

def spectrum_phases(params: LatticeParams, cutoffs: AmplitudeCutoffs, dE: float = 0.0,
                    max_levels: int = 4) -> list:
    """Phases from a dense even/odd split.

    The lowest odd level above the vacuum sets the particle mass; even
    levels above the two-particle threshold are treated as two-particle
    states in a box of length L = P a.
    """
    if params.d != 1:
        raise ValueError("phase extraction is one-dimensional")
    res = sector_spectrum(build_amp_hamiltonian(params, cutoffs))
    m = float(res.odd_gap)
    e0 = float(res.ground_energy)
    evens = sorted(float(e) - e0 for e, s in zip(res.eigenvalues, res.sectors) if s == "even")
    out = []
    for E in evens[1:]:
        if E > 2 * m:
            out.append(invert_energy_to_phase(E, params.P, m, dE=dE))
            if len(out) == max_levels:
                break
    return out


def scatter_csv(rows, m: float, kink_mass: float | None = None) -> str:
    """rows of (L, E, dE) to CSV with columns L,E,dE,n,p,delta,ddelta,theta."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["L", "E", "dE", "n", "p", "delta", "ddelta", "theta"])
    for L, E, dE in rows:
        ph = invert_energy_to_phase(E, L, m, dE=dE)
        theta = rapidity(E, kink_mass).theta if kink_mass else ""
        w.writerow([repr(float(L)), repr(float(E)), repr(float(dE)), ph.n,
                    repr(ph.p), repr(ph.delta), repr(ph.delta_uncertainty),
                    repr(theta) if theta != "" else ""])
    return buf.getvalue()


def read_scatter_rows(text: str) -> list:
    reader = csv.DictReader(io.StringIO(text))
    return [(float(r["L"]), float(r["E"]), float(r.get("dE") or 0.0)) for r in reader]
