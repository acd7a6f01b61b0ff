"""Lattice parameters, cutoffs and the free dispersion relation."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Base class for invalid parameter sets."""


class MissingKey(ConfigError, KeyError):
    pass


class NonPositiveSpacing(ConfigError):
    pass


class NonPowerOfTwoSites(ConfigError):
    pass


class NonPowerOfTwoCutoff(ConfigError):
    pass


class TooManyQubits(ValueError):
    """Raised when a dense realization would exceed the oracle cap."""


ORACLE_MAX_QUBITS = 14


def is_pow2(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class LatticeParams:
    m: float
    lam: float
    a: float = 1.0
    d: int = 1
    P: int = 1

    def __post_init__(self):
        if self.a <= 0:
            raise NonPositiveSpacing(f"lattice spacing must be positive, got {self.a}")
        if self.P < 1:
            raise ConfigError(f"P must be >= 1, got {self.P}")
        if self.d < 0:
            raise ConfigError(f"d must be >= 0, got {self.d}")
        if self.lam < 0:
            raise ConfigError(f"coupling must be >= 0, got {self.lam}")

    @property
    def M(self) -> float:
        return self.a * self.m

    @property
    def Lambda(self) -> float:
        return self.a ** (4 - self.d) * self.lam

    @property
    def Omega(self) -> int:
        return self.P ** self.d

    @property
    def E_D(self) -> int:
        return self.d * self.Omega

    @property
    def L(self) -> float:
        return self.P * self.a

    def replace(self, **kw) -> "LatticeParams":
        vals = dict(m=self.m, lam=self.lam, a=self.a, d=self.d, P=self.P)
        vals.update(kw)
        return LatticeParams(**vals)


_ALIASES = {
    "m": "m", "mass": "m", "bare_mass": "m",
    "lam": "lam", "lambda": "lam", "λ": "lam", "coupling": "lam",
    "a": "a", "spacing": "a",
    "d": "d", "spatial_dim": "d", "dim": "d",
    "P": "P", "sites_per_dim": "P",
}


def build_params(raw: dict, amplitude: bool = False) -> LatticeParams:
    """Validate a raw key/value map and return derived lattice parameters."""
    vals = {}
    for key, value in raw.items():
        if key in _ALIASES:
            vals[_ALIASES[key]] = value
    for key in ("m", "lam", "a", "d", "P"):
        if key not in vals:
            raise MissingKey(key)
    d, P = int(vals["d"]), int(vals["P"])
    if d < 1:
        raise ConfigError(f"d must be >= 1, got {d}")
    if amplitude and not is_pow2(P):
        raise NonPowerOfTwoSites(f"P={P} is not a power of two")
    return LatticeParams(m=float(vals["m"]), lam=float(vals["lam"]),
                         a=float(vals["a"]), d=d, P=P)


@dataclass(frozen=True)
class OccupationCutoffs:
    N: int
    mode_count: int

    def __post_init__(self):
        if self.N < 1:
            raise ConfigError("occupation cutoff N must be >= 1")
        if self.mode_count < 1:
            raise ConfigError("mode_count must be >= 1")

    @property
    def register_width(self) -> int:
        return self.N + 1

    @property
    def n_qubits(self) -> int:
        return (self.N + 1) * self.mode_count


@dataclass(frozen=True)
class AmplitudeCutoffs:
    """Field cutoff k (bins of width delta_phi, 2k grid points per site).

    Costing formulas accept any k >= 2; dense constructions call
    ``require_pow2``.
    """
    k: int
    delta_phi: float = field(default=None)

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError("field cutoff k must be >= 2")
        if self.delta_phi is None:
            object.__setattr__(self, "delta_phi", math.sqrt(math.pi / self.k))
        if self.delta_phi <= 0:
            raise ConfigError("delta_phi must be positive")

    @property
    def phi_max(self) -> float:
        return self.k * self.delta_phi

    @property
    def dim(self) -> int:
        return 2 * self.k

    @property
    def qubits_per_site(self) -> int:
        return int(round(math.log2(2 * self.k)))

    @property
    def grid(self) -> np.ndarray:
        return (np.arange(2 * self.k) - self.k + 1) * self.delta_phi

    def require_pow2(self) -> None:
        if not is_pow2(self.k):
            raise NonPowerOfTwoCutoff(f"k={self.k} is not a power of two")


def harmonic_cutoffs(k: int) -> AmplitudeCutoffs:
    return AmplitudeCutoffs(k=k, delta_phi=math.sqrt(math.pi / k))


def omega(M: float, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim == 0:
        return float(np.sqrt(M * M + p * p))
    return np.sqrt(M * M + np.sum(p * p, axis=-1))


@dataclass(frozen=True)
class Dispersion:
    labels: tuple          # integer mode labels n (one tuple per mode)
    momenta: np.ndarray    # shape (Omega, d), lattice units
    omega: np.ndarray      # shape (Omega,)

    @property
    def omega_min(self) -> float:
        return float(self.omega.min())

    @property
    def omega_max(self) -> float:
        return float(self.omega.max())

    def index(self, label) -> int:
        return self.labels.index(tuple(label))


def mode_labels_1d(P: int) -> list:
    if P % 2 == 0:
        return list(range(-P // 2 + 1, P // 2 + 1))
    return list(range(-(P - 1) // 2, (P - 1) // 2 + 1))


def dispersion_table(params: LatticeParams) -> Dispersion:
    """Free frequencies on the periodic momentum grid p = 2 pi n / P (lattice units)."""
    ns = mode_labels_1d(params.P)
    labels = tuple(itertools.product(ns, repeat=params.d))
    mom = 2 * np.pi * np.array(labels, dtype=float).reshape(len(labels), params.d) / params.P
    w = np.sqrt(params.M ** 2 + np.sum(mom ** 2, axis=1))
    return Dispersion(labels=labels, momenta=mom, omega=w)


def wrap_label(n: int, P: int) -> int:
    """Map an integer onto the label window of mode_labels_1d(P)."""
    lo = mode_labels_1d(P)[0]
    return (n - lo) % P + lo
