"""Resource estimation and dense oracles for lattice phi^4 theory on a quantum computer."""

__version__ = "0.1.0"

from .core import AmplitudeCutoffs, ConfigError, LatticeParams, OccupationCutoffs  # noqa: E402

__all__ = ["AmplitudeCutoffs", "ConfigError", "LatticeParams", "OccupationCutoffs",
           "__version__"]
