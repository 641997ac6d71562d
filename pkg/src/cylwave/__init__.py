"""Guided TEM/TM/TE modes of coaxial and hollow cylindrical waveguides:
cutoffs, profiles, generalized-flux electrodynamics, gauges and quantization."""
from .model import (Coaxial, Family, Hollow, Medium, ModeSpec, PropagatingMode,
                    Quadratures, solve_mode, envelope)

__version__ = "0.1.0"

__all__ = ["Coaxial", "Family", "Hollow", "Medium", "ModeSpec", "PropagatingMode",
           "Quadratures", "solve_mode", "envelope", "__version__"]
