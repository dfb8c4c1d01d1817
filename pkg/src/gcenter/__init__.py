"""Rotational tunnelling model of the G centre in silicon.

A heavy atom hops between N equivalent wells on a closed path. Solving that
rotor gives the tunnelling band, the zero-phonon-line fine structure, isotope
shifts, reorientation rates and the motionally averaged spin tensors that
set the ODMR pattern.
"""

from .errors import BracketError, CalibrationError, ComputeError, FitError, GCenterError, UsageError
from .rotor import BandStructure, RotorPotential, fit_potential, harmonic_estimate, solve_bands

__version__ = "0.1.0"

__all__ = [
    "BandStructure",
    "BracketError",
    "CalibrationError",
    "ComputeError",
    "FitError",
    "GCenterError",
    "RotorPotential",
    "UsageError",
    "fit_potential",
    "harmonic_estimate",
    "solve_bands",
]
