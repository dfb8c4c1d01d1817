"""Isotope shifts of the zero-phonon line from mass scaling of the tunnelling path.

Substituting the central atom changes the mass-weighted path length as

    L' = L * sqrt(1 + f * (m' - m_ref) / m_ref)

where ``f`` is the fraction of the path's mass weighting carried by that
atom. The shift is the change in rotational zero-point energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import CalibrationError, UsageError
from .numerics import find_root
from .rotor import RotorPotential, solve_bands

RECIPES = ("excited_only", "both_states")


@dataclass(frozen=True)
class IsotopeScaling:
    reference_mass: float = 28.0
    participation_fraction: float = 1.0
    recipe: str = "excited_only"

    def __post_init__(self):
        if not 0.0 < self.participation_fraction <= 1.0:
            raise UsageError(f"participation fraction must lie in (0, 1], got {self.participation_fraction}")
        if not self.reference_mass > 0:
            raise UsageError("reference mass must be positive")
        if self.recipe not in RECIPES:
            raise UsageError(f"recipe must be one of {RECIPES}, got {self.recipe!r}")


@dataclass(frozen=True)
class IsotopeShift:
    magnitude: float  # ueV
    sign: int  # +1: ZPL moves up in energy, -1: down

    def __float__(self):
        return self.magnitude


def scale_path(pot: RotorPotential, s: IsotopeScaling, new_mass: float) -> RotorPotential:
    """Potential with the path length rescaled for a substituted mass (u)."""
    if not new_mass > 0:
        raise UsageError(f"mass must be positive, got {new_mass}")
    arg = 1.0 + s.participation_fraction * (new_mass - s.reference_mass) / s.reference_mass
    if arg <= 0:
        raise UsageError("mass scaling factor is not positive")
    if new_mass == s.reference_mass:
        return pot
    return replace(pot, L=pot.L * math.sqrt(arg))


def _zpl_rotational_energy(excited, ground, recipe):
    e = solve_bands(excited, n_bands=1).zero_point_energy
    if recipe == "both_states":
        e -= solve_bands(ground, n_bands=1).zero_point_energy
    return e


def zpl_isotope_shift(
    excited: RotorPotential, ground: RotorPotential, s: IsotopeScaling, new_mass: float
) -> IsotopeShift:
    """Isotope shift of the ZPL in ueV.

    ``excited_only`` compares the excited-state zero-point energy alone;
    ``both_states`` compares the excited-minus-ground difference.
    """
    if new_mass == s.reference_mass:
        return IsotopeShift(0.0, 0)
    ref = _zpl_rotational_energy(excited, ground, s.recipe)
    new = _zpl_rotational_energy(
        scale_path(excited, s, new_mass), scale_path(ground, s, new_mass), s.recipe
    )
    diff = (new - ref) * 1e3
    return IsotopeShift(abs(diff), int(math.copysign(1, diff)) if diff else 0)


def calibrate_participation(
    excited: RotorPotential,
    ground: RotorPotential,
    recipe: str,
    target_shift: float,
    target_mass: float,
    reference_mass: float = 28.0,
) -> float:
    """Participation fraction reproducing ``target_shift`` (ueV) at ``target_mass``.

    Raises
    ------
    CalibrationError
        When the target is outside the range reachable with 0 < f <= 1.
    """

    def shift(f):
        s = IsotopeScaling(reference_mass=reference_mass, participation_fraction=f, recipe=recipe)
        return zpl_isotope_shift(excited, ground, s, target_mass).magnitude

    top = shift(1.0)
    if not 0.0 < target_shift <= top * (1 + 1e-12):
        raise CalibrationError(
            f"target shift {target_shift} ueV unreachable; attainable range is (0, {top:.4f}] ueV"
        )
    if abs(target_shift - top) <= 1e-12 * top:
        return 1.0
    lo = 1e-6
    return find_root(lambda f: shift(f) - target_shift, lo, 1.0, rtol=1e-9)
