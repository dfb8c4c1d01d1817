"""Physical constants and energy-unit conversions.

Every numerical constant used by the package lives here. The literals are
CODATA-2018 values, kept fixed so results do not drift with the installed
SciPy version. Energies are carried internally in meV.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UsageError

# CODATA-2018 (SI). h, e and k_B are exact since the 2019 SI redefinition.
HBAR_J_S = 1.054571817e-34
PLANCK_J_S = 6.62607015e-34
ELEMENTARY_CHARGE_C = 1.602176634e-19
BOLTZMANN_J_K = 1.380649e-23
ATOMIC_MASS_KG = 1.66053906660e-27
BOHR_MAGNETON_J_T = 9.2740100783e-24
G_FREE_ELECTRON = 2.00231930436256
ANGSTROM_M = 1e-10


@dataclass(frozen=True)
class PhysicalConstants:
    """Derived constants in the units the rest of the package works in.

    Attributes
    ----------
    kinetic_coefficient : float
        hbar^2 / 2 in meV u Angstrom^2 (unit mass in mass-weighted coordinates).
    planck_h : float
        h in ueV per GHz.
    boltzmann_kB : float
        k_B in meV per K.
    bohr_magneton_over_h : float
        mu_B / h in GHz per T.
    g_free_electron : float
    """

    kinetic_coefficient: float
    planck_h: float
    boltzmann_kB: float
    bohr_magneton_over_h: float
    g_free_electron: float


def _derive() -> PhysicalConstants:
    joule_to_mev = 1e3 / ELEMENTARY_CHARGE_C
    return PhysicalConstants(
        kinetic_coefficient=HBAR_J_S**2 / (2.0 * ATOMIC_MASS_KG * ANGSTROM_M**2) * joule_to_mev,
        planck_h=PLANCK_J_S * 1e9 * joule_to_mev * 1e3,
        boltzmann_kB=BOLTZMANN_J_K * joule_to_mev,
        bohr_magneton_over_h=BOHR_MAGNETON_J_T / PLANCK_J_S / 1e9,
        g_free_electron=G_FREE_ELECTRON,
    )


CONSTANTS = _derive()

# Default isotropic g for the triplet (rounded free-electron value).
G_DEFAULT = 2.0023

# Size of one unit in meV. "K" means the thermal energy k_B * T.
_TO_MEV = {
    "meV": 1.0,
    "ueV": 1e-3,
    "GHz": CONSTANTS.planck_h * 1e-3,
    "MHz": CONSTANTS.planck_h * 1e-6,
    "K": CONSTANTS.boltzmann_kB,
}
_ALIASES = {"μeV": "ueV", "µeV": "ueV", "uev": "ueV", "mev": "meV", "ghz": "GHz", "mhz": "MHz", "k": "K"}

ENERGY_UNITS = tuple(_TO_MEV)


def _canonical(unit: str) -> str:
    if unit in _TO_MEV:
        return unit
    try:
        return _ALIASES[unit]
    except KeyError:
        raise UsageError(
            f"unknown energy unit {unit!r}; expected one of {', '.join(ENERGY_UNITS)}"
        ) from None


def convert_energy(value: float, from_unit: str, to_unit: str) -> float:
    """Convert an energy between meV, ueV, GHz, MHz and K (as k_B T).

    >>> round(convert_energy(2.5, "ueV", "GHz"), 4)
    0.6045
    """
    src = _canonical(from_unit)
    dst = _canonical(to_unit)
    if src == dst:
        return float(value)
    return float(value) * _TO_MEV[src] / _TO_MEV[dst]


def thermal_energy_mev(temperature: float) -> float:
    """k_B T in meV."""
    return CONSTANTS.boltzmann_kB * temperature


def rate_from_energy_hz(energy_ueV: float) -> float:
    """Frequency E / h in Hz for an energy in ueV."""
    return energy_ueV / CONSTANTS.planck_h * 1e9


def zeeman_mhz_per_tesla(g: float) -> float:
    """g mu_B / h in MHz per T."""
    return g * CONSTANTS.bohr_magneton_over_h * 1e3
