"""Temperature-dependent reorientation rate and symmetry-regime classification.

    Gamma(T) = 6 delta / h + alpha T + beta T^5

The first term is coherent tunnelling, the others are one-phonon (direct)
and two-phonon (Raman) assisted hopping. ``alpha`` and ``beta`` are treated
as opaque coefficients; :func:`calibrate_beta` fixes ``beta`` from an
observed crossing temperature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CalibrationError, UsageError
from .numerics import find_root
from .presets import ODMR_PROBE_GHZ, TRIGONAL_ONSET_K, TRIPLET_DELTA_UEV
from .units import rate_from_energy_hz

STATIC = "static_low_symmetry"
AVERAGED = "motionally_averaged"

# Reference probe and crossing temperature of the shipped beta calibration.
PRESET_PROBE_HZ = ODMR_PROBE_GHZ * 1e9
PRESET_CROSSING_K = TRIGONAL_ONSET_K


@dataclass(frozen=True)
class RateParams:
    """delta in ueV, alpha in Hz/K, beta in Hz/K^5."""

    delta: float
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not self.delta > 0:
            raise UsageError(f"delta must be positive, got {self.delta}")
        if self.alpha < 0 or self.beta < 0:
            raise UsageError("alpha and beta must be non-negative")


@dataclass(frozen=True)
class ProbeContext:
    interrogation_frequency: float  # Hz
    temperature: float  # K

    def __post_init__(self):
        if not (self.interrogation_frequency > 0 and self.temperature > 0):
            raise UsageError("interrogation frequency and temperature must be positive")


@dataclass(frozen=True)
class RegimeResult:
    regime: str
    rate: float  # Hz
    margin: float  # rate / interrogation frequency


def athermal_rate(p: RateParams) -> float:
    """Tunnelling rate 6 delta / h in Hz."""
    return rate_from_energy_hz(6.0 * p.delta)


def gamma(p: RateParams, T: float) -> float:
    """Total reorientation rate in Hz at temperature ``T`` (K)."""
    if T < 0:
        raise UsageError("temperature must be non-negative")
    return athermal_rate(p) + p.alpha * T + p.beta * T**5


def rate_terms(p: RateParams, T: float) -> dict:
    """The three contributions to :func:`gamma` in Hz."""
    return {"athermal": athermal_rate(p), "direct": p.alpha * T, "raman": p.beta * T**5}


def calibrate_beta(delta: float, T_cross: float, probe: float, alpha: float = 0.0) -> float:
    """Raman coefficient (Hz/K^5) making Gamma(T_cross) equal the probe frequency (Hz)."""
    if not T_cross > 0:
        raise UsageError("crossing temperature must be positive")
    base = athermal_rate(RateParams(delta=delta, alpha=alpha)) + alpha * T_cross
    if not probe > base:
        raise CalibrationError(
            f"probe {probe:.6g} Hz does not exceed the rate without the Raman term ({base:.6g} Hz)"
        )
    return (probe - base) / T_cross**5


def preset_5k(delta: float = TRIPLET_DELTA_UEV) -> RateParams:
    """Calibration preset: beta chosen so Gamma crosses 35 GHz at 5 K (alpha = 0).

    This is a calibration to the observed onset of trigonal symmetry, not a
    computed electron-phonon coupling.
    """
    beta = calibrate_beta(delta, PRESET_CROSSING_K, PRESET_PROBE_HZ)
    return RateParams(delta=delta, alpha=0.0, beta=beta)


def crossing_temperature(p: RateParams, probe: float, T_max: float = 1e3) -> float:
    """Temperature (K) at which Gamma reaches ``probe`` Hz.

    Returns 0.0 if the athermal rate already reaches the probe.
    """
    if gamma(p, 0.0) >= probe:
        return 0.0
    return find_root(lambda T: gamma(p, T) - probe, 0.0, T_max, rtol=1e-12)


def raman_crossover_temperature(p: RateParams) -> float:
    """Temperature (K) above which the Raman term exceeds the athermal rate."""
    if p.beta == 0:
        return math.inf
    return (athermal_rate(p) / p.beta) ** 0.2


def classify_regime(p: RateParams, probe: ProbeContext) -> RegimeResult:
    """Motionally averaged when Gamma(T) >= interrogation frequency, else static."""
    rate = gamma(p, probe.temperature)
    margin = rate / probe.interrogation_frequency
    return RegimeResult(AVERAGED if margin >= 1.0 else STATIC, rate, margin)

