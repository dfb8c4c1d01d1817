"""Zero-phonon-line fine structure from the excited-state rotational band.

Lines sit at the ground-band offsets of the excited-state rotor, measured
from its lowest level ({0, delta, 3 delta, 4 delta} for six wells), weighted
by degeneracy and a Boltzmann factor. :func:`broaden` turns a line list into
a sampled spectrum whose line width grows as

    w(T) = w0 + wa * exp(-Ea / k_B T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import UsageError
from .presets import ACTIVATION_MEV, ZPL_EV
from .rotor import BandStructure
from .units import convert_energy

WEIGHTINGS = ("emission", "absorption")
SHAPES = ("gaussian", "lorentzian")
DEFAULT_ZPL_EV = ZPL_EV
DEFAULT_ACTIVATION_MEV = ACTIVATION_MEV


@dataclass(frozen=True)
class Line:
    offset: float  # ueV from the lowest line
    degeneracy: int
    intensity: float
    k: int


@dataclass
class LineList:
    zpl_energy: float  # eV
    lines: list

    def __post_init__(self):
        offsets = [ln.offset for ln in self.lines]
        if offsets != sorted(offsets):
            raise UsageError("line offsets must be ascending")
        total = sum(ln.intensity for ln in self.lines)
        if self.lines and abs(total - 1.0) > 1e-12:
            raise UsageError(f"line intensities must sum to 1, got {total}")

    @property
    def offsets(self) -> np.ndarray:
        return np.array([ln.offset for ln in self.lines])

    @property
    def intensities(self) -> np.ndarray:
        return np.array([ln.intensity for ln in self.lines])

    @property
    def degeneracies(self) -> list:
        return [ln.degeneracy for ln in self.lines]


def ideal_band(delta: float, N: int = 6) -> list:
    """Tight-binding ground band rows (|k|, offset ueV, degeneracy) for tunnelling ``delta``."""
    rows = []
    for k in range(N // 2 + 1):
        offset = 2.0 * delta * (1.0 - math.cos(2.0 * math.pi * k / N))
        rows.append((k, offset, 1 if k == 0 or 2 * k == N else 2))
    return sorted(rows, key=lambda r: (r[1], r[0]))


def fine_structure_lines(
    band: Union[BandStructure, Sequence],
    T: float,
    zpl: float = DEFAULT_ZPL_EV,
    weighting: str = "emission",
) -> LineList:
    """Boltzmann-weighted ZPL fine-structure lines.

    Parameters
    ----------
    band : BandStructure or sequence of (k, offset_ueV, degeneracy)
        Excited-state rotor spectrum.
    T : float
        Temperature in K; ``math.inf`` gives pure degeneracy weighting.
    zpl : float
        Energy of the lowest line in eV.
    weighting : {"emission", "absorption"}
        "emission" populates the excited band thermally. "absorption" starts
        from the electronic ground state, whose rotational splitting is far
        below k_B T, so lines are weighted by degeneracy alone.
    """
    if weighting not in WEIGHTINGS:
        raise UsageError(f"weighting must be one of {WEIGHTINGS}")
    if not T > 0:
        raise UsageError(f"temperature must be positive, got {T}")
    rows = band.ground_offsets_ueV() if isinstance(band, BandStructure) else list(band)
    rows = sorted(rows, key=lambda r: (r[1], r[0]))
    kT = math.inf if math.isinf(T) else convert_energy(T, "K", "ueV")
    weights = []
    for _, offset, deg in rows:
        boltz = 1.0 if weighting == "absorption" or math.isinf(kT) else math.exp(-offset / kT)
        weights.append(deg * boltz)
    total = math.fsum(weights)
    lines = [
        Line(offset=float(off), degeneracy=int(deg), intensity=w / total, k=int(k))
        for (k, off, deg), w in zip(rows, weights)
    ]
    # Normalise once more so the stored intensities sum to one to the last bit.
    excess = math.fsum(ln.intensity for ln in lines) - 1.0
    if lines and excess:
        last = lines[-1]
        lines[-1] = Line(last.offset, last.degeneracy, last.intensity - excess, last.k)
    return LineList(zpl_energy=zpl, lines=lines)


@dataclass(frozen=True)
class BroadeningModel:
    """Arrhenius line width (FWHM, ueV) with activation energy ``Ea`` in meV."""

    w0: float
    wa: float
    Ea: float = DEFAULT_ACTIVATION_MEV
    shape: str = "gaussian"

    def __post_init__(self):
        if self.w0 < 0 or self.wa < 0:
            raise UsageError("widths must be non-negative")
        if not self.Ea > 0:
            raise UsageError("activation energy must be positive")
        if self.shape not in SHAPES:
            raise UsageError(f"shape must be one of {SHAPES}")

    @classmethod
    def calibrated(cls, w0=0.1, width=12.0, T_ref=20.0, Ea=DEFAULT_ACTIVATION_MEV, shape="gaussian"):
        """Choose ``wa`` so that the width at ``T_ref`` equals ``width`` (ueV)."""
        if width <= w0:
            raise UsageError("reference width must exceed the residual width")
        factor = math.exp(-Ea / convert_energy(T_ref, "K", "meV"))
        return cls(w0=w0, wa=(width - w0) / factor, Ea=Ea, shape=shape)

    def width(self, T: float) -> float:
        if T <= 0:
            return self.w0
        return self.w0 + self.wa * math.exp(-self.Ea / convert_energy(T, "K", "meV"))


@dataclass
class SampledSpectrum:
    energy: np.ndarray  # ueV offset
    intensity: np.ndarray
    width: float = field(default=float("nan"))

    def area(self) -> float:
        return float(np.trapezoid(self.intensity, self.energy))


def _profile(x, center, fwhm, shape):
    if shape == "gaussian":
        sigma = fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
        return np.exp(-0.5 * ((x - center) / sigma) ** 2)
    gamma = 0.5 * fwhm
    return 1.0 / (1.0 + ((x - center) / gamma) ** 2)


def default_grid(lines: LineList, width: float, points_per_width: int = 20):
    """(start, stop, step) covering every line +-5 widths."""
    step = width / points_per_width
    return (float(lines.offsets.min() - 5 * width), float(lines.offsets.max() + 5 * width), step)


def broaden(lines: LineList, model: BroadeningModel, T: float, grid=None) -> SampledSpectrum:
    """Sample the broadened spectrum on ``grid = (start, stop, step)`` in ueV.

    Each line profile is normalised to unit trapezoid area on the grid, so the
    total area equals the summed intensities independent of width, shape and
    step (Lorentzian tails beyond the grid are folded back in).
    """
    w = model.width(T)
    if not w > 0:
        raise UsageError("line width is zero; give a positive residual width w0")
    if grid is None:
        grid = default_grid(lines, w)
    start, stop, step = grid
    if not step > 0 or not stop > start:
        raise UsageError("empty energy grid")
    x = start + step * np.arange(int(math.floor((stop - start) / step + 1e-9)) + 1)
    if x.size < 2:
        raise UsageError("empty energy grid")
    y = np.zeros_like(x)
    for ln in lines.lines:
        prof = _profile(x, ln.offset, w, model.shape)
        area = np.trapezoid(prof, x)
        if area <= 0:
            raise UsageError(f"line at {ln.offset} ueV lies outside the grid")
        y += ln.intensity * prof / area
    return SampledSpectrum(energy=x, intensity=y, width=w)


def count_peaks(spec: SampledSpectrum, rel_floor: float = 1e-9) -> int:
    """Number of local maxima (plateaus count once) above ``rel_floor * max``."""
    y = spec.intensity
    floor = rel_floor * float(y.max())
    count = 0
    i = 1
    n = y.size
    while i < n - 1:
        if y[i] > y[i - 1]:
            j = i
            while j < n - 1 and y[j + 1] == y[i]:
                j += 1
            if (j == n - 1 or y[j + 1] < y[i]) and y[i] > floor:
                count += 1
            i = j + 1
        else:
            i += 1
    return count
