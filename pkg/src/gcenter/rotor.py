"""Hindered rotor on a ring with an N-fold cosine potential.

A particle of unit mass moves on a closed path of length ``L`` (mass-weighted,
sqrt(u) Angstrom) in

    V(q) = (V0 / 2) * (1 - cos(2 pi N q / L)).

The potential couples plane waves exp(2 pi i m q / L) only when m differs by a
multiple of N, so the Hamiltonian splits into N Bloch sectors
m = N j + k. Each sector is a symmetric tridiagonal matrix in j.

The lowest state of each sector forms the tunnelling band. For N = 6 it has
the 1-2-2-1 pattern over k = 0, +-1, +-2, 3 with spacings delta : 2 delta :
delta, so the full width is Delta = 4 delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ComputeError, FitError, UsageError
from .numerics import SymTridiag, eig_tridiag_batch, find_root, newton2
from .units import CONSTANTS

JMAX_START = 64
JMAX_CAP = 2000
# Basis escalation stops when delta changes by less than this fraction.
DELTA_CONVERGENCE = 1e-3
# Degenerate sectors +-k must agree to this fraction of the largest energy.
DEGENERACY_RTOL = 1e-12
FIT_RTOL = 1e-4

HBAR_OMEGA_MODES = ("centroid", "gap")


@dataclass(frozen=True)
class RotorPotential:
    """Periodic well: path length ``L`` (sqrt(u) A), barrier ``V0`` (meV), ``N`` wells."""

    L: float
    V0: float
    N: int = 6

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L > 0):
            raise UsageError(f"path length L must be positive, got {self.L}")
        if not (math.isfinite(self.V0) and self.V0 >= 0):
            raise UsageError(f"barrier V0 must be non-negative, got {self.V0}")
        if int(self.N) != self.N or self.N < 1:
            raise UsageError(f"well count N must be a positive integer, got {self.N}")
        object.__setattr__(self, "N", int(self.N))

    def __call__(self, q):
        """Potential energy in meV at path coordinate ``q``."""
        return 0.5 * self.V0 * (1.0 - np.cos(2.0 * np.pi * self.N * np.asarray(q) / self.L))


@dataclass(frozen=True)
class SectorHamiltonian:
    k: int
    jmax: int
    matrix: SymTridiag


@dataclass(frozen=True)
class Level:
    k: int  # |k| label; degenerate +-k pairs are stored once
    energy: float  # meV
    degeneracy: int
    band: int


@dataclass
class BandStructure:
    """Rotational levels grouped into tunnelling bands.

    ``delta`` and ``Delta`` are in ueV, energies and ``hbar_omega`` in meV.
    ``sector_energies`` maps every signed sector k to its lowest eigenvalues,
    kept for degeneracy audits.
    """

    potential: RotorPotential
    levels: list
    delta: float
    Delta: float
    hbar_omega: float
    jmax: int
    sector_energies: dict = field(repr=False)
    hbar_omega_mode: str = "centroid"

    def band(self, index: int) -> list:
        return [lvl for lvl in self.levels if lvl.band == index]

    @property
    def n_bands(self) -> int:
        return 1 + max(lvl.band for lvl in self.levels)

    @property
    def zero_point_energy(self) -> float:
        """Lowest rotational level in meV."""
        return min(lvl.energy for lvl in self.band(0))

    def centroid(self, index: int) -> float:
        lv = self.band(index)
        return sum(x.energy * x.degeneracy for x in lv) / sum(x.degeneracy for x in lv)

    def ground_offsets_ueV(self) -> list:
        """(|k|, offset from the lowest level in ueV, degeneracy), ascending."""
        e0 = self.zero_point_energy
        rows = [(lvl.k, (lvl.energy - e0) * 1e3, lvl.degeneracy) for lvl in self.band(0)]
        return sorted(rows, key=lambda r: (r[1], r[0]))


def sector_labels(N: int) -> list:
    """Signed sector indices of the first Brillouin zone, e.g. 0, 1, -1, 2, -2, 3 for N=6."""
    labels = [0]
    for k in range(1, N // 2 + 1):
        labels.append(k)
        if 2 * k != N:
            labels.append(-k)
    return labels


def build_sector(pot: RotorPotential, k: int, jmax: int) -> SectorHamiltonian:
    """Tridiagonal Hamiltonian of Bloch sector ``k`` on plane waves j = -jmax..jmax."""
    if int(k) != k or 2 * abs(k) > pot.N:
        raise UsageError(f"sector k={k} is outside the first zone |k| <= {pot.N / 2}")
    if int(jmax) != jmax or jmax < 4:
        raise UsageError(f"jmax must be an integer >= 4, got {jmax}")
    j = np.arange(-jmax, jmax + 1)
    wavenumber = (2.0 * np.pi * (pot.N * j + k)) / pot.L
    diagonal = CONSTANTS.kinetic_coefficient * wavenumber**2 + pot.V0 / 2
    off = np.full(2 * jmax, -pot.V0 / 4)
    return SectorHamiltonian(k=int(k), jmax=int(jmax), matrix=SymTridiag(diagonal, off))


def _sector_spectra(pot, jmax, n_bands):
    labels = sector_labels(pot.N)
    mats = [build_sector(pot, k, jmax).matrix for k in labels]
    values = eig_tridiag_batch(mats, n_bands)
    return {k: values[i] for i, k in enumerate(labels)}


def _band_width_factor(N: int) -> float:
    # Tight-binding band E(k) = E0 - 2t cos(2 pi k / N): width / t.
    kmax = N // 2
    return 2.0 * (1.0 - math.cos(2.0 * math.pi * kmax / N)) if N > 1 else 1.0


def _assemble(pot, jmax, spectra, n_bands, hbar_omega_mode):
    N = pot.N
    scale = max(float(np.max(np.abs(v))) for v in spectra.values()) or 1.0
    levels = []
    for k in range(0, N // 2 + 1):
        paired = k != 0 and 2 * k != N
        if paired:
            gap = np.max(np.abs(spectra[k] - spectra[-k]))
            if gap > DEGENERACY_RTOL * scale:
                raise ComputeError(f"sectors +-{k} are not degenerate (|dE| = {gap:.3g} meV)")
        for b in range(n_bands):
            levels.append(Level(k=k, energy=float(spectra[k][b]), degeneracy=2 if paired else 1, band=b))
    levels.sort(key=lambda x: (x.band, x.energy, x.k))
    if sum(x.degeneracy for x in levels if x.band == 0) != N:
        raise ComputeError("ground band does not hold N states")

    ground = [x.energy for x in levels if x.band == 0]
    Delta = (max(ground) - min(ground)) * 1e3
    delta = (spectra[N // 2][0] - spectra[0][0]) * 1e3 / _band_width_factor(N)

    hbar_omega = float("nan")
    if n_bands >= 2:
        if hbar_omega_mode == "centroid":
            c = []
            for b in (0, 1):
                lv = [x for x in levels if x.band == b]
                c.append(sum(x.energy * x.degeneracy for x in lv) / sum(x.degeneracy for x in lv))
            hbar_omega = c[1] - c[0]
        else:
            hbar_omega = min(x.energy for x in levels if x.band == 1) - min(ground)
    return BandStructure(
        potential=pot, levels=levels, delta=delta, Delta=Delta, hbar_omega=hbar_omega,
        jmax=jmax, sector_energies=spectra, hbar_omega_mode=hbar_omega_mode,
    )


def solve_bands(
    pot: RotorPotential,
    jmax: int = JMAX_START,
    n_bands: int = 2,
    *,
    escalate: bool = True,
    hbar_omega_mode: str = "centroid",
    rel_tol: float = DELTA_CONVERGENCE,
    jmax_cap: int = JMAX_CAP,
) -> BandStructure:
    """Rotational spectrum of ``pot`` grouped into tunnelling bands.

    Parameters
    ----------
    pot : RotorPotential
    jmax : int
        Starting plane-wave half-width per sector.
    n_bands : int
        Number of bands (eigenvalues per sector) to keep; ``hbar_omega``
        needs at least two.
    escalate : bool
        Double ``jmax`` until delta changes by less than ``rel_tol``. With
        ``escalate=False`` the basis is used as given.
    hbar_omega_mode : {"centroid", "gap"}
        "centroid": difference of degeneracy-weighted band centroids.
        "gap": lowest level of band 1 minus lowest level of band 0.

    Returns
    -------
    BandStructure
    """
    if hbar_omega_mode not in HBAR_OMEGA_MODES:
        raise UsageError(f"hbar_omega_mode must be one of {HBAR_OMEGA_MODES}")
    if n_bands < 1:
        raise UsageError("n_bands must be >= 1")
    spectra = _sector_spectra(pot, jmax, n_bands)
    result = _assemble(pot, jmax, spectra, n_bands, hbar_omega_mode)
    if not escalate:
        return result
    while True:
        nxt = 2 * jmax
        if nxt > jmax_cap:
            raise ComputeError(f"delta not converged at jmax={jmax} (cap {jmax_cap})")
        spectra = _sector_spectra(pot, nxt, n_bands)
        refined = _assemble(pot, nxt, spectra, n_bands, hbar_omega_mode)
        # Floor: delta below a few ulps of the zero-point energy is unresolvable noise.
        floor = 64 * np.finfo(float).eps * abs(refined.zero_point_energy) * 1e3
        change = abs(refined.delta - result.delta)
        if change <= rel_tol * abs(refined.delta) or change <= floor:
            return refined
        result, jmax = refined, nxt


def harmonic_estimate(pot: RotorPotential) -> float:
    """Small-oscillation quantum of one well in meV, (2 pi N / L) sqrt(c V0)."""
    if pot.V0 == 0:
        return 0.0
    return 2.0 * math.pi * pot.N / pot.L * math.sqrt(CONSTANTS.kinetic_coefficient * pot.V0)


def _mathieu_ratio(q):
    # Asymptotic (deep-well) delta / hbar_omega for the reduced Mathieu parameter q.
    return 2.0 * math.sqrt(2.0 / math.pi) * q**0.25 * math.exp(-4.0 * math.sqrt(q))


def initial_guess(hbar_omega: float, delta_ueV: float, N: int = 6) -> RotorPotential:
    """Starting point for :func:`fit_potential` from harmonic + deep-well asymptotics.

    With the energy unit eps = c (pi N / L)^2 and q = V0 / (4 eps) the sector
    problem is the Mathieu equation; for large q,
    hbar_omega ~ 4 eps sqrt(q) and
    delta ~ 8 eps sqrt(2/pi) q^(3/4) exp(-4 sqrt(q)).
    """
    if hbar_omega <= 0 or delta_ueV <= 0:
        raise UsageError("fit targets must be positive")
    ratio = delta_ueV * 1e-3 / hbar_omega
    # The asymptotic ratio decreases monotonically for q > 1/64.
    lo, hi = 0.25, 1e4
    if not _mathieu_ratio(hi) < ratio < _mathieu_ratio(lo):
        raise UsageError(f"delta/hbar_omega = {ratio:.3g} is outside the tunnelling regime")
    q = find_root(lambda x: math.log(_mathieu_ratio(x)) - math.log(ratio), lo, hi)
    eps = hbar_omega / (4.0 * math.sqrt(q))
    V0 = 4.0 * q * eps
    L = math.pi * N * math.sqrt(CONSTANTS.kinetic_coefficient / eps)
    return RotorPotential(L=L, V0=V0, N=N)


def fit_potential(
    hbar_omega: float,
    delta: float,
    N: int = 6,
    init: Optional[RotorPotential] = None,
    *,
    tol: float = 1e-11,
    hbar_omega_mode: str = "centroid",
) -> RotorPotential:
    """Find (L, V0) whose spectrum has the given hbar_omega (meV) and delta (ueV).

    Newton iteration on the residuals (hbar_omega / target - 1,
    ln delta - ln target) in log-parameters.

    Raises
    ------
    FitError
        If the iteration diverges or the converged potential misses either
        target by more than ``FIT_RTOL``. The best iterate is attached.
    """
    if hbar_omega <= 0 or delta <= 0:
        raise UsageError("fit targets must be positive")
    if init is None:
        init = initial_guess(hbar_omega, delta, N)

    def residual(x):
        pot = RotorPotential(L=math.exp(x[0]), V0=math.exp(x[1]), N=N)
        bands = solve_bands(pot, hbar_omega_mode=hbar_omega_mode)
        if bands.delta <= 0:
            return np.array([np.inf, np.inf])
        return np.array([bands.hbar_omega / hbar_omega - 1.0, math.log(bands.delta / delta)])

    start = np.array([math.log(init.L), math.log(init.V0)])
    try:
        x = newton2(residual, start, tol=tol, fd_step=1e-6)
    except FitError as err:
        last = err.last_iterate
        best = None
        if last is not None:
            best = RotorPotential(L=math.exp(last[0]), V0=math.exp(last[1]), N=N)
        raise FitError(f"potential fit failed: {err}", last_iterate=best, residual=err.residual) from err
    result = RotorPotential(L=math.exp(x[0]), V0=math.exp(x[1]), N=N)
    check = solve_bands(result, hbar_omega_mode=hbar_omega_mode)
    if (abs(check.hbar_omega / hbar_omega - 1) > FIT_RTOL or abs(check.delta / delta - 1) > FIT_RTOL):
        raise FitError("fitted potential does not reproduce the targets", last_iterate=result)
    return result
