"""Recompute the published G-centre numbers and compare them with the reference values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import presets
from .isotope import IsotopeScaling, calibrate_participation, zpl_isotope_shift
from .rates import ProbeContext, RateParams, athermal_rate, calibrate_beta, classify_regime, preset_5k
from .rotor import fit_potential, harmonic_estimate, solve_bands
from .spectrum import BroadeningModel, broaden, count_peaks, fine_structure_lines
from .spin import TripletSpinSystem, levels, motional_average, resonance_fields
from .tensor import AxisFrame, SymTensor3, average_over_rotations, axial_parameters, middle_axis


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    unit: str
    reference: str
    tolerance: str
    passed: bool


def _within(x, lo, hi):
    return bool(lo <= x <= hi)


def reproduce() -> list:
    """Run every reproduction check. Deterministic: no randomness, fixed bases."""
    out = []
    add = out.append

    singlet = solve_bands(presets.SINGLET_EXCITED_STATE)
    triplet = solve_bands(presets.TRIPLET_STATE)
    ground = solve_bands(presets.GROUND_STATE)
    harm = harmonic_estimate(presets.SINGLET_EXCITED_STATE)

    add(Check("singlet delta", singlet.delta, "ueV", "2.5", "[2.0, 3.0]", _within(singlet.delta, 2.0, 3.0)))
    ratio = singlet.Delta / singlet.delta
    add(Check("singlet Delta/delta", ratio, "", "4", "+-2%", abs(ratio / 4 - 1) <= 0.02))
    add(Check("singlet hbar_omega", singlet.hbar_omega, "meV", "12.4 (activation)",
              f"[11, 14] and < {harm:.4f}", _within(singlet.hbar_omega, 11, 14) and singlet.hbar_omega < harm))
    add(Check("triplet delta", triplet.delta, "ueV", "0.22", "[0.15, 0.33]", _within(triplet.delta, 0.15, 0.33)))
    g0 = athermal_rate(RateParams(delta=triplet.delta)) / 1e9
    add(Check("triplet Gamma0 (computed delta)", g0, "GHz", "0.321", "[0.22, 0.48]", _within(g0, 0.22, 0.48)))
    g0_ref = athermal_rate(RateParams(delta=presets.TRIPLET_DELTA_UEV)) / 1e9
    add(Check("Gamma0 = 6 delta / h at 0.22 ueV", g0_ref, "GHz", "0.321", "+-1%",
              abs(g0_ref / presets.ATHERMAL_RATE_GHZ - 1) <= 0.01))
    add(Check("ground-state delta", ground.delta, "ueV", "~0", "< 0.01", ground.delta < 0.01))

    fitted = fit_potential(presets.ACTIVATION_MEV, presets.SINGLET_DELTA_UEV)
    add(Check("fit L from (12.4 meV, 2.5 ueV)", fitted.L, "sqrt(u) A", "22.5", "+-10%",
              abs(fitted.L / 22.5 - 1) <= 0.1))
    add(Check("fit V0 from (12.4 meV, 2.5 ueV)", fitted.V0, "meV", "33", "+-10%",
              abs(fitted.V0 / 33 - 1) <= 0.1))

    f = calibrate_participation(presets.SINGLET_EXCITED_STATE, presets.GROUND_STATE, "excited_only",
                                presets.ISOTOPE_SHIFTS_UEV[29.0], 29.0)
    scaling = IsotopeScaling(participation_fraction=f)
    s29 = zpl_isotope_shift(presets.SINGLET_EXCITED_STATE, presets.GROUND_STATE, scaling, 29.0).magnitude
    s30 = zpl_isotope_shift(presets.SINGLET_EXCITED_STATE, presets.GROUND_STATE, scaling, 30.0).magnitude
    add(Check("participation fraction (calibrated)", f, "", "-", "(0, 1]", 0 < f <= 1))
    add(Check("29Si isotope shift", s29, "ueV", "54", "+-0.1% (calibration)", abs(s29 / 54 - 1) <= 1e-3))
    add(Check("30Si isotope shift", s30, "ueV", "106", "[100, 112]", _within(s30, 100, 112)))

    axis = middle_axis(presets.D_CALCULATED)
    avg = average_over_rotations(presets.D_CALCULATED, AxisFrame.along(axis, 3))
    D_avg, E_avg = axial_parameters(avg, axis)
    add(Check("averaged D", D_avg, "MHz", "1365", "1366.5 +- 0.5 and within 0.15% of 1365",
              abs(D_avg - 1366.5) <= 0.5 and abs(D_avg / presets.D_AVERAGED_CALCULATED - 1) <= 1.5e-3))
    add(Check("averaged E", E_avg, "MHz", "0", "+-1e-9", abs(E_avg) <= 1e-9))

    beta = calibrate_beta(presets.TRIPLET_DELTA_UEV, presets.TRIGONAL_ONSET_K, presets.ODMR_PROBE_GHZ * 1e9)
    add(Check("Raman beta (5 K, 35 GHz)", beta, "Hz/K^5", "1.110e7", "+-0.1%", abs(beta / 1.110e7 - 1) <= 1e-3))
    params = preset_5k()
    probe = presets.ODMR_PROBE_GHZ * 1e9
    for T in (6.0, 30.0):
        r = classify_regime(params, ProbeContext(probe, T))
        add(Check(f"regime at {T:g} K", r.margin, "Gamma/probe", "motionally averaged", ">= 1",
                  r.regime == "motionally_averaged"))
    r = classify_regime(RateParams(delta=presets.TRIPLET_DELTA_UEV), ProbeContext(probe, 1.7))
    add(Check("regime, athermal limit", r.margin, "Gamma/probe", "static (monoclinic)", "< 1",
              r.regime == "static_low_symmetry"))

    lines = fine_structure_lines(singlet, 1.4)
    offs = lines.offsets / singlet.delta
    add(Check("line offsets / delta", float(offs[-1]), "", "{0, 1, 3, 4}", "+-1%",
              bool(np.allclose(offs, [0, 1, 3, 4], rtol=0.01, atol=0.01))))
    resolved = count_peaks(broaden(lines, BroadeningModel(w0=0.1, wa=0.0), 1.4, (-5.0, 15.0, 0.01)))
    add(Check("peaks at 1.4 K, w = 0.1 ueV", resolved, "", "4 (quartet resolved)", "== 4", resolved == 4))
    model = BroadeningModel.calibrated()
    merged = count_peaks(broaden(fine_structure_lines(singlet, 20.0), model, 20.0))
    add(Check("peaks at 20 K", merged, "", "1 (lines merged)", "== 1", merged == 1))

    zero_field = levels(TripletSpinSystem(presets.D_CALCULATED), np.zeros(3))
    err = float(np.max(np.abs(zero_field - np.array([-911.0, -307.0, 1218.0]))))
    add(Check("zero-field levels error", err, "MHz", "{-911, -307, 1218}", "<= 1e-6", err <= 1e-6))
    free = resonance_fields(TripletSpinSystem(SymTensor3()), presets.ODMR_FIELD_DIRECTION,
                            presets.ODMR_PROBE_GHZ)
    b_free = free[0].field if free else math.nan
    add(Check("g = 2.0023 resonance at 35 GHz", b_free, "T", "1.2489", "+-1e-4",
              abs(b_free - 1.2489) <= 1e-4))
    avg_sys = motional_average(TripletSpinSystem(presets.D_CALCULATED))
    D_sys, _ = axial_parameters(avg_sys.D, axis)
    add(Check("averaged spin-system D", D_sys, "MHz", "1365", "1366.5 +- 0.5", abs(D_sys - 1366.5) <= 0.5))
    return out


def format_report(checks) -> str:
    width = max(len(c.name) for c in checks)
    rows = [f"{'check':<{width}}  {'value':>16}  {'unit':<12}  {'reference':<26}  {'tolerance':<40}  result"]
    for c in checks:
        rows.append(
            f"{c.name:<{width}}  {c.value:>16.8g}  {c.unit:<12}  {c.reference:<26}  {c.tolerance:<40}  "
            f"{'PASS' if c.passed else 'FAIL'}"
        )
    n_pass = sum(c.passed for c in checks)
    rows.append(f"{n_pass}/{len(checks)} checks passed")
    return "\n".join(rows) + "\n"
