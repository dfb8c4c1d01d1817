"""Command-line interface.

    gcenter solve --L 22.5 --V0 33
    gcenter paper-repro --json

Every subcommand reads optional defaults from ``--config FILE`` (JSON; a
``schema_version`` key plus one block per subcommand). Explicit flags win
over the file. Exit status: 0 success, 1 compute error (or a failed
reproduction check), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import presets
from .errors import ComputeError, GCenterError, UsageError
from .isotope import IsotopeScaling, RECIPES, calibrate_participation, zpl_isotope_shift
from .rates import ProbeContext, RateParams, calibrate_beta, classify_regime, crossing_temperature, rate_terms
from .repro import format_report, reproduce
from .rotor import HBAR_OMEGA_MODES, RotorPotential, fit_potential, harmonic_estimate, solve_bands
from .spectrum import SHAPES, WEIGHTINGS, BroadeningModel, broaden, count_peaks, fine_structure_lines, ideal_band
from .spin import (
    TripletSpinSystem, defect_frame, distinct_orientations, motional_average, orientation_branches,
)
from .tensor import AxisFrame, SymTensor3, average_over_rotations, axial_parameters, middle_axis, remove_isotropic

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "GCENTER_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- output helpers


def _resolve_out(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def write_atomic(path, text: str) -> Path:
    """Write ``text`` via a temporary file in the target directory and rename it into place."""
    target = _resolve_out(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def json_text(command: str, result: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "result": _jsonable(result)}
    return json.dumps(doc, indent=2) + "\n"


def _table(header, rows) -> str:
    cells = [[str(h) for h in header]] + [
        [f"{x:.10g}" if isinstance(x, (float, np.floating)) else str(x) for x in row] for row in rows
    ]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells) + "\n"


class Emitter:
    """Collects stdout text and files, and publishes them only if the command succeeds."""

    def __init__(self, args):
        self.args = args
        self.stdout = []
        self.files = []

    def print(self, text: str):
        self.stdout.append(text)

    def file(self, path, text):
        if path:
            self.files.append((path, text))

    def flush(self):
        for path, text in self.files:
            write_atomic(path, text)
        sys.stdout.write("".join(self.stdout))


# ---------------------------------------------------------------- subcommands


def _potential(args, prefix=""):
    return RotorPotential(L=getattr(args, f"{prefix}L"), V0=getattr(args, f"{prefix}V0"), N=args.N)


def cmd_solve(args, out: Emitter):
    pot = _potential(args)
    bands = solve_bands(pot, jmax=args.jmax, n_bands=args.n_bands, hbar_omega_mode=args.hbar_omega_mode)
    e0 = bands.zero_point_energy
    rows = [(lv.band, lv.k, lv.degeneracy, lv.energy, (lv.energy - e0) * 1e3) for lv in bands.levels]
    header = ("band", "k", "degeneracy", "energy_meV", "offset_ueV")
    summary = {
        "L_sqrt_u_A": pot.L, "V0_meV": pot.V0, "N": pot.N, "jmax": bands.jmax,
        "delta_ueV": bands.delta, "Delta_ueV": bands.Delta, "hbar_omega_meV": bands.hbar_omega,
        "hbar_omega_mode": bands.hbar_omega_mode, "harmonic_hbar_omega_meV": harmonic_estimate(pot),
        "zero_point_energy_meV": e0,
    }
    if args.json:
        out.print(json_text("solve", {**summary, "levels": [dict(zip(header, r)) for r in rows]}))
    else:
        out.print(_table(header, rows))
        out.print("".join(f"{k} = {_fmt(v)}\n" for k, v in summary.items()))
    out.file(args.csv, csv_text(header, rows))


def cmd_fit(args, out: Emitter):
    init = None
    if args.init_L is not None or args.init_V0 is not None:
        if args.init_L is None or args.init_V0 is None:
            raise UsageError("give both --init-L and --init-V0")
        init = RotorPotential(args.init_L, args.init_V0, args.N)
    pot = fit_potential(args.hbar_omega, args.delta, N=args.N, init=init, hbar_omega_mode=args.hbar_omega_mode)
    bands = solve_bands(pot, hbar_omega_mode=args.hbar_omega_mode)
    res = {
        "target_hbar_omega_meV": args.hbar_omega, "target_delta_ueV": args.delta,
        "L_sqrt_u_A": pot.L, "V0_meV": pot.V0, "N": pot.N,
        "hbar_omega_meV": bands.hbar_omega, "delta_ueV": bands.delta,
    }
    out.print(json_text("fit", res) if args.json else "".join(f"{k} = {_fmt(v)}\n" for k, v in res.items()))


def cmd_isotope(args, out: Emitter):
    excited = RotorPotential(args.excited_L, args.excited_V0, args.N)
    ground = RotorPotential(args.ground_L, args.ground_V0, args.N)
    f = args.f
    if args.calibrate_shift is not None:
        f = calibrate_participation(excited, ground, args.recipe, args.calibrate_shift, args.calibrate_mass,
                                    reference_mass=args.reference_mass)
    scaling = IsotopeScaling(reference_mass=args.reference_mass, participation_fraction=f, recipe=args.recipe)
    rows = []
    for m in args.mass:
        s = zpl_isotope_shift(excited, ground, scaling, m)
        rows.append((m, s.magnitude, s.sign))
    header = ("mass_u", "shift_ueV", "sign")
    if args.json:
        out.print(json_text("isotope", {"participation_fraction": f, "recipe": args.recipe,
                                        "shifts": [dict(zip(header, r)) for r in rows]}))
    else:
        out.print(f"participation_fraction = {_fmt(float(f))}\nrecipe = {args.recipe}\n")
        out.print(_table(header, rows))
    out.file(args.csv, csv_text(header, rows))


def _tensor_arg(values, name):
    if values is None:
        return None
    if len(values) == 3:
        return SymTensor3.diagonal(*values)
    if len(values) == 6:
        return SymTensor3(*values)
    raise UsageError(f"{name} needs 3 (xx yy zz) or 6 (xx yy zz xy xz yz) values")


def cmd_average_tensor(args, out: Emitter):
    t = _tensor_arg(args.tensor, "--tensor")
    iso, traceless = remove_isotropic(t)
    axis = np.asarray(args.axis, dtype=float) if args.axis else middle_axis(traceless)
    frame = AxisFrame.along(axis, args.order)
    avg = average_over_rotations(traceless, frame)
    D, E = axial_parameters(avg, frame.n)
    res = {
        "isotropic_MHz": iso, "axis": list(frame.n), "rotation_order": args.order,
        "averaged_MHz": avg.matrix(), "D_avg_MHz": D, "E_avg_MHz": E,
    }
    if args.json:
        out.print(json_text("average-tensor", res))
    else:
        m = np.where(np.abs(avg.matrix()) < 1e-9, 0.0, avg.matrix())
        out.print(f"isotropic_MHz = {_fmt(iso)}\naxis = {' '.join(_fmt(float(x)) for x in frame.n)}\n")
        out.print("averaged_MHz =\n" + "".join("  " + " ".join(f"{x:14.6f}" for x in row) + "\n" for row in m))
        out.print(f"D_avg_MHz = {_fmt(D)}\nE_avg_MHz = {_fmt(E)}\n")


def cmd_rates(args, out: Emitter):
    beta = args.beta
    if args.calibrate_T is not None:
        beta = calibrate_beta(args.delta, args.calibrate_T, args.probe * 1e9, alpha=args.alpha)
    p = RateParams(delta=args.delta, alpha=args.alpha, beta=beta)
    rows = []
    for T in args.temperature:
        terms = rate_terms(p, T)
        r = classify_regime(p, ProbeContext(args.probe * 1e9, T))
        rows.append((T, terms["athermal"], terms["direct"], terms["raman"], r.rate, r.margin, r.regime))
    header = ("T_K", "gamma0_Hz", "direct_Hz", "raman_Hz", "gamma_Hz", "margin", "regime")
    t_cross = crossing_temperature(p, args.probe * 1e9) if (p.alpha or p.beta) else math.inf
    if args.json:
        out.print(json_text("rates", {"delta_ueV": p.delta, "alpha_Hz_per_K": p.alpha, "beta_Hz_per_K5": p.beta,
                                      "probe_GHz": args.probe, "crossing_T_K": t_cross,
                                      "rows": [dict(zip(header, r)) for r in rows]}))
    else:
        out.print(f"beta_Hz_per_K5 = {_fmt(float(p.beta))}\ncrossing_T_K = {_fmt(float(t_cross))}\n")
        out.print(_table(header, rows))
    out.file(args.csv, csv_text(header, rows))


def cmd_spectrum(args, out: Emitter):
    if args.delta is not None:
        band = ideal_band(args.delta, args.N)
    else:
        band = solve_bands(_potential(args))
    T = args.temperature
    lines = fine_structure_lines(band, T, zpl=args.zpl, weighting=args.weighting)
    if args.wa is None:
        model = BroadeningModel.calibrated(w0=args.w0, width=args.width_20K, Ea=args.Ea, shape=args.shape)
    else:
        model = BroadeningModel(w0=args.w0, wa=args.wa, Ea=args.Ea, shape=args.shape)
    spec = broaden(lines, model, 0.0 if math.isinf(T) else T, tuple(args.grid) if args.grid else None)
    line_rows = [(ln.k, ln.offset, ln.degeneracy, ln.intensity) for ln in lines.lines]
    line_header = ("k", "offset_ueV", "degeneracy", "intensity")
    res = {"zpl_eV": lines.zpl_energy, "width_ueV": spec.width, "peaks": count_peaks(spec),
           "lines": [dict(zip(line_header, r)) for r in line_rows]}
    if args.json:
        res["spectrum"] = {"energy_uev_offset": spec.energy, "intensity": spec.intensity}
        out.print(json_text("spectrum", res))
    else:
        out.print(_table(line_header, line_rows))
        out.print(f"width_ueV = {_fmt(spec.width)}\npeaks = {res['peaks']}\n")
    out.file(args.csv, csv_text(("energy_uev_offset", "intensity"), zip(spec.energy, spec.intensity)))


def cmd_odmr(args, out: Emitter):
    D = _tensor_arg(args.D, "--D") or presets.D_CALCULATED
    _, D = remove_isotropic(D)
    A = _tensor_arg(args.A, "--A")
    frame = defect_frame() if args.frame == "defect" else np.eye(3)
    sys_ = TripletSpinSystem(D=D, g=args.g, A=A, frame=frame)
    if args.average:
        sys_ = motional_average(sys_)
    orientations = [np.eye(3)] if args.single else distinct_orientations(sys_)
    branches = orientation_branches(sys_, orientations, args.direction, args.probe, args.B_max)
    rows = []
    for bid, br in enumerate(branches):
        for r in br.resonances:
            rows.append((bid, r.field, r.transition, br.multiplicity))
    header = ("orientation_id", "B_tesla", "transition", "multiplicity")
    if args.json:
        out.print(json_text("odmr", {"probe_GHz": args.probe, "direction": list(args.direction), "g": args.g,
                                     "averaged": bool(args.average), "orientations": len(orientations),
                                     "resonances": [dict(zip(header, r)) for r in rows]}))
    else:
        out.print(f"orientations = {len(orientations)}\nbranches = {len(branches)}\n")
        out.print(_table(header, rows))
    out.file(args.csv, csv_text(header, rows))


def cmd_paper_repro(args, out: Emitter):
    checks = reproduce()
    if args.json:
        text = json_text("paper-repro", {
            "checks": [{"name": c.name, "value": c.value, "unit": c.unit, "reference": c.reference,
                        "tolerance": c.tolerance, "passed": c.passed} for c in checks],
            "passed": sum(c.passed for c in checks), "total": len(checks),
        })
    else:
        text = format_report(checks)
    out.print(text)
    out.file(args.report, text)
    return 0 if all(c.passed for c in checks) else 1


# ---------------------------------------------------------------- parser


def _rotor_opts(p, L=None, V0=None):
    p.add_argument("--L", type=float, default=L, help="path length, sqrt(u) Angstrom")
    p.add_argument("--V0", type=float, default=V0, help="barrier, meV")
    p.add_argument("--N", type=int, default=6, help="number of wells")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcenter", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="JSON config file with per-command defaults")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="emit JSON on stdout")
        return p

    singlet = presets.SINGLET_EXCITED_STATE
    ground = presets.GROUND_STATE

    p = add("solve", cmd_solve, "rotational bands of a periodic well")
    _rotor_opts(p, singlet.L, singlet.V0)
    p.add_argument("--jmax", type=int, default=64)
    p.add_argument("--n-bands", type=int, default=2)
    p.add_argument("--hbar-omega-mode", choices=HBAR_OMEGA_MODES, default="centroid")
    p.add_argument("--csv", help="write the level table as CSV")

    p = add("fit", cmd_fit, "fit (L, V0) to hbar_omega and delta")
    p.add_argument("--hbar-omega", type=float, default=presets.ACTIVATION_MEV, help="meV")
    p.add_argument("--delta", type=float, default=presets.SINGLET_DELTA_UEV, help="ueV")
    p.add_argument("--N", type=int, default=6)
    p.add_argument("--init-L", type=float)
    p.add_argument("--init-V0", type=float)
    p.add_argument("--hbar-omega-mode", choices=HBAR_OMEGA_MODES, default="centroid")

    p = add("isotope", cmd_isotope, "ZPL isotope shifts from path-length scaling")
    p.add_argument("--excited-L", type=float, default=singlet.L)
    p.add_argument("--excited-V0", type=float, default=singlet.V0)
    p.add_argument("--ground-L", type=float, default=ground.L)
    p.add_argument("--ground-V0", type=float, default=ground.V0)
    p.add_argument("--N", type=int, default=6)
    p.add_argument("--mass", type=float, nargs="+", default=[29.0, 30.0], help="u")
    p.add_argument("--reference-mass", type=float, default=28.0)
    p.add_argument("--f", type=float, default=1.0, help="participation fraction")
    p.add_argument("--recipe", choices=RECIPES, default="excited_only")
    p.add_argument("--calibrate-shift", type=float, help="calibrate f to this shift (ueV)")
    p.add_argument("--calibrate-mass", type=float, default=29.0)
    p.add_argument("--csv")

    p = add("average-tensor", cmd_average_tensor, "motional average of a 3x3 tensor")
    p.add_argument("--tensor", type=float, nargs="+", default=[307.0, 911.0, -1218.0], help="MHz")
    p.add_argument("--axis", type=float, nargs=3, help="averaging axis (default: middle principal axis)")
    p.add_argument("--order", type=int, default=3)

    p = add("rates", cmd_rates, "reorientation rate and symmetry regime")
    p.add_argument("--delta", type=float, default=presets.TRIPLET_DELTA_UEV, help="ueV")
    p.add_argument("--alpha", type=float, default=0.0, help="Hz/K")
    p.add_argument("--beta", type=float, default=0.0, help="Hz/K^5")
    p.add_argument("--calibrate-T", type=float, help="calibrate beta to cross the probe at this T (K)")
    p.add_argument("--probe", type=float, default=presets.ODMR_PROBE_GHZ, help="GHz")
    p.add_argument("--temperature", type=float, nargs="+", default=[1.7, 5.0, 6.0, 30.0], help="K")
    p.add_argument("--csv")

    p = add("spectrum", cmd_spectrum, "ZPL fine-structure lines and broadened spectrum")
    _rotor_opts(p, singlet.L, singlet.V0)
    p.add_argument("--delta", type=float, help="use an ideal tight-binding band with this delta (ueV)")
    p.add_argument("--temperature", type=float, default=1.4, help="K, or 'inf'")
    p.add_argument("--zpl", type=float, default=presets.ZPL_EV, help="eV")
    p.add_argument("--weighting", choices=WEIGHTINGS, default="emission")
    p.add_argument("--w0", type=float, default=0.1, help="residual FWHM, ueV")
    p.add_argument("--wa", type=float, help="Arrhenius prefactor, ueV (default: calibrated)")
    p.add_argument("--width-20K", type=float, default=12.0, help="FWHM at 20 K used for calibration, ueV")
    p.add_argument("--Ea", type=float, default=presets.ACTIVATION_MEV, help="meV")
    p.add_argument("--shape", choices=SHAPES, default="gaussian")
    p.add_argument("--grid", type=float, nargs=3, metavar=("START", "STOP", "STEP"), help="ueV")
    p.add_argument("--csv", help="write the sampled spectrum as CSV")

    p = add("odmr", cmd_odmr, "triplet ODMR resonance fields")
    p.add_argument("--D", type=float, nargs="+", help="MHz, defect frame (default: calculated tensor)")
    p.add_argument("--A", type=float, nargs="+", help="hyperfine tensor, MHz")
    p.add_argument("--g", type=float, default=2.0023)
    p.add_argument("--frame", choices=("defect", "identity"), default="defect")
    p.add_argument("--average", action="store_true", help="motionally average D and A first")
    p.add_argument("--single", action="store_true", help="only the reference orientation")
    p.add_argument("--direction", type=float, nargs=3, default=list(presets.ODMR_FIELD_DIRECTION))
    p.add_argument("--probe", type=float, default=presets.ODMR_PROBE_GHZ, help="GHz")
    p.add_argument("--B-max", type=float, default=2.0, help="T")
    p.add_argument("--csv")

    p = add("paper-repro", cmd_paper_repro, "compare computed values with the published ones")
    p.add_argument("--report", help="also write the report to this file")

    return parser


def _subparsers(parser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action
    raise LookupError("parser has no subcommands")


def _apply_config(parser, args):
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as err:
        raise UsageError(f"cannot read config: {err}") from None
    except json.JSONDecodeError as err:
        raise UsageError(f"config is not valid JSON: {err}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise UsageError(f"config schema_version must be {SCHEMA_VERSION}")
    commands = set(_subparsers(parser).choices)
    unknown = set(cfg) - commands - {"schema_version"}
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    block = cfg.get(args.command, {})
    if not isinstance(block, dict):
        raise UsageError(f"config block {args.command!r} must be an object")
    p = _subparsers(parser).choices[args.command]
    dests = {a.dest for a in p._actions if a.dest not in ("help", "func")}
    bad = set(block) - dests
    if bad:
        raise UsageError(f"unknown keys in config block {args.command!r}: {', '.join(sorted(bad))}")
    return p, block


def run(argv=None) -> int:
    """Run the CLI and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            sub, block = _apply_config(parser, args)
            sub.set_defaults(**block)
            args = parser.parse_args(argv)
        out = Emitter(args)
        status = args.func(args, out) or 0
        out.flush()
        return status
    except UsageError as err:
        print(f"gcenter: error: {err}", file=sys.stderr)
        return 2
    except ComputeError as err:
        print(f"gcenter: compute error: {err}", file=sys.stderr)
        return 1
    except GCenterError as err:  # pragma: no cover
        print(f"gcenter: error: {err}", file=sys.stderr)
        return 1


def main():  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
