"""Command-line front end.

Subcommands: simulate (synthesize sweep CSVs), extract (run the
extraction methods on sweep files), rsd (series-resistance estimates),
compare (threshold-shift table across reports), plot (render figures).

Boundary units follow lab convention: mobility in cm^2/(V s), oxide
capacitance in F/cm^2, resistance in ohm, voltages in V. Grids are
given as start:stop:step (stop inclusive up to rounding).
"""

import argparse
import json
import os
import re
import sys

import numpy as np

from . import dataio, plots
from .dataio import M2_PER_CM2, atomic_write_text, fmt
from .errors import (
    DataError,
    EgfetError,
    ExtractionError,
    ModelError,
    NumericsError,
)
from .extraction import (
    ALL_METHODS,
    METHOD_GDS,
    METHOD_IDS_GM,
    METHOD_INV_IDS,
    METHOD_PEAK_GM,
    compare_reports,
    gds_method_extract,
    ids_over_sqrt_gm_extract,
    inv_ids_extract,
    peak_gm_extract,
    rsd_channel_length_intersection,
    rsd_output_resistance,
)
from .model import (
    DeviceSpec,
    ModelParams,
    synth_drain_sweep_family,
    synth_gate_sweep,
)
from .numerics import SampledCurve, first_derivative

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_MODEL = 4
EXIT_NUMERICS = 5
EXIT_EXTRACTION = 6

CM2_PER_M2 = 1.0 / M2_PER_CM2
F_PER_CM2_TO_SI = 1e4  # F/cm^2 -> F/m^2


def _parse_grid(text):
    m = re.fullmatch(r"([^:]+):([^:]+):([^:]+)", text)
    if not m:
        raise argparse.ArgumentTypeError(
            f"grid {text!r} must be start:stop:step")
    start, stop, step = (float(g) for g in m.groups())
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    n = int(round((stop - start) / step))
    return start + step * np.arange(n + 1)


def _parse_window(text):
    lo, _, hi = text.partition(":")
    return float(lo), float(hi)


def _device_spec(args):
    return DeviceSpec(width=args.width_um * 1e-6,
                      length=args.length_um * 1e-6,
                      c_ox=args.cox * F_PER_CM2_TO_SI)


def _add_device_args(p):
    p.add_argument("--width-um", type=float, default=4.5,
                   help="channel width in micrometers (default 4.5)")
    p.add_argument("--length-um", type=float, default=1.5,
                   help="channel length in micrometers (default 1.5)")
    p.add_argument("--cox", type=float, default=57.8e-9,
                   help="oxide capacitance in F/cm^2 (default 57.8e-9)")


def _default_outdir():
    return os.environ.get("EGFET_OUTDIR", ".")


def _slug(text):
    s = re.sub(r"[^A-Za-z0-9._-]+", "_", text).strip("_")
    return s or "sweep"


def _window_indices(v_gs, window):
    lo, hi = window
    start = int(np.searchsorted(v_gs, lo, side="left"))
    stop = int(np.searchsorted(v_gs, hi, side="right"))
    return start, stop


def cmd_simulate(args):
    spec = _device_spec(args)
    params = ModelParams(v_t=args.vt, mu_0=args.mu0 * M2_PER_CM2,
                         theta=args.theta, r_sd=args.rsd)
    print(f"simulating: v_t={args.vt:g} V, mu_0={args.mu0:g} cm2/Vs, "
          f"theta={args.theta:g} 1/V, r_sd={args.rsd:g} ohm, "
          f"W/L={spec.aspect_ratio():g}, "
          f"c_ox={args.cox:g} F/cm2, model={args.model}")
    wrote = False
    if args.out:
        sweep = synth_gate_sweep(spec, params, args.vds, args.grid,
                                 noise=args.noise, seed=args.seed,
                                 label=args.label, model=args.model)
        dataio.write_gate_sweep(sweep, args.out)
        print(f"wrote gate sweep ({len(sweep)} points) to {args.out}")
        wrote = True
    if args.family_out:
        family = synth_drain_sweep_family(
            spec, params, args.gates, args.vds_grid, noise=args.noise,
            seed=args.seed + 1, label=args.label, model=args.model)
        dataio.write_drain_family(family, args.family_out)
        print(f"wrote drain family ({len(family)} sweeps) to "
              f"{args.family_out}")
        wrote = True
    if not wrote:
        raise argparse.ArgumentTypeError(
            "nothing to do: give --out and/or --family-out")
    return EXIT_OK


def _run_methods(args, spec, sweep, family, r_sd, window):
    reports = []
    skipped = []
    run_all = args.method == "all"
    methods = ALL_METHODS if run_all else (args.method,)
    for method in methods:
        if method == METHOD_GDS and family is None:
            skipped.append((METHOD_GDS, "skipped: needs a drain-sweep "
                                        "family"))
            continue
        if method != METHOD_GDS and sweep is None:
            skipped.append((method, "skipped: needs a gate sweep"))
            continue
        try:
            if method == METHOD_GDS:
                slice_reports = gds_method_extract(family, spec, r_sd=r_sd)
                reports.append(slice_reports[-1])  # deepest drain bias
            elif method == METHOD_PEAK_GM:
                reports.append(peak_gm_extract(sweep))
            elif method == METHOD_IDS_GM:
                reports.append(ids_over_sqrt_gm_extract(
                    sweep, spec, r_sd=r_sd, window=window))
            elif method == METHOD_INV_IDS:
                reports.append(inv_ids_extract(
                    sweep, spec, r_sd=r_sd, window=window,
                    smooth_window=args.smooth))
        except ExtractionError as exc:
            # With --method all a single failing method should not kill
            # the whole run; an explicitly requested method should.
            if not run_all:
                raise
            skipped.append((method, f"skipped: {exc}"))
    return reports, skipped


def _summary_table(reports, skipped):
    lines = [f"{'method':<10} {'V_T (V)':>10} {'mu_0 (cm2/Vs)':>14} "
             f"{'theta range (1/V)':>20} {'r^2':>8}"]
    for r in reports:
        mu = "-" if r.mu_0 is None else f"{r.mu_0.value * CM2_PER_M2:.1f}"
        tr = "-" if r.theta_range is None else (
            f"{r.theta_range[0]:.3f} .. {r.theta_range[1]:.3f}")
        r2 = "-" if r.fit is None else f"{r.fit.r_squared:.4f}"
        lines.append(f"{r.method:<10} {r.v_t.value:>10.4f} {mu:>14} "
                     f"{tr:>20} {r2:>8}")
    for method, why in skipped:
        lines.append(f"{method:<10} {why}")
    return "\n".join(lines)


def cmd_extract(args):
    spec = _device_spec(args)
    sweep = dataio.read_gate_sweep(args.input) if args.input else None
    family = dataio.read_drain_family(args.family) if args.family else None
    if sweep is None and family is None:
        raise argparse.ArgumentTypeError("give --input and/or --family")
    if args.rsd == "auto":
        if family is None:
            raise argparse.ArgumentTypeError(
                "--rsd auto needs a drain family (--family)")
        hint = peak_gm_extract(sweep).v_t.value if sweep is not None else 0.0
        r_sd = rsd_output_resistance(family, hint).r_sd
        print(f"r_sd from output resistance: {r_sd:.3f} ohm")
    else:
        r_sd = float(args.rsd)
    window = None
    if args.window and sweep is not None:
        window = _window_indices(sweep.v_gs, args.window)
    reports, skipped = _run_methods(args, spec, sweep, family, r_sd, window)
    os.makedirs(args.outdir, exist_ok=True)
    base = _slug((sweep.label if sweep is not None else None)
                 or (family.label if family is not None else None) or "sweep")
    for r in reports:
        path = os.path.join(args.outdir, f"{base}_{r.method}.json")
        dataio.write_report(r, path)
        if args.plot:
            _emit_method_plot(r, sweep, family, spec,
                              os.path.join(args.outdir,
                                           f"{base}_{r.method}.svg"))
    print(_summary_table(reports, skipped))
    return EXIT_OK


def _linearizing_curve(report, sweep, family, spec):
    """Re-evaluate the method's straight-line function over the fit
    window for plotting."""
    if report.fit is None:
        return None
    lo, hi = report.fit.window
    if report.method == METHOD_IDS_GM:
        curve = SampledCurve(sweep.v_gs, sweep.i_ds)
        gm = first_derivative(curve)
        ok = gm.y[lo:hi] > 0
        if not np.all(ok):
            return None
        return SampledCurve(sweep.v_gs[lo:hi],
                            sweep.i_ds[lo:hi] / np.sqrt(gm.y[lo:hi]))
    if report.method == METHOD_INV_IDS:
        x = sweep.v_gs[lo:hi]
        return SampledCurve(
            x, report.fit.slope * x + report.fit.intercept)
    if report.method == METHOD_GDS and family is not None:
        gates = family.gate_voltages()[lo:hi]
        return SampledCurve(
            gates, report.fit.slope * gates + report.fit.intercept)
    return None


def _emit_method_plot(report, sweep, family, spec, path):
    curve = _linearizing_curve(report, sweep, family, spec)
    if curve is None:
        return
    plots.emit_plot([(report.method, curve)], path, fit=report.fit,
                    title=f"{report.method} ({report.label})",
                    ylabel="linearized function")


def cmd_rsd(args):
    printed = False
    if args.family:
        family = dataio.read_drain_family(args.family)
        est = rsd_output_resistance(family, args.vt_hint)
        print(f"output-resistance asymptote: {est.r_sd:.3f} "
              f"+/- {est.sigma:.3f} ohm (min R_tot {est.r_tot_min:.3f} ohm)")
        for d in est.diagnostics:
            print(f"  note: {d}")
        printed = True
    if args.devices:
        devices = []
        for item in args.devices:
            l_text, _, path = item.partition(":")
            devices.append((float(l_text) * 1e-6,
                            dataio.read_gate_sweep(path)))
        r_sd, delta_l = rsd_channel_length_intersection(devices)
        print(f"channel-length intersection: r_sd = {r_sd:.3f} ohm, "
              f"delta_L = {delta_l * 1e6:.4f} um")
        printed = True
    if not printed:
        raise argparse.ArgumentTypeError(
            "give --family and/or --devices L_um:file ...")
    return EXIT_OK


def cmd_compare(args):
    reports = [dataio.read_report(p) for p in args.reports]
    table = compare_reports(reports, args.reference)
    print(table.to_text())
    if args.out:
        payload = {
            "reference": table.reference_label,
            "rows": [
                {"label": r.label, "method": r.method,
                 "v_t": float(fmt(r.v_t)),
                 "v_t_reference": float(fmt(r.v_t_reference)),
                 "delta_v_t": float(fmt(r.delta_v_t))}
                for r in table.rows
            ],
        }
        atomic_write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def cmd_plot(args):
    spec = _device_spec(args)
    sweep = dataio.read_gate_sweep(args.input) if args.input else None
    family = dataio.read_drain_family(args.family) if args.family else None
    if sweep is None and family is None:
        raise argparse.ArgumentTypeError("give --input and/or --family")
    r_sd = float(args.rsd)
    window = None
    if args.window and sweep is not None:
        window = _window_indices(sweep.v_gs, args.window)
    reports, _ = _run_methods(args, spec, sweep, family, r_sd, window)
    os.makedirs(args.outdir, exist_ok=True)
    base = _slug((sweep.label if sweep is not None else None)
                 or (family.label if family is not None else None) or "sweep")
    written = []
    if sweep is not None:
        path = os.path.join(args.outdir, f"{base}_iv_gm.svg")
        plots.plot_iv_gm(sweep, path)
        written.append(path)
    for r in reports:
        path = os.path.join(args.outdir, f"{base}_{r.method}.svg")
        _emit_method_plot(r, sweep, family, spec, path)
        if os.path.exists(path):
            written.append(path)
        if r.theta_curve is not None:
            path = os.path.join(args.outdir,
                                f"{base}_{r.method}_theta_mu_eff.svg")
            plots.plot_theta_mu_eff(r, path)
            written.append(path)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="egfet",
        description="Linear-region FET parameter extraction: threshold "
                    "voltage, low-field mobility, mobility degradation, "
                    "series resistance. Boundary units: V, cm2/Vs, F/cm2, "
                    "ohm.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize sweep CSVs from model "
                                        "parameters")
    p.add_argument("--vt", type=float, required=True, help="threshold (V)")
    p.add_argument("--mu0", type=float, required=True,
                   help="low-field mobility (cm2/Vs)")
    p.add_argument("--theta", type=float, default=0.0,
                   help="mobility-degradation coefficient (1/V)")
    p.add_argument("--rsd", type=float, default=0.0,
                   help="series resistance (ohm)")
    p.add_argument("--vds", type=float, default=0.4,
                   help="gate-sweep drain bias (V)")
    p.add_argument("--grid", type=_parse_grid, default="0:4:0.1",
                   help="gate grid start:stop:step in V (default 0:4:0.1)")
    p.add_argument("--gates", type=_parse_grid, default="2:4.5:0.5",
                   help="drain-family gate list start:stop:step in V")
    p.add_argument("--vds-grid", type=_parse_grid, default="0:0.4:0.05",
                   help="drain-family V_ds grid start:stop:step in V")
    p.add_argument("--noise", type=float, default=0.0,
                   help="relative current noise (multiplicative Gaussian)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label", default="synthetic")
    p.add_argument("--model", choices=("implicit", "simplified"),
                   default="implicit",
                   help="exact quadratic-root current or first-order form")
    p.add_argument("--out", help="gate-sweep CSV path")
    p.add_argument("--family-out", help="drain-family CSV path")
    _add_device_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("extract", help="run extraction methods on sweep "
                                       "files")
    p.add_argument("--input", help="gate-sweep CSV")
    p.add_argument("--family", help="drain-family CSV or directory")
    p.add_argument("--method", default="all",
                   choices=("all",) + ALL_METHODS)
    p.add_argument("--rsd", default="0",
                   help="series resistance in ohm, or 'auto' to estimate "
                        "from the drain family (default 0)")
    p.add_argument("--window",
                   type=_parse_window,
                   help="gate-voltage fit window lo:hi in V (default "
                        "automatic)")
    p.add_argument("--smooth", type=int, default=5,
                   help="smoothing window for the reciprocal-current "
                        "method (odd, 1 disables; default 5)")
    p.add_argument("--outdir", default=_default_outdir(),
                   help="output directory (default $EGFET_OUTDIR or .)")
    p.add_argument("--plot", action="store_true",
                   help="also render one SVG per method")
    _add_device_args(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("rsd", help="series-resistance estimates")
    p.add_argument("--family", help="drain-family CSV or directory")
    p.add_argument("--vt-hint", type=float, default=0.0,
                   help="threshold estimate for the output-resistance fit")
    p.add_argument("--devices", nargs="+", metavar="L_UM:FILE",
                   help="mask length (um) and gate-sweep CSV per device")
    p.set_defaults(func=cmd_rsd)

    p = sub.add_parser("compare", help="threshold-shift table across "
                                       "reports")
    p.add_argument("--reports", nargs="+", required=True,
                   help="report JSON files")
    p.add_argument("--reference", required=True,
                   help="label of the reference condition")
    p.add_argument("--out", help="also write the table as JSON")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot", help="render figures for sweep files")
    p.add_argument("--input", help="gate-sweep CSV")
    p.add_argument("--family", help="drain-family CSV or directory")
    p.add_argument("--method", default="all",
                   choices=("all",) + ALL_METHODS)
    p.add_argument("--rsd", type=float, default=0.0)
    p.add_argument("--window", type=_parse_window)
    p.add_argument("--smooth", type=int, default=5)
    p.add_argument("--outdir", default=_default_outdir())
    _add_device_args(p)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except NumericsError as exc:
        print(f"numerics error: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except ExtractionError as exc:
        print(f"extraction error: {exc}", file=sys.stderr)
        return EXIT_EXTRACTION
    except EgfetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
