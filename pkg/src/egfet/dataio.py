"""File formats: sweep CSVs with `#`-prefixed metadata, JSON extraction
reports, and the unit conversions at the boundary.

Internally everything is SI; files speak the lab conventions (mobility
in cm^2/(V s), oxide capacitance in F/cm^2, currents in A/mA/uA/nA).
All writers are deterministic: no timestamps, floats at 17 significant
digits.
"""

import json
import os
from pathlib import Path

import numpy as np

from .errors import (
    InconsistentFamily,
    IoError,
    MissingMetadata,
    NonMonotoneGrid,
    ParseError,
)
from .extraction import ExtractionReport, Uncertain
from .numerics import LineFit, SampledCurve
from .sweeps import DrainSweep, DrainSweepFamily, GateSweep

VOLTAGE_UNITS = {"V": 1.0, "mV": 1e-3}
CURRENT_UNITS = {"A": 1.0, "mA": 1e-3, "uA": 1e-6, "nA": 1e-9}

M2_PER_CM2 = 1e-4  # cm^2/(V s) -> m^2/(V s)


def fmt(x):
    """Format a float with 17 significant digits (value-preserving)."""
    return format(float(x), ".17g")


def atomic_write_text(path, text):
    """Write-then-rename so concurrent runs never see partial files."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp.write_text(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _parse_metadata(lines):
    """Collect `# key=value` pairs from leading comment lines; returns
    (metadata dict, index of the first non-comment line)."""
    meta = {}
    i = 0
    for i, raw in enumerate(lines):
        line = raw.strip()
        if not line.startswith("#"):
            break
        body = line.lstrip("#").strip()
        if "=" in body:
            key, _, value = body.partition("=")
            meta[key.strip()] = value.strip()
    return meta, i


def _unit_factors(units_field, n_voltage_cols, path):
    parts = [u.strip() for u in units_field.split(",")]
    if len(parts) != n_voltage_cols + 1:
        raise ParseError(
            f"{path}: units must declare {n_voltage_cols + 1} columns")
    factors = []
    for u in parts[:-1]:
        if u not in VOLTAGE_UNITS:
            raise ParseError(f"{path}: unknown voltage unit {u!r}")
        factors.append(VOLTAGE_UNITS[u])
    cu = parts[-1]
    if cu not in CURRENT_UNITS:
        raise ParseError(f"{path}: unknown current unit {cu!r}")
    factors.append(CURRENT_UNITS[cu])
    return factors


def _read_rows(lines, start, n_cols, path):
    rows = []
    for ln, raw in enumerate(lines[start:], start=start + 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        if len(fields) != n_cols:
            raise ParseError(f"expected {n_cols} fields, got {len(fields)}",
                             line_number=ln)
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise ParseError(f"{exc}", line_number=ln) from exc
    return rows


def _read_lines(path):
    try:
        return Path(path).read_text().splitlines()
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc


def _require(meta, key, path):
    if key not in meta:
        raise MissingMetadata(f"{path}: missing `# {key}=` metadata")
    return meta[key]


def read_gate_sweep(path):
    """Read a gate-sweep CSV (columns v_gs,i_ds; metadata kind, v_ds,
    units, optional label). Rows with non-finite or negative current are
    dropped, with the count recorded as a diagnostic."""
    path = Path(path)
    lines = _read_lines(path)
    meta, start = _parse_metadata(lines)
    kind = _require(meta, "kind", path)
    if kind != "gate_sweep":
        raise ParseError(f"{path}: kind={kind!r}, expected gate_sweep")
    v_ds = float(_require(meta, "v_ds", path))
    fv, fi = _unit_factors(_require(meta, "units", path), 1, path)
    header_idx = start
    if start >= len(lines) or lines[start].strip() != "v_gs,i_ds":
        raise ParseError("expected header row `v_gs,i_ds`",
                         line_number=header_idx + 1)
    rows = _read_rows(lines, start + 1, 2, path)
    data = np.asarray(rows, dtype=float).reshape(-1, 2)
    v = data[:, 0] * fv
    i = data[:, 1] * fi
    keep = np.isfinite(i) & (i >= 0) & np.isfinite(v)
    diags = []
    if np.count_nonzero(~keep):
        diags.append(
            f"dropped {int(np.count_nonzero(~keep))} rows with non-finite "
            "or negative current")
    v, i = v[keep], i[keep]
    if v.size == 0:
        raise ParseError(f"{path}: no usable data rows")
    return GateSweep(v_ds=v_ds, v_gs=v, i_ds=i,
                     label=meta.get("label", ""), diagnostics=diags)


def write_gate_sweep(sweep, path):
    lines = ["# kind=gate_sweep",
             f"# v_ds={fmt(sweep.v_ds)}",
             f"# label={sweep.label}",
             "# units=V,A",
             "v_gs,i_ds"]
    for v, i in zip(sweep.v_gs, sweep.i_ds):
        lines.append(f"{fmt(v)},{fmt(i)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def _family_from_groups(groups, label, diags):
    sweeps = []
    for vg in groups:
        pts = sorted(groups[vg])
        v_ds = np.array([p[0] for p in pts])
        i_ds = np.array([p[1] for p in pts])
        if np.any(np.diff(v_ds) <= 0):
            raise InconsistentFamily(
                f"duplicate or non-increasing v_ds points at v_gs={vg:g} V")
        sweeps.append(DrainSweep(v_gs=vg, v_ds=v_ds, i_ds=i_ds))
    return DrainSweepFamily(sweeps=sweeps, label=label, diagnostics=diags)


def _read_drain_file(path):
    """One drain-sweep file: either long format (v_gs,v_ds,i_ds columns)
    or per-gate format (v_ds,i_ds columns with `# v_gs=` metadata)."""
    path = Path(path)
    lines = _read_lines(path)
    meta, start = _parse_metadata(lines)
    kind = _require(meta, "kind", path)
    if kind != "drain_sweep":
        raise ParseError(f"{path}: kind={kind!r}, expected drain_sweep")
    label = meta.get("label", "")
    header = lines[start].strip() if start < len(lines) else ""
    if header == "v_gs,v_ds,i_ds":
        fg, fv, fi = _unit_factors(_require(meta, "units", path), 2, path)
        rows = _read_rows(lines, start + 1, 3, path)
        groups = {}
        for vg, vd, i in rows:
            groups.setdefault(vg * fg, []).append((vd * fv, i * fi))
        return groups, label
    if header == "v_ds,i_ds":
        v_gs = float(_require(meta, "v_gs", path))
        fv, fi = _unit_factors(_require(meta, "units", path), 1, path)
        rows = _read_rows(lines, start + 1, 2, path)
        return {v_gs: [(vd * fv, i * fi) for vd, i in rows]}, label
    raise ParseError(f"{path}: expected header `v_gs,v_ds,i_ds` or "
                     "`v_ds,i_ds`")


def read_drain_family(path):
    """Read a drain-sweep family from a single long-format file or a
    directory of per-gate-voltage files. The same gate voltage appearing
    twice raises InconsistentFamily."""
    path = Path(path)
    if path.is_dir():
        groups = {}
        label = ""
        for child in sorted(path.iterdir()):
            if child.suffix != ".csv":
                continue
            file_groups, file_label = _read_drain_file(child)
            label = label or file_label
            for vg, pts in file_groups.items():
                if vg in groups:
                    raise InconsistentFamily(
                        f"gate voltage {vg:g} V appears in more than one "
                        "file")
                groups[vg] = pts
        if not groups:
            raise ParseError(f"{path}: no drain-sweep CSV files found")
        return _family_from_groups(groups, label, [])
    groups, label = _read_drain_file(path)
    return _family_from_groups(groups, label, [])


def write_drain_family(family, path):
    lines = ["# kind=drain_sweep",
             f"# label={family.label}",
             "# units=V,V,A",
             "v_gs,v_ds,i_ds"]
    for s in family.sweeps:
        for vd, i in zip(s.v_ds, s.i_ds):
            lines.append(f"{fmt(s.v_gs)},{fmt(vd)},{fmt(i)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


# --- JSON reports ----------------------------------------------------------

def _num(x):
    if x is None:
        return None
    x = float(x)
    if x != x:  # NaN has no JSON literal
        return None
    return float(fmt(x))


def report_to_dict(report):
    """Fixed-field-order dict representation of an ExtractionReport."""
    d = {"method": report.method, "label": report.label,
         "v_ds": _num(report.v_ds)}
    d["v_t"] = {"value": _num(report.v_t.value),
                "sigma": _num(report.v_t.sigma), "unit": "V"}
    if report.mu_0 is None:
        d["mu_0"] = None
    else:
        d["mu_0"] = {"value": _num(report.mu_0.value / M2_PER_CM2),
                     "sigma": _num(report.mu_0.sigma / M2_PER_CM2),
                     "unit": "cm2/Vs"}
    if report.theta_range is None:
        d["theta_range"] = None
    else:
        d["theta_range"] = {"min": _num(report.theta_range[0]),
                            "max": _num(report.theta_range[1]),
                            "unit": "1/V"}
    d["r_sd"] = {"value": _num(report.r_sd_used), "unit": "ohm"}
    if report.fit is None:
        d["fit"] = None
    else:
        d["fit"] = {"slope": _num(report.fit.slope),
                    "intercept": _num(report.fit.intercept),
                    "x_intercept": _num(report.fit.x_intercept),
                    "r_squared": _num(report.fit.r_squared),
                    "window": list(report.fit.window),
                    "slope_sigma": _num(report.fit.slope_sigma),
                    "intercept_sigma": _num(report.fit.intercept_sigma),
                    "x_intercept_sigma": _num(report.fit.x_intercept_sigma)}
    curves = {}
    if report.theta_curve is not None:
        curves["v_gs"] = [_num(v) for v in report.theta_curve.x]
        curves["theta_per_volt"] = [_num(v) for v in report.theta_curve.y]
    if report.mu_eff_curve is not None:
        curves.setdefault("v_gs", [_num(v) for v in report.mu_eff_curve.x])
        curves["mu_eff_cm2_per_vs"] = [
            _num(v / M2_PER_CM2) for v in report.mu_eff_curve.y]
    d["curves"] = curves
    d["extras"] = {k: _num(v) for k, v in sorted(report.extras.items())}
    d["diagnostics"] = list(report.diagnostics)
    return d


def write_report(report, path):
    """Serialize an ExtractionReport to JSON (fixed field order, floats
    at 17 significant digits, no timestamps)."""
    atomic_write_text(path, json.dumps(report_to_dict(report), indent=2)
                      + "\n")


def report_from_dict(d):
    def unc(obj, scale=1.0):
        if obj is None:
            return None
        sigma = obj.get("sigma")
        return Uncertain(obj["value"] * scale,
                         float("nan") if sigma is None else sigma * scale)
    fit = None
    if d.get("fit") is not None:
        f = d["fit"]
        fit = LineFit(f["slope"], f["intercept"], f["x_intercept"],
                      f["r_squared"], tuple(f["window"]),
                      f.get("slope_sigma", float("nan")),
                      f.get("intercept_sigma", float("nan")),
                      f.get("x_intercept_sigma", float("nan")))
    curves = d.get("curves") or {}
    theta_curve = None
    mu_eff_curve = None
    if "theta_per_volt" in curves:
        theta_curve = SampledCurve(curves["v_gs"], curves["theta_per_volt"])
    if "mu_eff_cm2_per_vs" in curves:
        mu_eff_curve = SampledCurve(
            curves["v_gs"],
            np.asarray(curves["mu_eff_cm2_per_vs"]) * M2_PER_CM2)
    theta_range = None
    if d.get("theta_range") is not None:
        theta_range = (d["theta_range"]["min"], d["theta_range"]["max"])
    return ExtractionReport(
        method=d["method"],
        label=d.get("label", ""),
        v_t=unc(d["v_t"]),
        mu_0=unc(d.get("mu_0"), M2_PER_CM2),
        theta_curve=theta_curve,
        theta_range=theta_range,
        mu_eff_curve=mu_eff_curve,
        r_sd_used=d["r_sd"]["value"],
        fit=fit,
        v_ds=d.get("v_ds"),
        diagnostics=list(d.get("diagnostics", [])),
        extras=dict(d.get("extras", {})),
    )


def read_report(path):
    path = Path(path)
    try:
        return report_from_dict(json.loads(path.read_text()))
    except (OSError, json.JSONDecodeError) as exc:
        raise IoError(f"cannot read report {path}: {exc}") from exc
