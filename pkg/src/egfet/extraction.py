"""Parameter extraction from I-V sweep data.

Four threshold-voltage estimators are provided, all based on the
linear-region current model in :mod:`egfet.model`:

* ``peak_gm_extract`` — tangent-line x-intercept at the transconductance
  peak (V_T only; benchmark method).
* ``ids_over_sqrt_gm_extract`` — fits I/sqrt(gm) vs V_gs, which is a
  straight line unaffected by mobility degradation and series
  resistance; yields V_T, mu_0, a pointwise theta curve and mu_eff.
* ``inv_ids_extract`` — fits [d2(1/I)/dVgs2]^(-1/3) vs V_gs; same
  outputs, noisier because of the double differencing.
* ``gds_method_extract`` — from a drain-sweep family, fits
  gds/sqrt(d gds/dVgs) vs V_gs at each drain-bias slice.

Two series-resistance estimators (single-device output resistance and
multi-device channel-resistance intersection) and a threshold-shift
comparison complete the module.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateWindow,
    ExtractionError,
    InsufficientDevices,
    InsufficientGateValues,
    MissingReference,
    NegativeSecondDerivative,
    NoInteriorMax,
    NonpositiveCurrent,
    NonpositiveDerivative,
    NonpositiveGm,
    ParallelLines,
    WindowBelowThreshold,
)
from .numerics import (
    LineFit,
    SampledCurve,
    auto_window,
    derivative_o4,
    first_derivative,
    fit_line,
    second_derivative,
    smooth,
)

MIN_SWEEP_POINTS = 8
DEFAULT_MIN_WINDOW = 6
# Default fit windows start this far above the peak-gm threshold estimate.
OVERDRIVE_MARGIN = 0.2

METHOD_PEAK_GM = "peak_gm"
METHOD_IDS_GM = "ids_gm"
METHOD_INV_IDS = "inv_ids"
METHOD_GDS = "gds"

ALL_METHODS = (METHOD_PEAK_GM, METHOD_IDS_GM, METHOD_INV_IDS, METHOD_GDS)


@dataclass
class Uncertain:
    """A value with a one-sigma uncertainty (NaN when not estimated)."""

    value: float
    sigma: float = float("nan")


@dataclass
class ExtractionReport:
    """Per-method extraction result.

    v_t in V, mu_0 in m^2/(V s) (converted to cm^2/(V s) at the file
    boundary), theta_curve in 1/V vs V_gs over the fit window, r_sd_used
    the series resistance assumed during extraction.
    """

    method: str
    label: str
    v_t: Uncertain
    mu_0: Uncertain = None
    theta_curve: SampledCurve = None
    theta_range: tuple = None
    mu_eff_curve: SampledCurve = None
    r_sd_used: float = 0.0
    fit: LineFit = None
    v_ds: float = None
    diagnostics: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)


def _check_sweep(sweep):
    if len(sweep) < MIN_SWEEP_POINTS:
        raise InsufficientGateValues(
            f"sweep has {len(sweep)} points; extraction needs at least "
            f"{MIN_SWEEP_POINTS}")


def _longest_true_run(mask, start=0):
    """(lo, hi) of the longest contiguous run of True at index >= start."""
    best = (0, 0)
    lo = None
    for i in range(start, mask.size + 1):
        on = i < mask.size and mask[i]
        if on and lo is None:
            lo = i
        elif not on and lo is not None:
            if i - lo > best[1] - best[0]:
                best = (lo, i)
            lo = None
    return best


def _default_restriction(sweep, diags):
    """Gate voltage below which default fit windows are not allowed to
    start: peak-gm threshold estimate plus a fixed overdrive margin."""
    try:
        report = peak_gm_extract(sweep)
        return report.v_t.value + OVERDRIVE_MARGIN
    except ExtractionError as exc:
        diags.append(f"no peak-gm window restriction ({exc})")
        return -math.inf


def _windowed_fit(x, y, valid, sweep, window, min_points, diags, error_cls):
    """Select a window (user-provided or automatic over the longest valid
    run above the default restriction) and fit a line to y vs x.

    Returns a LineFit whose window indices refer to the full grid.
    """
    if window is not None:
        start, stop = int(window[0]), int(window[1])
        if not np.all(valid[start:stop]):
            raise error_cls(
                "requested window contains points where the method's "
                "linearizing function is undefined")
        fit = fit_line(SampledCurve(x[start:stop], y[start:stop]),
                       (0, stop - start))
        return LineFit(fit.slope, fit.intercept, fit.x_intercept,
                       fit.r_squared, (start, stop), fit.slope_sigma,
                       fit.intercept_sigma, fit.x_intercept_sigma)
    v_min = _default_restriction(sweep, diags)
    first = int(np.searchsorted(x, v_min)) if math.isfinite(v_min) else 0
    lo, hi = _longest_true_run(valid, start=first)
    if hi - lo < min_points:
        raise error_cls(
            f"only {hi - lo} usable points above the fit restriction; "
            f"need {min_points}")
    sub = SampledCurve(x[lo:hi], y[lo:hi])
    if hi - lo == min_points:
        w = (0, min_points)
        fit = fit_line(sub, w)
    else:
        w = auto_window(sub, min_points=max(min_points, DEFAULT_MIN_WINDOW))
        fit = fit_line(sub, w)
    return LineFit(fit.slope, fit.intercept, fit.x_intercept, fit.r_squared,
                   (lo + w[0], lo + w[1]), fit.slope_sigma,
                   fit.intercept_sigma, fit.x_intercept_sigma)


def peak_gm_extract(sweep):
    """Threshold voltage from the transconductance peak.

    gm is differenced from the sweep; at the gate voltage of maximum gm
    the I-V tangent is extrapolated to zero current and its x-intercept
    reported as V_T. Ties in the maximum resolve to the lowest gate
    voltage. The gate voltage of maximum dgm/dVgs is reported as an
    alternative estimate in `extras`.
    """
    _check_sweep(sweep)
    curve = SampledCurve(sweep.v_gs, sweep.i_ds)
    gm = first_derivative(curve)
    peak = float(np.max(gm.y))
    if peak <= 0:
        raise NonpositiveGm("transconductance is nowhere positive")
    i = int(np.flatnonzero(gm.y == peak).min())
    if i == 0 or i == len(curve) - 1:
        raise NoInteriorMax(
            "transconductance is maximal at a grid edge; sweep does not "
            "reach its peak")
    v_star = sweep.v_gs[i]
    v_t = v_star - sweep.i_ds[i] / gm.y[i]
    diags = list(sweep.diagnostics)
    extras = {"v_gs_at_peak_gm": float(v_star), "peak_gm": peak}
    dgm = first_derivative(gm)
    j = int(np.argmax(dgm.y))
    extras["v_t_at_max_gm_slope"] = float(sweep.v_gs[j])
    return ExtractionReport(
        method=METHOD_PEAK_GM,
        label=sweep.label,
        v_t=Uncertain(float(v_t)),
        r_sd_used=0.0,
        v_ds=sweep.v_ds,
        diagnostics=diags,
        extras=extras,
    )


def theta_pointwise(sweep, v_t, beta0, r_sd=0.0, window=None):
    """Pointwise mobility-degradation coefficient from measured current
    and differenced transconductance:

        theta = [I/(gm*(Vgs-Vt)) - 1]/(Vgs-Vt) - beta0*Rsd

    Evaluated over `window` (default: all points above v_t). gm is taken
    with the fourth-order stencil: here differencing bias translates
    directly into a theta offset, unlike in the line fits where it
    averages out.
    """
    # Difference only over the contiguous positive-current run so the
    # stencil never straddles the zero-current kink at threshold.
    lo_p, hi_p = _longest_true_run(sweep.i_ds > 0)
    if hi_p - lo_p < 3:
        raise NonpositiveCurrent("too few points with positive current")
    gm_run = derivative_o4(
        SampledCurve(sweep.v_gs[lo_p:hi_p], sweep.i_ds[lo_p:hi_p]))
    gm = np.full(len(sweep), np.nan)
    gm[lo_p:hi_p] = gm_run.y
    if window is None:
        idx = np.flatnonzero(sweep.v_gs > v_t)
    else:
        idx = np.arange(int(window[0]), int(window[1]))
    if idx.size == 0:
        raise WindowBelowThreshold("no evaluation points above threshold")
    vov = sweep.v_gs[idx] - v_t
    if np.any(vov <= 0):
        raise WindowBelowThreshold("window contains points at or below v_t")
    g = gm[idx]
    if not np.all(g > 0):
        raise NonpositiveGm("transconductance not positive over the window")
    theta = (sweep.i_ds[idx] / (g * vov) - 1.0) / vov - beta0 * r_sd
    return SampledCurve(sweep.v_gs[idx], theta)


def _mu_eff_curve(v_gs, i_ds, mu_0, theta, v_t, r_sd):
    r_s = r_sd / 2.0
    return SampledCurve(
        v_gs, mu_0 / (1.0 + theta * (v_gs - i_ds * r_s - v_t)))


def ids_over_sqrt_gm_extract(sweep, spec, r_sd=0.0, window=None,
                             min_points=DEFAULT_MIN_WINDOW):
    """Extraction from the straight line I/sqrt(gm) vs V_gs.

    The x-intercept gives V_T; the slope gives
    mu_0 = slope^2 / (C_ox * (W/L) * V_ds). theta and mu_eff curves are
    evaluated pointwise over the fit window using the measured current,
    the assumed r_sd, and the symmetric split R_s = r_sd/2.
    """
    _check_sweep(sweep)
    if r_sd < 0:
        raise ValueError("r_sd must be non-negative")
    diags = list(sweep.diagnostics)
    # gm on the positive-current run with the fourth-order stencil: the
    # x-intercept is amplified into theta at low overdrive, so the cheap
    # three-point stencil's bias is not acceptable here.
    lo_p, hi_p = _longest_true_run(sweep.i_ds > 0)
    if hi_p - lo_p < 3:
        raise NonpositiveCurrent("too few points with positive current")
    gm_run = derivative_o4(
        SampledCurve(sweep.v_gs[lo_p:hi_p], sweep.i_ds[lo_p:hi_p]))
    gm_y = np.zeros(len(sweep))
    gm_y[lo_p:hi_p] = gm_run.y
    valid = (gm_y > 0) & (sweep.i_ds > 0)
    f = np.zeros_like(sweep.i_ds)
    f[valid] = sweep.i_ds[valid] / np.sqrt(gm_y[valid])
    fit = _windowed_fit(sweep.v_gs, f, valid, sweep, window, min_points,
                        diags, NonpositiveGm)
    v_t = fit.x_intercept
    wl = spec.aspect_ratio()
    denom = spec.c_ox * wl * sweep.v_ds
    mu_0 = fit.slope ** 2 / denom
    mu_sigma = 2.0 * abs(fit.slope) * fit.slope_sigma / denom
    b0_hat = mu_0 * spec.c_ox * wl
    theta_curve = theta_pointwise(sweep, v_t, b0_hat, r_sd, window=fit.window)
    lo, hi = fit.window
    mu_eff = _mu_eff_curve(sweep.v_gs[lo:hi], sweep.i_ds[lo:hi], mu_0,
                           theta_curve.y, v_t, r_sd)
    return ExtractionReport(
        method=METHOD_IDS_GM,
        label=sweep.label,
        v_t=Uncertain(v_t, fit.x_intercept_sigma),
        mu_0=Uncertain(mu_0, mu_sigma),
        theta_curve=theta_curve,
        theta_range=(float(theta_curve.y.min()), float(theta_curve.y.max())),
        mu_eff_curve=mu_eff,
        r_sd_used=r_sd,
        fit=fit,
        v_ds=sweep.v_ds,
        diagnostics=diags,
    )


def inv_ids_extract(sweep, spec, r_sd=0.0, window=None, smooth_window=5,
                    min_points=DEFAULT_MIN_WINDOW):
    """Extraction from the straight line [d2(1/I)/dVgs2]^(-1/3) vs V_gs.

    1/I is smoothed (moving quadratic, `smooth_window` points, 1
    disables) before double differencing; points with a non-positive
    second derivative are excluded with a diagnostic. The slope s gives
    beta0 = 2*s^3/V_ds and hence mu_0; theta follows pointwise from the
    reciprocal-current form of the simplified model.
    """
    _check_sweep(sweep)
    if r_sd < 0:
        raise ValueError("r_sd must be non-negative")
    diags = list(sweep.diagnostics)
    positive = sweep.i_ds > 0
    lo_p, hi_p = _longest_true_run(positive)
    if hi_p - lo_p < MIN_SWEEP_POINTS:
        raise NonpositiveCurrent(
            f"only {hi_p - lo_p} contiguous points with positive current")
    v = sweep.v_gs[lo_p:hi_p]
    inv_i = 1.0 / sweep.i_ds[lo_p:hi_p]
    inv_curve = SampledCurve(v, inv_i)
    if smooth_window > 1:
        inv_curve = smooth(inv_curve, smooth_window)
    d2 = second_derivative(inv_curve)  # drops the two endpoints
    valid = d2.y > 0
    n_bad = int(np.count_nonzero(~valid))
    if n_bad:
        diags.append(
            f"{n_bad} points with non-positive second derivative of 1/I "
            "excluded")
    g = np.zeros_like(d2.y)
    g[valid] = d2.y[valid] ** (-1.0 / 3.0)
    # Shift user windows from full-grid indices to the d2 grid.
    w = None
    if window is not None:
        w = (int(window[0]) - lo_p - 1, int(window[1]) - lo_p - 1)
    fit = _windowed_fit(d2.x, g, valid, sweep, w, min_points, diags,
                        NegativeSecondDerivative)
    v_t = fit.x_intercept
    wl = spec.aspect_ratio()
    b0_hat = 2.0 * fit.slope ** 3 / sweep.v_ds
    mu_0 = b0_hat / (spec.c_ox * wl)
    mu_sigma = 6.0 * fit.slope ** 2 * fit.slope_sigma / (
        sweep.v_ds * spec.c_ox * wl)
    lo, hi = fit.window
    # Map back to full-grid indices for theta/mu_eff evaluation.
    abs_window = (lo + lo_p + 1, hi + lo_p + 1)
    fit = LineFit(fit.slope, fit.intercept, fit.x_intercept, fit.r_squared,
                  abs_window, fit.slope_sigma, fit.intercept_sigma,
                  fit.x_intercept_sigma)
    a_lo, a_hi = abs_window
    vgs_w = sweep.v_gs[a_lo:a_hi]
    i_w = sweep.i_ds[a_lo:a_hi]
    vov = vgs_w - v_t
    theta = b0_hat * sweep.v_ds * (
        1.0 / i_w - 1.0 / (b0_hat * sweep.v_ds * vov)) - b0_hat * r_sd
    theta_curve = SampledCurve(vgs_w, theta)
    mu_eff = _mu_eff_curve(vgs_w, i_w, mu_0, theta, v_t, r_sd)
    return ExtractionReport(
        method=METHOD_INV_IDS,
        label=sweep.label,
        v_t=Uncertain(v_t, fit.x_intercept_sigma),
        mu_0=Uncertain(mu_0, mu_sigma),
        theta_curve=theta_curve,
        theta_range=(float(theta.min()), float(theta.max())),
        mu_eff_curve=mu_eff,
        r_sd_used=r_sd,
        fit=fit,
        v_ds=sweep.v_ds,
        diagnostics=diags,
    )


def _common_grid(family):
    """Resample the family onto a shared drain-voltage grid (linear
    interpolation over the overlap) when the sweeps' grids differ."""
    grids = [s.v_ds for s in family.sweeps]
    base = grids[0]
    if all(g.size == base.size and np.array_equal(g, base) for g in grids):
        return base, np.vstack([s.i_ds for s in family.sweeps])
    lo = max(g[0] for g in grids)
    hi = min(g[-1] for g in grids)
    if hi <= lo:
        raise InsufficientGateValues("drain-voltage grids do not overlap")
    base = max(grids, key=lambda g: g.size)
    base = base[(base >= lo) & (base <= hi)]
    cur = np.vstack([np.interp(base, s.v_ds, s.i_ds) for s in family.sweeps])
    return base, cur


def gds_method_extract(family, spec, r_sd=0.0, min_points=3):
    """Drain-conductance extraction; one report per drain-bias slice.

    For each fixed V_ds, gds(V_gs) is the per-sweep derivative of I vs
    V_ds evaluated at that bias; dgds/dVgs is differenced across the
    gate list, and the straight line gds/sqrt(dgds/dVgs) vs V_gs gives
    V_T (x-intercept) and mu_0 = slope^2/(C_ox*W/L).
    """
    if len(family) < 3:
        raise InsufficientGateValues(
            "drain-conductance method needs at least 3 gate voltages")
    gates = family.gate_voltages()
    grid, currents = _common_grid(family)
    if grid.size < 3:
        raise InsufficientGateValues(
            "each drain sweep needs at least 3 points")
    gds = np.vstack([
        np.gradient(currents[s], grid, edge_order=2)
        for s in range(len(family))
    ])
    wl = spec.aspect_ratio()
    reports = []
    last_error = None
    for j in range(grid.size):
        try:
            reports.append(_gds_slice_report(
                family, spec, r_sd, gates, grid[j], gds[:, j],
                currents[:, j], wl, min_points))
        except ExtractionError as exc:
            last_error = exc
    if not reports:
        raise last_error if last_error is not None else NonpositiveDerivative(
            "no drain-bias slice produced a fit")
    return reports


def _gds_slice_report(family, spec, r_sd, gates, v_ds, gcol, icol, wl,
                      min_points):
    dg = np.gradient(gcol, gates, edge_order=2)
    valid = (dg > 0) & (gcol > 0)
    lo, hi = _longest_true_run(valid)
    if hi - lo < max(min_points, 3):
        raise NonpositiveDerivative(
            f"slice v_ds={v_ds:g} V: only {hi - lo} usable gate points")
    h = gcol[lo:hi] / np.sqrt(dg[lo:hi])
    sub = SampledCurve(gates[lo:hi], h)
    if hi - lo >= DEFAULT_MIN_WINDOW + 2:
        try:
            w = auto_window(sub, min_points=DEFAULT_MIN_WINDOW)
        except DegenerateWindow:
            w = (0, hi - lo)
    else:
        w = (0, hi - lo)
    fit = fit_line(sub, w)
    fit = LineFit(fit.slope, fit.intercept, fit.x_intercept, fit.r_squared,
                  (lo + w[0], lo + w[1]), fit.slope_sigma,
                  fit.intercept_sigma, fit.x_intercept_sigma)
    v_t = fit.x_intercept
    b0_hat = fit.slope ** 2
    mu_0 = b0_hat / (spec.c_ox * wl)
    mu_sigma = 2.0 * abs(fit.slope) * fit.slope_sigma / (spec.c_ox * wl)
    a_lo, a_hi = fit.window
    vgs_w = gates[a_lo:a_hi]
    vov = vgs_w - v_t
    diags = list(family.diagnostics)
    if np.any(vov <= 0) or np.any(gcol[a_lo:a_hi] <= 0):
        theta_curve = None
        theta_range = None
        mu_eff = None
        diags.append("theta curve skipped: window reaches below threshold")
    else:
        theta = b0_hat / gcol[a_lo:a_hi] - 1.0 / vov - b0_hat * r_sd
        theta_curve = SampledCurve(vgs_w, theta)
        theta_range = (float(theta.min()), float(theta.max()))
        mu_eff = _mu_eff_curve(vgs_w, icol[a_lo:a_hi], mu_0, theta, v_t,
                               r_sd)
    return ExtractionReport(
        method=METHOD_GDS,
        label=family.label,
        v_t=Uncertain(v_t, fit.x_intercept_sigma),
        mu_0=Uncertain(mu_0, mu_sigma),
        theta_curve=theta_curve,
        theta_range=theta_range,
        mu_eff_curve=mu_eff,
        r_sd_used=r_sd,
        fit=fit,
        v_ds=float(v_ds),
        diagnostics=diags,
    )


@dataclass
class RsdEstimate:
    """Series-resistance estimate from single-device output resistance.

    `r_sd` is the V_gs -> infinity asymptote of the total resistance
    1/gds at the lowest drain bias; it upper-bounds the true series
    resistance (the asymptote includes a theta/beta0 term). `r_tot_min`
    is the smallest observed total resistance, a secondary estimate.
    """

    r_sd: float
    sigma: float
    r_tot_min: float
    diagnostics: list = field(default_factory=list)


def rsd_output_resistance(family, v_t_hint):
    """Series resistance from the drain-terminal output resistance.

    Per sweep the total resistance 1/gds at the lowest drain bias is
    computed; fitting it against 1/(V_gs - v_t_hint) and extrapolating
    to infinite gate drive gives the asymptote as the intercept.
    """
    usable = [s for s in family.sweeps if s.v_gs > v_t_hint and len(s) >= 3]
    if len(usable) < 3:
        raise InsufficientGateValues(
            "output-resistance estimate needs at least 3 sweeps above the "
            "threshold hint")
    r_tot = []
    inv_vov = []
    for s in usable:
        g = np.gradient(s.i_ds, s.v_ds, edge_order=2)[0]
        if g <= 0:
            continue
        r_tot.append(1.0 / g)
        inv_vov.append(1.0 / (s.v_gs - v_t_hint))
    if len(r_tot) < 3:
        raise InsufficientGateValues(
            "fewer than 3 sweeps with positive output conductance")
    order = np.argsort(inv_vov)
    x = np.asarray(inv_vov)[order]
    y = np.asarray(r_tot)[order]
    fit = fit_line(SampledCurve(x, y), (0, x.size))
    return RsdEstimate(
        r_sd=fit.intercept,
        sigma=fit.intercept_sigma,
        r_tot_min=float(np.min(r_tot)),
        diagnostics=[
            "asymptotic output resistance includes a theta/beta0 term; "
            "it upper-bounds the series resistance"
        ],
    )


def _ols2(x, y):
    """Plain OLS slope/intercept allowing as few as 2 points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx == 0.0:
        raise DegenerateWindow("zero x-variance")
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    return slope, float(y.mean() - slope * xbar)


def rsd_channel_length_intersection(devices):
    """Series resistance and channel-length reduction from multiple
    devices of different mask lengths.

    For each gate voltage common to all sweeps, the channel resistance
    V_ds/I at that gate bias is fitted as a line against mask length;
    the least-squares common intersection point of those lines is
    returned as (r_sd, delta_l): y-coordinate = series resistance,
    x-coordinate = mask-minus-effective length difference.
    """
    if len(devices) < 2:
        raise InsufficientDevices("need at least 2 devices")
    lengths = [float(l) for l, _ in devices]
    if len(set(lengths)) < 2:
        raise InsufficientDevices("need at least 2 distinct mask lengths")
    # Gate voltages common to all sweeps (matched to 1 uV).
    def keyset(sweep):
        return {round(v * 1e6) for v in sweep.v_gs}
    common = set.intersection(*(keyset(s) for _, s in devices))
    if len(common) < 2:
        raise InsufficientGateValues(
            "need at least 2 gate voltages common to all devices")
    lines = []
    for key in sorted(common):
        pts_l, pts_r = [], []
        for l_mask, sweep in devices:
            i = int(np.flatnonzero(np.round(sweep.v_gs * 1e6) == key)[0])
            if sweep.i_ds[i] <= 0:
                break
            pts_l.append(l_mask)
            pts_r.append(sweep.v_ds / sweep.i_ds[i])
        else:
            lines.append(_ols2(pts_l, pts_r))
    if len(lines) < 2:
        raise InsufficientGateValues(
            "fewer than 2 gate voltages with positive current on all devices")
    a = np.array([ln[0] for ln in lines])
    b = np.array([ln[1] for ln in lines])
    # Least-squares point minimizing sum_i (a_i*x + b_i - y)^2.
    n = a.size
    m = np.array([[np.sum(a * a), -np.sum(a)], [np.sum(a), -float(n)]])
    rhs = np.array([-np.sum(a * b), -np.sum(b)])
    if abs(np.linalg.det(m)) < 1e-12 * max(1.0, float(np.sum(a * a))):
        raise ParallelLines("channel-resistance lines are parallel")
    x, y = np.linalg.solve(m, rhs)
    return float(y), float(x)


@dataclass
class ShiftRow:
    label: str
    method: str
    v_t: float
    v_t_reference: float
    delta_v_t: float


@dataclass
class ShiftTable:
    """Threshold shifts of each (label, method) against a reference label.

    Positive delta_v_t means the threshold increased relative to the
    reference.
    """

    reference_label: str
    rows: list

    def to_text(self):
        lines = [f"reference: {self.reference_label}",
                 f"{'label':<20} {'method':<10} {'V_T (V)':>10} "
                 f"{'dV_T (V)':>10}"]
        for r in self.rows:
            lines.append(f"{r.label:<20} {r.method:<10} {r.v_t:>10.4f} "
                         f"{r.delta_v_t:>+10.4f}")
        return "\n".join(lines)


def compare_reports(reports, reference_label):
    """Tabulate per-method threshold shifts against the reference label."""
    if not any(r.label == reference_label for r in reports):
        raise MissingReference(
            f"no report labelled {reference_label!r}")
    reference = {}
    for r in reports:
        if r.label == reference_label and r.method not in reference:
            reference[r.method] = r.v_t.value
    rows = []
    for r in reports:
        if r.method not in reference:
            continue
        rows.append(ShiftRow(
            label=r.label,
            method=r.method,
            v_t=r.v_t.value,
            v_t_reference=reference[r.method],
            delta_v_t=r.v_t.value - reference[r.method],
        ))
    return ShiftTable(reference_label=reference_label, rows=rows)
