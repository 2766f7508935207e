"""Figure rendering: method linearization plots with the fitted line
extended to its x-intercept, I-V/transconductance panels, and
theta/mu_eff panels.

SVG output is made deterministic (fixed hash salt, no date metadata,
text kept as text) so identical inputs give byte-identical files.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import EmptyPlot  # noqa: E402
from .numerics import first_derivative  # noqa: E402
from .numerics import SampledCurve  # noqa: E402

_RC = {
    "svg.hashsalt": "egfet",
    "svg.fonttype": "none",
    "figure.figsize": (6.0, 4.5),
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def _save(fig, path):
    with plt.rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_plot(curves, path, fit=None, title="", xlabel="V_gs (V)",
              ylabel="", vt_label=None):
    """Render data curves as markers plus an optional fitted line
    extended to its x-intercept, annotated with the threshold value.

    `curves` is a list of (label, SampledCurve). Raises EmptyPlot when
    there is nothing to draw.
    """
    curves = [c for c in curves if c is not None and c[1] is not None]
    if not curves:
        raise EmptyPlot("no curves to plot")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for label, curve in curves:
            ax.plot(curve.x, curve.y, "o", ms=4, label=label or None)
        if fit is not None:
            x_hi = max(float(c.x.max()) for _, c in curves)
            xs = np.array([fit.x_intercept, x_hi])
            ax.plot(xs, fit.slope * xs + fit.intercept, "-",
                    label="fit")
            vt = fit.x_intercept if vt_label is None else vt_label
            ax.annotate(f"V_T = {vt:.3f} V",
                        xy=(fit.x_intercept, 0.0),
                        xytext=(fit.x_intercept, 0.08),
                        textcoords=("data", "axes fraction"),
                        ha="center")
            ax.axhline(0.0, color="k", lw=0.8)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if any(label for label, _ in curves) or fit is not None:
            ax.legend(loc="best")
    _save(fig, path)


def plot_iv_gm(sweep, path):
    """Drain current and differenced transconductance vs gate voltage."""
    if len(sweep) == 0:
        raise EmptyPlot("empty sweep")
    curve = SampledCurve(sweep.v_gs, sweep.i_ds)
    gm = first_derivative(curve)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(curve.x, 1e6 * curve.y, "o-", ms=4, color="tab:blue",
                label="I_ds")
        ax.set_xlabel("V_gs (V)")
        ax.set_ylabel("I_ds (uA)", color="tab:blue")
        ax2 = ax.twinx()
        ax2.plot(gm.x, 1e6 * gm.y, "s-", ms=4, color="tab:red", label="g_m")
        ax2.set_ylabel("g_m (uA/V)", color="tab:red")
        ax2.grid(False)
        title = sweep.label or "gate sweep"
        ax.set_title(f"{title} (V_ds = {sweep.v_ds:g} V)")
    _save(fig, path)


def plot_theta_mu_eff(report, path):
    """Extracted mobility-degradation coefficient and effective mobility
    over the fit window."""
    if report.theta_curve is None:
        raise EmptyPlot("report has no theta curve")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(report.theta_curve.x, report.theta_curve.y, "o-", ms=4,
                color="tab:green", label="theta")
        ax.set_xlabel("V_gs (V)")
        ax.set_ylabel("theta (1/V)", color="tab:green")
        if report.mu_eff_curve is not None:
            ax2 = ax.twinx()
            ax2.plot(report.mu_eff_curve.x, 1e4 * report.mu_eff_curve.y,
                     "s-", ms=4, color="tab:purple", label="mu_eff")
            ax2.set_ylabel("mu_eff (cm2/Vs)", color="tab:purple")
            ax2.grid(False)
        ax.set_title(f"{report.method}: theta and effective mobility")
    _save(fig, path)
