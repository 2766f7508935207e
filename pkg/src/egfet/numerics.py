"""Numerical kernels shared by all extraction methods: finite-difference
derivatives on (possibly non-uniform) voltage grids, moving quadratic
smoothing, and windowed straight-line fits with OLS uncertainties.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadWindow, DegenerateWindow, TooFewPoints

# r^2 values closer than this are treated as tied in auto_window.
_R2_TIE_TOL = 1e-9


@dataclass
class SampledCurve:
    """y sampled on a strictly increasing x grid."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 1 or self.x.size < 2:
            raise ValueError("curve needs at least two points")
        if self.y.shape != self.x.shape:
            raise ValueError("x and y must have the same length")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ValueError("curve contains non-finite values")
        if not np.all(np.diff(self.x) > 0):
            raise ValueError("x must be strictly increasing")

    def __len__(self):
        return self.x.size


@dataclass
class LineFit:
    """Result of an ordinary least-squares straight-line fit over a window.

    `window` is the half-open index range (start, stop) into the fitted
    curve. Uncertainties come from the standard OLS covariance; the
    x-intercept sigma is first-order propagated from (slope, intercept).
    """

    slope: float
    intercept: float
    x_intercept: float
    r_squared: float
    window: tuple
    slope_sigma: float = float("nan")
    intercept_sigma: float = float("nan")
    x_intercept_sigma: float = float("nan")


def first_derivative(curve):
    """dy/dx on the same grid: central differences inside, second-order
    one-sided stencils at the ends. Exact for quadratics."""
    if len(curve) < 3:
        raise TooFewPoints("first derivative needs at least 3 points")
    return SampledCurve(curve.x, np.gradient(curve.y, curve.x, edge_order=2))


def derivative_o4(curve):
    """dy/dx via a local quartic fit over the 5 nearest points (window
    shifted inward at the edges). Fourth-order accurate on smooth data;
    used where differencing bias, not noise, is the limiting error."""
    n = len(curve)
    if n < 5:
        return first_derivative(curve)
    out = np.empty(n)
    for i in range(n):
        lo = min(max(i - 2, 0), n - 5)
        xw = curve.x[lo:lo + 5] - curve.x[i]
        c = np.polyfit(xw, curve.y[lo:lo + 5], 4)
        out[i] = c[3]
    return SampledCurve(curve.x, out)


def second_derivative(curve):
    """d2y/dx2 at the interior points (endpoints are dropped from the
    output grid). Exact for quadratics; second order on smooth grids."""
    if len(curve) < 5:
        raise TooFewPoints("second derivative needs at least 5 points")
    x, y = curve.x, curve.y
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    d2 = 2.0 * (h1 * y[2:] - (h1 + h2) * y[1:-1] + h2 * y[:-2]) \
        / (h1 * h2 * (h1 + h2))
    return SampledCurve(x[1:-1], d2)


def smooth(curve, window_points):
    """Moving local quadratic least-squares smoothing.

    At each point a quadratic is fitted to `window_points` samples
    (window shifted inward near the edges) and evaluated at that point;
    polynomials of degree <= 2 pass through unchanged. window_points=1
    is the identity.
    """
    n = len(curve)
    w = int(window_points)
    if w == 1:
        return SampledCurve(curve.x.copy(), curve.y.copy())
    if w < 1 or w % 2 == 0:
        raise BadWindow("window must be an odd integer >= 1")
    if w > n:
        raise BadWindow(f"window {w} exceeds curve length {n}")
    half = w // 2
    out = np.empty(n)
    for i in range(n):
        lo = min(max(i - half, 0), n - w)
        xw = curve.x[lo:lo + w] - curve.x[i]
        coeffs = np.polyfit(xw, curve.y[lo:lo + w], 2)
        out[i] = coeffs[2]
    return SampledCurve(curve.x.copy(), out)


def fit_line(curve, window):
    """OLS straight line over curve[window[0]:window[1]].

    Reports slope/intercept with one-sigma uncertainties, r^2, and the
    x-intercept -intercept/slope. Raises DegenerateWindow when the fit
    has no x-intercept (zero x-variance or zero slope).
    """
    start, stop = int(window[0]), int(window[1])
    if not (0 <= start < stop <= len(curve)):
        raise BadWindow(f"window {window} out of range for curve of length {len(curve)}")
    n = stop - start
    if n < 3:
        raise TooFewPoints("line fit needs a window of at least 3 points")
    x = curve.x[start:stop]
    y = curve.y[start:stop]
    xbar = x.mean()
    ybar = y.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx == 0.0:
        raise DegenerateWindow("zero x-variance in fit window")
    sxy = float(np.sum((x - xbar) * (y - ybar)))
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    resid = y - (slope * x + intercept)
    ssr = float(np.sum(resid ** 2))
    sst = float(np.sum((y - ybar) ** 2))
    if slope == 0.0:
        raise DegenerateWindow("zero slope: no x-intercept")
    r2 = 1.0 if sst == 0.0 else 1.0 - ssr / sst
    r2 = min(max(r2, 0.0), 1.0)
    # OLS covariance of (slope, intercept)
    s2 = ssr / (n - 2)
    var_slope = s2 / sxx
    var_intercept = s2 * (1.0 / n + xbar ** 2 / sxx)
    cov_ab = -s2 * xbar / sxx
    x0 = -intercept / slope
    var_x0 = ((intercept / slope ** 2) ** 2 * var_slope
              + var_intercept / slope ** 2
              - 2.0 * (intercept / slope ** 3) * cov_ab)
    return LineFit(
        slope=slope,
        intercept=intercept,
        x_intercept=x0,
        r_squared=r2,
        window=(start, stop),
        slope_sigma=math.sqrt(max(var_slope, 0.0)),
        intercept_sigma=math.sqrt(max(var_intercept, 0.0)),
        x_intercept_sigma=math.sqrt(max(var_x0, 0.0)),
    )


def auto_window(curve, min_points=6):
    """Pick the contiguous window (length >= min_points) maximizing the
    r^2 of a straight-line fit.

    Ties (within 1e-9 in r^2) are broken toward the longer window, then
    toward higher x, so that a globally linear curve selects its full
    range and a plateau-then-line curve lands deep in the linear part.
    """
    if min_points < 6:
        raise ValueError("min_points must be at least 6")
    n = len(curve)
    if n < min_points:
        raise TooFewPoints(
            f"curve of length {n} cannot host a {min_points}-point window")
    best = None  # (r2, length, start, stop)
    degenerate = None
    for length in range(min_points, n + 1):
        for start in range(0, n - length + 1):
            stop = start + length
            try:
                fit = fit_line(curve, (start, stop))
            except DegenerateWindow as exc:
                degenerate = exc
                continue
            cand = (fit.r_squared, length, start, stop)
            if best is None:
                best = cand
                continue
            if cand[0] > best[0] + _R2_TIE_TOL:
                best = cand
            elif cand[0] > best[0] - _R2_TIE_TOL:
                # tie: prefer longer, then higher x (larger start)
                if (cand[1], cand[2]) > (best[1], best[2]):
                    best = cand
    if best is None:
        raise degenerate if degenerate is not None else DegenerateWindow(
            "no fittable window found")
    return (best[2], best[3])
