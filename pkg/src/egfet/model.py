"""Linear-region FET drain-current model with mobility degradation and
source/drain series resistance.

The drain current obeys the implicit relation

    I = beta0 * (Vgs - I*Rs - Vt) * (Vds - I*Rsd) / (1 + theta*(Vgs - I*Rs - Vt))

with beta0 = mu0 * Cox * W/L and a symmetric resistance split
Rs = Rd = Rsd/2. `ids_implicit` solves this exactly (it is a quadratic in
I); `ids_simplified` is the first-order expansion

    I = beta0 * Vds * (Vgs - Vt) / (1 + (theta + beta0*Rsd) * (Vgs - Vt))

which underlies all the straight-line extraction methods. Closed-form
gate and drain conductances of the simplified current are provided, along
with synthesis of noisy gate/drain sweeps for round-trip testing.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BelowThreshold, EmptyGrid, NegativeDiscriminant
from .sweeps import DrainSweep, DrainSweepFamily, GateSweep


@dataclass(frozen=True)
class DeviceSpec:
    """Geometry and oxide capacitance of one device.

    width, length in meters; c_ox in F/m^2.
    """

    width: float
    length: float
    c_ox: float

    def __post_init__(self):
        if not (self.width > 0 and self.length > 0 and self.c_ox > 0):
            raise ValueError("width, length and c_ox must all be positive")

    def aspect_ratio(self):
        return self.width / self.length


@dataclass(frozen=True)
class ModelParams:
    """The extractable physical parameters of one device + solution condition.

    v_t in V, mu_0 in m^2/(V s), theta in 1/V, r_sd in ohm. The series
    resistance is split symmetrically: r_s = r_d = r_sd/2.
    """

    v_t: float
    mu_0: float
    theta: float = 0.0
    r_sd: float = 0.0

    def __post_init__(self):
        if not self.mu_0 > 0:
            raise ValueError("mu_0 must be positive")
        if self.theta < 0:
            raise ValueError("theta must be non-negative")
        if self.r_sd < 0:
            raise ValueError("r_sd must be non-negative")

    @property
    def r_s(self):
        return self.r_sd / 2.0

    @property
    def r_d(self):
        return self.r_sd / 2.0


@dataclass(frozen=True)
class BiasPoint:
    """Extrinsic terminal voltages (n-channel, linear-region convention)."""

    v_gs: float
    v_ds: float

    def __post_init__(self):
        if self.v_ds < 0:
            raise ValueError("v_ds must be non-negative")


def beta0(spec, params):
    """Conductance prefactor mu_0 * C_ox * W/L, in A/V^2."""
    return params.mu_0 * spec.c_ox * spec.aspect_ratio()


def _require_above_threshold(params, bias):
    if bias.v_gs <= params.v_t:
        raise BelowThreshold(
            f"v_gs = {bias.v_gs} V is not above v_t = {params.v_t} V"
        )


def ids_implicit(spec, params, bias):
    """Exact drain current: the physical root of the quadratic form of the
    implicit current equation.

    Written as a*I^2 - b*I + c = 0 with

        a = Rs * (theta + beta0*Rsd)
        b = 1 + theta*Vov + beta0*Rsd*Vov + beta0*Rs*Vds
        c = beta0 * Vds * Vov        (Vov = Vgs - Vt)

    the physical branch is the one with I -> 0 as Vds -> 0, evaluated in
    the cancellation-free form I = 2c / (b + sqrt(b^2 - 4ac)), which also
    covers Rs = 0 smoothly.
    """
    _require_above_threshold(params, bias)
    if bias.v_ds == 0.0:
        return 0.0
    b0 = beta0(spec, params)
    vov = bias.v_gs - params.v_t
    r_s = params.r_s
    a = r_s * (params.theta + b0 * params.r_sd)
    b = 1.0 + params.theta * vov + b0 * params.r_sd * vov + b0 * r_s * bias.v_ds
    c = b0 * bias.v_ds * vov
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise NegativeDiscriminant(
            f"no real drain current at v_gs={bias.v_gs} V, v_ds={bias.v_ds} V"
        )
    return 2.0 * c / (b + math.sqrt(disc))


def ids_simplified(spec, params, bias):
    """First-order drain current beta0*Vds*Vov / (1 + (theta+beta0*Rsd)*Vov)."""
    _require_above_threshold(params, bias)
    b0 = beta0(spec, params)
    vov = bias.v_gs - params.v_t
    k = params.theta + b0 * params.r_sd
    return b0 * bias.v_ds * vov / (1.0 + k * vov)


def gm_analytic(spec, params, bias):
    """Gate transconductance of the simplified current:
    beta0*Vds / (1 + (theta+beta0*Rsd)*Vov)^2."""
    _require_above_threshold(params, bias)
    b0 = beta0(spec, params)
    vov = bias.v_gs - params.v_t
    k = params.theta + b0 * params.r_sd
    return b0 * bias.v_ds / (1.0 + k * vov) ** 2


def gds_analytic(spec, params, bias):
    """Drain conductance of the simplified current:
    beta0*Vov / (1 + (theta+beta0*Rsd)*Vov); independent of Vds."""
    _require_above_threshold(params, bias)
    b0 = beta0(spec, params)
    vov = bias.v_gs - params.v_t
    k = params.theta + b0 * params.r_sd
    return b0 * vov / (1.0 + k * vov)


def mu_eff(spec, params, bias, ids):
    """Effective mobility mu_0 / (1 + theta*(Vgs - I*Rs - Vt)) in m^2/(V s).

    `ids` should be consistent with the bias point (typically the output
    of `ids_implicit`).
    """
    vov_intrinsic = bias.v_gs - ids * params.r_s - params.v_t
    return params.mu_0 / (1.0 + params.theta * vov_intrinsic)


def _assumption_violated(spec, params, v_gs, v_ds):
    # Linear-region ordering the quadratic solution relies on:
    # (Vgs - Vt) * beta0 * Rsd should dominate beta0 * Rs * Vds.
    b0 = beta0(spec, params)
    return (v_gs - params.v_t) * b0 * params.r_sd <= b0 * params.r_s * v_ds


def _noisy(values, noise, rng):
    if noise == 0.0:
        return values
    z = rng.standard_normal(values.size)
    return np.maximum(values * (1.0 + noise * z), 0.0)


def _current_fn(model):
    if model == "implicit":
        return ids_implicit
    if model == "simplified":
        return ids_simplified
    raise ValueError(f"unknown model form {model!r}")


def synth_gate_sweep(spec, params, v_ds, v_gs_grid, noise=0.0, seed=0,
                     label="synthetic", model="implicit"):
    """Synthesize a gate sweep.

    `model` selects the exact quadratic-root current ("implicit") or its
    first-order form ("simplified"); the latter is the one all
    straight-line extractions invert exactly. Points at or below
    threshold emit zero current (the model has no subthreshold term).
    Noise is multiplicative Gaussian, I*(1+sigma*z), clipped at zero;
    identical (params, grid, seed) give bit-identical sweeps.
    """
    grid = np.asarray(v_gs_grid, dtype=float)
    if grid.size == 0:
        raise EmptyGrid("gate-voltage grid is empty")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    current = _current_fn(model)
    currents = np.zeros(grid.size)
    flagged = False
    for i, vg in enumerate(grid):
        if vg <= params.v_t:
            continue
        currents[i] = current(spec, params, BiasPoint(vg, v_ds))
        if params.r_sd > 0 and _assumption_violated(spec, params, vg, v_ds):
            flagged = True
    rng = np.random.default_rng(seed)
    currents = _noisy(currents, noise, rng)
    diags = []
    if flagged:
        diags.append(
            "linear-region resistance ordering violated at some grid points"
        )
    return GateSweep(v_ds=v_ds, v_gs=grid, i_ds=currents, label=label,
                     diagnostics=diags)


def synth_drain_sweep_family(spec, params, v_gs_list, v_ds_grid, noise=0.0,
                             seed=0, label="synthetic", model="implicit"):
    """Synthesize one drain sweep per gate voltage; same conventions as
    `synth_gate_sweep`."""
    gates = np.asarray(v_gs_list, dtype=float)
    grid = np.asarray(v_ds_grid, dtype=float)
    if gates.size == 0 or grid.size == 0:
        raise EmptyGrid("gate list and drain-voltage grid must be non-empty")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    current = _current_fn(model)
    rng = np.random.default_rng(seed)
    sweeps = []
    flagged = False
    for vg in gates:
        currents = np.zeros(grid.size)
        if vg > params.v_t:
            for j, vd in enumerate(grid):
                currents[j] = current(spec, params, BiasPoint(vg, vd))
                if vd > 0 and params.r_sd > 0 and _assumption_violated(
                        spec, params, vg, vd):
                    flagged = True
        currents = _noisy(currents, noise, rng)
        sweeps.append(DrainSweep(v_gs=vg, v_ds=grid.copy(), i_ds=currents))
    diags = []
    if flagged:
        diags.append(
            "linear-region resistance ordering violated at some grid points"
        )
    return DrainSweepFamily(sweeps=sweeps, label=label, diagnostics=diags)
