import numpy as np
import pytest

from egfet.errors import BelowThreshold, EmptyGrid
from egfet.model import (
    BiasPoint,
    DeviceSpec,
    ModelParams,
    beta0,
    gds_analytic,
    gm_analytic,
    ids_implicit,
    ids_simplified,
    mu_eff,
    synth_drain_sweep_family,
    synth_gate_sweep,
)

from conftest import random_params


def fixed_point_current(spec, params, bias, tol=1e-14, max_iter=10000):
    """Independent oracle: iterate I <- f(I) on the implicit current
    relation from I = 0 until convergence."""
    b0 = beta0(spec, params)
    i = 0.0
    for _ in range(max_iter):
        vov = bias.v_gs - i * params.r_s - params.v_t
        nxt = b0 * vov * (bias.v_ds - i * params.r_sd) / \
            (1.0 + params.theta * vov)
        if abs(nxt - i) <= tol * max(abs(nxt), 1e-300):
            return nxt
        i = nxt
    raise AssertionError("fixed-point oracle did not converge")


class TestBeta0:
    def test_reference_values(self, spec, params):
        # 500 cm2/Vs, 57.8 nF/cm2, W/L = 3
        assert beta0(spec, params) == pytest.approx(8.67e-5, rel=1e-12)

    def test_identity_case(self):
        s = DeviceSpec(1.0, 1.0, 1.0)
        p = ModelParams(v_t=0.0, mu_0=1.0)
        assert beta0(s, p) == 1.0

    def test_aspect_ratio(self, spec):
        assert spec.aspect_ratio() == pytest.approx(3.0, abs=0)


class TestIdsImplicit:
    def test_closed_form_without_resistance(self, spec):
        p = ModelParams(v_t=1.6, mu_0=0.05, theta=0.1, r_sd=0.0)
        i = ids_implicit(spec, p, BiasPoint(2.6, 0.4))
        expected = 8.67e-5 * 1.0 * 0.4 / 1.1
        assert i == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(3.153e-5, rel=1e-3)

    def test_zero_drain_bias(self, spec, params):
        assert ids_implicit(spec, params, BiasPoint(2.6, 0.0)) == 0.0

    def test_matches_fixed_point_oracle(self, spec):
        p = ModelParams(v_t=1.6, mu_0=0.05, theta=0.1, r_sd=50.0)
        b = BiasPoint(2.6, 0.4)
        assert ids_implicit(spec, p, b) == pytest.approx(
            fixed_point_current(spec, p, b), rel=1e-10)

    def test_below_threshold_raises(self, spec, params):
        with pytest.raises(BelowThreshold):
            ids_implicit(spec, params, BiasPoint(1.6, 0.4))

    def test_rejected_branch_does_not_vanish_at_zero_vds(self, spec, params):
        # The plus branch of the quadratic stays finite as v_ds -> 0;
        # the implemented branch goes to zero.
        b0 = beta0(spec, params)
        vov = 1.0
        r_s = params.r_s
        for v_ds in (1e-3, 1e-5, 1e-7):
            a = r_s * (params.theta + b0 * params.r_sd)
            b = 1.0 + params.theta * vov + b0 * params.r_sd * vov \
                + b0 * r_s * v_ds
            c = b0 * v_ds * vov
            disc = np.sqrt(b * b - 4 * a * c)
            plus_branch = (b + disc) / (2 * a)
            minus = ids_implicit(spec, params,
                                 BiasPoint(params.v_t + vov, v_ds))
            assert minus < 1e-4
            assert plus_branch > 1e3 * minus

    def test_fixed_point_residual(self, spec):
        rng = np.random.default_rng(7)
        b0_fn = beta0
        for _ in range(50):
            p = random_params(rng)
            b = BiasPoint(p.v_t + rng.uniform(0.1, 2.4),
                          rng.uniform(0.05, 0.5))
            i = ids_implicit(spec, p, b)
            vov = b.v_gs - i * p.r_s - p.v_t
            rhs = b0_fn(spec, p) * vov * (b.v_ds - i * p.r_sd) / \
                (1.0 + p.theta * vov)
            assert abs(i - rhs) <= 1e-12 * i


class TestIdsSimplified:
    def test_ideal_linear_region(self):
        s = DeviceSpec(1.0, 1.0, 1.0)
        p = ModelParams(v_t=0.0, mu_0=1.0)
        assert ids_simplified(s, p, BiasPoint(1.0, 0.1)) == pytest.approx(0.1)

    def test_threshold_limit_linear(self, spec, params):
        for eps in (1e-3, 1e-6, 1e-9):
            i = ids_simplified(spec, params, BiasPoint(params.v_t + eps, 0.4))
            assert i == pytest.approx(
                beta0(spec, params) * 0.4 * eps, rel=1e-3)

    def test_reference_value(self, spec):
        p = ModelParams(v_t=1.6, mu_0=0.05, theta=0.1, r_sd=50.0)
        i = ids_simplified(spec, p, BiasPoint(2.6, 0.4))
        k = 0.1 + 8.67e-5 * 50
        assert i == pytest.approx(8.67e-5 * 0.4 / (1 + k), rel=1e-12)
        assert i == pytest.approx(3.140e-5, rel=1e-3)

    def test_agrees_with_implicit_when_source_degenerate(self, spec):
        # The simplification only drops terms proportional to the source
        # resistance, so with r_sd = 0 the two forms coincide exactly and
        # with r_sd > 0 they stay within the linear-drop scale.
        rng = np.random.default_rng(3)
        for _ in range(50):
            p = random_params(rng)
            b = BiasPoint(p.v_t + rng.uniform(0.2, 2.4), 0.4)
            p0 = ModelParams(p.v_t, p.mu_0, p.theta, 0.0)
            exact0 = ids_implicit(spec, p0, b)
            approx0 = ids_simplified(spec, p0, b)
            assert approx0 == pytest.approx(exact0, rel=1e-12)
            exact = ids_implicit(spec, p, b)
            approx = ids_simplified(spec, p, b)
            assert abs(exact - approx) / exact <= 2 * p.r_s * beta0(spec, p)

    def test_monotone_in_vgs_and_vds(self, spec, params):
        vgs = np.linspace(1.7, 4.0, 30)
        i_gs = [ids_simplified(spec, params, BiasPoint(v, 0.4)) for v in vgs]
        assert np.all(np.diff(i_gs) > 0)
        vds = np.linspace(0.0, 0.5, 30)
        i_ds = [ids_simplified(spec, params, BiasPoint(3.0, v)) for v in vds]
        assert np.all(np.diff(i_ds) > 0)


class TestAnalyticDerivatives:
    def test_gm_ideal_limit(self, spec):
        p = ModelParams(v_t=1.0, mu_0=0.05)
        b0 = beta0(spec, p)
        for vgs in (1.5, 2.5, 3.5):
            assert gm_analytic(spec, p, BiasPoint(vgs, 0.4)) == pytest.approx(
                b0 * 0.4, rel=1e-12)

    def test_gm_quarter_point(self, spec):
        # (theta + beta0*rsd)*vov = 1 halves the denominator root.
        p = ModelParams(v_t=1.0, mu_0=0.05, theta=0.5)
        g = gm_analytic(spec, p, BiasPoint(3.0, 0.4))
        assert g == pytest.approx(beta0(spec, p) * 0.4 / 4.0, rel=1e-12)

    @pytest.mark.parametrize("vgs", [2.0, 2.6, 3.4])
    def test_gm_matches_finite_difference(self, spec, params, vgs):
        h = 1e-3
        fd = (ids_simplified(spec, params, BiasPoint(vgs + h, 0.4))
              - ids_simplified(spec, params, BiasPoint(vgs - h, 0.4))) / (2 * h)
        assert gm_analytic(spec, params, BiasPoint(vgs, 0.4)) == \
            pytest.approx(fd, rel=1e-4)

    def test_gds_ideal_limit(self, spec):
        p = ModelParams(v_t=1.0, mu_0=0.05)
        assert gds_analytic(spec, p, BiasPoint(2.0, 0.4)) == pytest.approx(
            beta0(spec, p) * 1.0, rel=1e-12)

    @pytest.mark.parametrize("vgs", [2.0, 2.6, 3.4])
    def test_gds_matches_finite_difference(self, spec, params, vgs):
        h = 1e-3
        fd = (ids_simplified(spec, params, BiasPoint(vgs, 0.4 + h))
              - ids_simplified(spec, params, BiasPoint(vgs, 0.4 - h))) / (2 * h)
        assert gds_analytic(spec, params, BiasPoint(vgs, 0.4)) == \
            pytest.approx(fd, rel=1e-4)

    def test_gds_reciprocal_identity(self, spec, params):
        # 1/gds minus the constant term equals 1/(beta0*vov).
        b0 = beta0(spec, params)
        k = params.theta + b0 * params.r_sd
        for vgs in (2.0, 2.8, 3.6):
            g = gds_analytic(spec, params, BiasPoint(vgs, 0.4))
            vov = vgs - params.v_t
            assert 1.0 / g - k / b0 == pytest.approx(1.0 / (b0 * vov),
                                                     rel=1e-12)


class TestMuEff:
    def test_no_degradation(self, spec):
        p = ModelParams(v_t=1.0, mu_0=0.05, theta=0.0, r_sd=100.0)
        for vgs in (1.5, 2.5, 3.5):
            b = BiasPoint(vgs, 0.4)
            i = ids_implicit(spec, p, b)
            assert mu_eff(spec, p, b, i) == p.mu_0

    def test_strictly_below_mu0_and_decreasing(self, spec, params):
        vals = []
        for vgs in np.linspace(2.0, 4.0, 21):
            b = BiasPoint(vgs, 0.4)
            i = ids_implicit(spec, params, b)
            m = mu_eff(spec, params, b, i)
            assert m < params.mu_0
            vals.append(m)
        assert np.all(np.diff(vals) < 0)


class TestSynthesis:
    def test_instrument_grid_has_41_points(self, spec, params, grid):
        sweep = synth_gate_sweep(spec, params, 0.4, grid)
        assert len(sweep) == 41

    def test_single_point_grid(self, spec, params):
        sweep = synth_gate_sweep(spec, params, 0.4, [2.5])
        assert len(sweep) == 1

    def test_below_threshold_emits_zero(self, spec, params, grid):
        sweep = synth_gate_sweep(spec, params, 0.4, grid)
        below = sweep.v_gs <= params.v_t
        assert np.all(sweep.i_ds[below] == 0.0)
        assert np.all(sweep.i_ds[~below] > 0.0)

    def test_deterministic_for_fixed_seed(self, spec, params, grid):
        a = synth_gate_sweep(spec, params, 0.4, grid, noise=0.01, seed=42)
        b = synth_gate_sweep(spec, params, 0.4, grid, noise=0.01, seed=42)
        assert np.array_equal(a.i_ds, b.i_ds)
        c = synth_gate_sweep(spec, params, 0.4, grid, noise=0.01, seed=43)
        assert not np.array_equal(a.i_ds, c.i_ds)

    def test_empty_grid_rejected(self, spec, params):
        with pytest.raises(EmptyGrid):
            synth_gate_sweep(spec, params, 0.4, [])

    def test_family_single_gate(self, spec, params):
        fam = synth_drain_sweep_family(spec, params, [3.0],
                                       np.linspace(0, 0.4, 9))
        assert len(fam) == 1

    def test_family_gate_count(self, spec, params):
        fam = synth_drain_sweep_family(spec, params, np.arange(2.0, 4.6, 0.5),
                                       np.linspace(0, 0.4, 9))
        assert len(fam) == 6

    def test_simplified_model_option(self, spec, params, grid):
        sweep = synth_gate_sweep(spec, params, 0.4, grid, model="simplified")
        j = np.argmin(np.abs(grid - 2.6))
        assert sweep.i_ds[j] == pytest.approx(
            ids_simplified(spec, params, BiasPoint(grid[j], 0.4)), rel=1e-12)


class TestValidation:
    def test_device_spec_positive(self):
        with pytest.raises(ValueError):
            DeviceSpec(-1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            DeviceSpec(1.0, 1.0, 0.0)

    def test_params_ranges(self):
        with pytest.raises(ValueError):
            ModelParams(v_t=1.0, mu_0=0.0)
        with pytest.raises(ValueError):
            ModelParams(v_t=1.0, mu_0=0.05, theta=-0.1)
        with pytest.raises(ValueError):
            ModelParams(v_t=1.0, mu_0=0.05, r_sd=-1.0)

    def test_symmetric_split(self):
        p = ModelParams(v_t=1.0, mu_0=0.05, r_sd=50.0)
        assert p.r_s + p.r_d == p.r_sd

    def test_negative_vds_rejected(self):
        with pytest.raises(ValueError):
            BiasPoint(2.0, -0.1)
