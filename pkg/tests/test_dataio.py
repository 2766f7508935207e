import numpy as np
import pytest

from conftest import REF_PARAMS, REF_SPEC, REF_GRID
from egfet.dataio import (
    fmt,
    read_drain_family,
    read_gate_sweep,
    read_report,
    report_from_dict,
    report_to_dict,
    write_drain_family,
    write_gate_sweep,
    write_report,
)
from egfet.errors import (
    EmptyPlot,
    InconsistentFamily,
    MissingMetadata,
    NonMonotoneGrid,
    ParseError,
)
from egfet.extraction import gds_method_extract, ids_over_sqrt_gm_extract
from egfet.model import synth_drain_sweep_family, synth_gate_sweep
from egfet.plots import emit_plot, plot_iv_gm, plot_theta_mu_eff
from egfet.numerics import SampledCurve


def ref_sweep(**kw):
    return synth_gate_sweep(REF_SPEC, REF_PARAMS, 0.4, REF_GRID,
                            label="dev_a", **kw)


def ref_family():
    gates = REF_PARAMS.v_t + 0.8 + 0.2 * np.arange(6)
    return synth_drain_sweep_family(REF_SPEC, REF_PARAMS, gates,
                                    0.05 * np.arange(9), label="fam_a")


class TestGateSweepCsv:
    def test_round_trip(self, tmp_path):
        sweep = ref_sweep()
        path = tmp_path / "a.csv"
        write_gate_sweep(sweep, path)
        back = read_gate_sweep(path)
        assert back.v_ds == sweep.v_ds
        assert back.label == sweep.label
        assert np.array_equal(back.v_gs, sweep.v_gs)
        assert np.array_equal(back.i_ds, sweep.i_ds)

    def test_row_count(self, tmp_path):
        path = tmp_path / "a.csv"
        write_gate_sweep(ref_sweep(), path)
        rows = [l for l in path.read_text().splitlines()
                if l and not l.startswith("#") and not l.startswith("v_gs")]
        assert len(rows) == 41

    def test_milliamp_units(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(
            "# kind=gate_sweep\n# v_ds=0.4\n# label=x\n# units=mV,mA\n"
            "v_gs,i_ds\n2600,0.03140\n2700,0.033\n")
        sweep = read_gate_sweep(path)
        assert sweep.v_gs[0] == pytest.approx(2.6)
        assert sweep.i_ds[0] == pytest.approx(3.140e-5)

    def test_bad_row_reports_line_number(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text(
            "# kind=gate_sweep\n# v_ds=0.4\n# label=x\n# units=V,A\n"
            "v_gs,i_ds\n1.0,1e-6\noops\n")
        with pytest.raises(ParseError) as exc:
            read_gate_sweep(path)
        assert exc.value.line_number == 7

    def test_missing_vds_rejected(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("# kind=gate_sweep\n# label=x\n# units=V,A\n"
                        "v_gs,i_ds\n1.0,1e-6\n2.0,2e-6\n")
        with pytest.raises(MissingMetadata):
            read_gate_sweep(path)

    def test_non_monotone_grid_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text(
            "# kind=gate_sweep\n# v_ds=0.4\n# label=x\n# units=V,A\n"
            "v_gs,i_ds\n2.0,2e-6\n1.0,1e-6\n")
        with pytest.raises(NonMonotoneGrid):
            read_gate_sweep(path)

    def test_negative_current_dropped_with_diagnostic(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text(
            "# kind=gate_sweep\n# v_ds=0.4\n# label=x\n# units=V,A\n"
            "v_gs,i_ds\n1.0,-1e-9\n2.0,1e-6\n3.0,2e-6\n")
        sweep = read_gate_sweep(path)
        assert len(sweep) == 2
        assert any("dropped" in d for d in sweep.diagnostics)


class TestDrainFamilyIo:
    def test_long_format_round_trip(self, tmp_path):
        fam = ref_family()
        path = tmp_path / "fam.csv"
        write_drain_family(fam, path)
        back = read_drain_family(path)
        assert len(back) == len(fam)
        for a, b in zip(back.sweeps, fam.sweeps):
            assert a.v_gs == pytest.approx(b.v_gs)
            assert np.array_equal(a.i_ds, b.i_ds)

    def test_directory_format_equivalent(self, tmp_path):
        fam = ref_family()
        d = tmp_path / "famdir"
        d.mkdir()
        for j, s in enumerate(fam.sweeps):
            lines = ["# kind=drain_sweep", f"# v_gs={fmt(s.v_gs)}",
                     "# label=fam_a", "# units=V,A", "v_ds,i_ds"]
            lines += [f"{fmt(v)},{fmt(i)}" for v, i in zip(s.v_ds, s.i_ds)]
            (d / f"g{j}.csv").write_text("\n".join(lines) + "\n")
        back = read_drain_family(d)
        for a, b in zip(back.sweeps, fam.sweeps):
            assert a.v_gs == pytest.approx(b.v_gs)
            assert a.i_ds == pytest.approx(b.i_ds)

    def test_duplicate_gate_rejected(self, tmp_path):
        d = tmp_path / "dup"
        d.mkdir()
        body = ("# kind=drain_sweep\n# v_gs=2.5\n# label=x\n# units=V,A\n"
                "v_ds,i_ds\n0.0,0\n0.1,1e-6\n0.2,2e-6\n")
        (d / "a.csv").write_text(body)
        (d / "b.csv").write_text(body)
        with pytest.raises(InconsistentFamily):
            read_drain_family(d)


class TestReportJson:
    def test_round_trip(self, tmp_path):
        rep = ids_over_sqrt_gm_extract(ref_sweep(), REF_SPEC,
                                       r_sd=REF_PARAMS.r_sd)
        path = tmp_path / "r.json"
        write_report(rep, path)
        back = read_report(path)
        assert report_to_dict(back) == report_to_dict(rep)

    def test_mobility_reported_in_cm2(self):
        rep = ids_over_sqrt_gm_extract(ref_sweep(), REF_SPEC,
                                       r_sd=REF_PARAMS.r_sd)
        d = report_to_dict(rep)
        assert d["mu_0"]["unit"] == "cm2/Vs"
        assert d["mu_0"]["value"] == pytest.approx(rep.mu_0.value * 1e4)
        back = report_from_dict(d)
        assert back.mu_0.value == pytest.approx(rep.mu_0.value)

    def test_field_order_stable(self):
        rep = ids_over_sqrt_gm_extract(ref_sweep(), REF_SPEC)
        keys = list(report_to_dict(rep).keys())
        assert keys[:4] == ["method", "label", "v_ds", "v_t"]

    def test_vt_only_report_serializes(self, tmp_path):
        from egfet.extraction import peak_gm_extract
        rep = peak_gm_extract(ref_sweep())
        d = report_to_dict(rep)
        assert d["mu_0"] is None
        assert d["theta_range"] is None
        path = tmp_path / "p.json"
        write_report(rep, path)
        assert read_report(path).v_t.value == pytest.approx(rep.v_t.value)

    def test_nan_sigma_becomes_null(self):
        from egfet.extraction import peak_gm_extract
        d = report_to_dict(peak_gm_extract(ref_sweep()))
        assert d["v_t"]["sigma"] is None


class TestPlots:
    def test_emit_plot_deterministic(self, tmp_path):
        curve = SampledCurve(np.linspace(0, 1, 10),
                             np.linspace(0, 2, 10) ** 2)
        p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
        emit_plot([("c", curve)], p1, title="t")
        emit_plot([("c", curve)], p2, title="t")
        assert p1.read_bytes() == p2.read_bytes()

    def test_fit_annotation_present(self, tmp_path):
        rep = ids_over_sqrt_gm_extract(ref_sweep(), REF_SPEC)
        lo, hi = rep.fit.window
        curve = SampledCurve(np.asarray(REF_GRID)[lo:hi],
                             np.linspace(0, 1, hi - lo))
        path = tmp_path / "f.svg"
        emit_plot([("fit", curve)], path, fit=rep.fit,
                  vt_label=rep.v_t.value)
        text = path.read_text()
        assert f"V_T = {rep.v_t.value:.3f} V" in text

    def test_empty_plot_rejected(self, tmp_path):
        with pytest.raises(EmptyPlot):
            emit_plot([], tmp_path / "x.svg")

    def test_panel_helpers_write_files(self, tmp_path):
        sweep = ref_sweep()
        plot_iv_gm(sweep, tmp_path / "iv.svg")
        rep = ids_over_sqrt_gm_extract(sweep, REF_SPEC,
                                       r_sd=REF_PARAMS.r_sd)
        plot_theta_mu_eff(rep, tmp_path / "tm.svg")
        assert (tmp_path / "iv.svg").stat().st_size > 0
        assert (tmp_path / "tm.svg").stat().st_size > 0

    def test_gds_report_plots(self, tmp_path):
        reps = gds_method_extract(ref_family(), REF_SPEC,
                                  r_sd=REF_PARAMS.r_sd)
        plot_theta_mu_eff(reps[-1], tmp_path / "g.svg")
        assert (tmp_path / "g.svg").stat().st_size > 0
