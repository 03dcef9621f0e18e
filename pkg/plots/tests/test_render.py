import numpy as np
import pytest

from sqplots import PlotSpec, SchemaError, plot_comparison, plot_p_sweep
from sqplots.cli import main
from sqplots.render import _sweep_order


def png_ok(path):
    data = path.read_bytes()
    return data[:8] == b"\x89PNG\r\n\x1a\n" and len(data) > 1000


class TestComparison:
    def test_renders_five_curves(self, comparison_csv, tmp_path):
        out = tmp_path / "fig1.png"
        spec = PlotSpec(aggregate_csv=comparison_csv, output=out)
        assert plot_comparison(spec) == out
        assert png_ok(out)

    def test_byte_identical_reruns(self, comparison_csv, tmp_path):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        plot_comparison(PlotSpec(aggregate_csv=comparison_csv, output=a))
        plot_comparison(PlotSpec(aggregate_csv=comparison_csv, output=b))
        assert a.read_bytes() == b.read_bytes()

    def test_bounds_overlay(self, comparison_csv, tmp_path):
        bounds = tmp_path / "bounds.csv"
        rows = ["algo,t,bound_gap,excluded_terms_note"]
        for t in range(0, 121, 2):
            rows.append(f"sgd,{t},{25.0 * 0.97 ** t + 0.15},none")
        bounds.write_text("\n".join(rows) + "\n")
        plain = tmp_path / "plain.png"
        overlaid = tmp_path / "overlay.png"
        plot_comparison(PlotSpec(aggregate_csv=comparison_csv, output=plain))
        plot_comparison(PlotSpec(aggregate_csv=comparison_csv, output=overlaid,
                                 bounds_csv=bounds))
        assert png_ok(overlaid)
        assert plain.read_bytes() != overlaid.read_bytes()

    def test_subset_filter_unknown_algo(self, comparison_csv, tmp_path):
        spec = PlotSpec(aggregate_csv=comparison_csv,
                        output=tmp_path / "x.png", algos=["sgd", "adam"])
        with pytest.raises(SchemaError) as exc:
            plot_comparison(spec)
        assert "adam" in str(exc.value)

    def test_empty_csv_no_image(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("algo,t,queries,mean_gap,std_gap,n_trials\n")
        out = tmp_path / "never.png"
        with pytest.raises(SchemaError):
            plot_comparison(PlotSpec(aggregate_csv=bad, output=out))
        assert not out.exists()

    def test_linear_scale(self, comparison_csv, tmp_path):
        out = tmp_path / "lin.png"
        plot_comparison(PlotSpec(aggregate_csv=comparison_csv, output=out,
                                 y_scale="linear"))
        assert png_ok(out)

    def test_bad_scale_rejected(self, comparison_csv, tmp_path):
        with pytest.raises(ValueError):
            PlotSpec(aggregate_csv=comparison_csv, output=tmp_path / "x.png",
                     y_scale="sqrt")


class TestPSweep:
    def test_renders_four_curves(self, psweep_csv, tmp_path):
        out = tmp_path / "fig2.png"
        assert plot_p_sweep(PlotSpec(aggregate_csv=psweep_csv, output=out)) == out
        assert png_ok(out)

    def test_byte_identical_reruns(self, psweep_csv, tmp_path):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        plot_p_sweep(PlotSpec(aggregate_csv=psweep_csv, output=a))
        plot_p_sweep(PlotSpec(aggregate_csv=psweep_csv, output=b))
        assert a.read_bytes() == b.read_bytes()

    def test_legend_order_ascending_in_p(self):
        labels = ["sgq_p1.0", "sgd", "sgq_p0.1", "sgq_p0.7", "sgq_p0.3"]
        assert _sweep_order(labels) == [
            "sgq_p0.1", "sgq_p0.3", "sgq_p0.7", "sgq_p1.0", "sgd",
        ]

    def test_single_curve_ok(self, psweep_csv, tmp_path):
        out = tmp_path / "one.png"
        plot_p_sweep(PlotSpec(aggregate_csv=psweep_csv, output=out,
                              algos=["sgq_p0.3"]))
        assert png_ok(out)


class TestCli:
    def test_compare_command(self, comparison_csv, tmp_path, capsys):
        out = tmp_path / "cli.png"
        code = main(["compare", "--in", str(comparison_csv), "--out", str(out)])
        assert code == 0
        assert png_ok(out)
        assert str(out) in capsys.readouterr().out

    def test_psweep_command(self, psweep_csv, tmp_path):
        out = tmp_path / "cli2.png"
        assert main(["psweep", "--in", str(psweep_csv), "--out", str(out)]) == 0
        assert png_ok(out)
