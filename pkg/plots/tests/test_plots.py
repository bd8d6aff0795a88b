import json

import numpy as np
import pytest

from twochlab_plots import (
    ArtifactError,
    RunArtifacts,
    load_diagnostics,
    load_snapshots,
    plot_drift,
    plot_fields,
    plot_scalings,
)
from twochlab_plots.artifacts import scaling_points, snapshot_grids
from twochlab_plots.cli import main


class TestLoaders:
    def test_diagnostics_columns(self, synthetic_run):
        diag = load_diagnostics(synthetic_run.diagnostics)
        assert diag["t"].shape == (6,)
        assert np.all(np.isfinite(diag["energy_plus"]))

    def test_snapshot_grids_shape(self, synthetic_run):
        t, x, U, H = snapshot_grids(load_snapshots(synthetic_run.snapshots))
        assert U.shape == (6, 16)
        assert H.shape == (6, 16)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ArtifactError, match="missing"):
            RunArtifacts.from_dir(tmp_path / "nope")

    def test_wrong_header(self, tmp_path):
        bad = tmp_path / "diagnostics.csv"
        bad.write_text("time,mass\n0,1\n")
        with pytest.raises(ArtifactError, match="header"):
            load_diagnostics(bad)

    def test_truncated_row_names_line(self, synthetic_run):
        text = synthetic_run.diagnostics.read_text().splitlines()
        text[3] = text[3].rsplit(",", 2)[0]  # drop two fields from row 3
        synthetic_run.diagnostics.write_text("\n".join(text) + "\n")
        with pytest.raises(ArtifactError, match="row 4"):
            load_diagnostics(synthetic_run.diagnostics)

    def test_non_finite_rejected(self, synthetic_run):
        text = synthetic_run.diagnostics.read_text().replace("0.1772", "nan", 1)
        synthetic_run.diagnostics.write_text(text)
        with pytest.raises(ArtifactError, match="non-finite"):
            load_diagnostics(synthetic_run.diagnostics)


class TestFigures:
    def test_fields_nonempty(self, synthetic_run, tmp_path):
        out = plot_fields(synthetic_run, tmp_path / "fields.png")
        assert out.exists() and out.stat().st_size > 0

    def test_drift_nonempty(self, synthetic_run, tmp_path):
        out = plot_drift(synthetic_run, tmp_path / "drift.png")
        assert out.exists() and out.stat().st_size > 0

    def test_drift_requires_records(self, synthetic_run, tmp_path):
        header = synthetic_run.diagnostics.read_text().splitlines()[0]
        synthetic_run.diagnostics.write_text(header + "\n")
        with pytest.raises(ArtifactError, match="two records"):
            plot_drift(synthetic_run, tmp_path / "drift.png")

    def test_scalings_fits_slope(self, convergence_report, tmp_path):
        out = plot_scalings([convergence_report], tmp_path / "scalings.png")
        assert out.exists() and out.stat().st_size > 0
        pts = scaling_points(json.loads(convergence_report.read_text()))
        slope = np.polyfit(np.log([p[0] for p in pts]), np.log([p[1] for p in pts]), 1)[0]
        assert slope == pytest.approx(4.0, abs=0.2)

    def test_scalings_requires_three_points(self, tmp_path):
        single = tmp_path / "report.json"
        single.write_text(json.dumps({
            "scenario": "convergence", "passed": True,
            "metrics": {"pairs": [[1e-3, 1e-10]]},
        }))
        with pytest.raises(ArtifactError, match="at least 3"):
            plot_scalings([single], tmp_path / "out.png")

    def test_rerender_is_byte_identical(self, synthetic_run, tmp_path):
        a = plot_drift(synthetic_run, tmp_path / "a.png")
        b = plot_drift(synthetic_run, tmp_path / "b.png")
        assert a.read_bytes() == b.read_bytes()

    def test_inputs_not_mutated(self, synthetic_run, tmp_path):
        before = synthetic_run.snapshots.read_bytes()
        plot_fields(synthetic_run, tmp_path / "fields.png")
        assert synthetic_run.snapshots.read_bytes() == before


class TestCli:
    def test_fields_command(self, synthetic_run, tmp_path, capsys):
        run_dir = synthetic_run.diagnostics.parent
        out = tmp_path / "f.png"
        assert main(["fields", "--run", str(run_dir), "--out", str(out)]) == 0
        assert out.exists()

    def test_drift_and_scalings_commands(self, synthetic_run, convergence_report, tmp_path):
        run_dir = synthetic_run.diagnostics.parent
        assert main(["drift", "--run", str(run_dir), "--out", str(tmp_path / "d.svg")]) == 0
        assert main(["scalings", str(convergence_report), "--out", str(tmp_path / "s.png")]) == 0

    def test_bad_run_dir_exit_code(self, tmp_path, capsys):
        assert main(["drift", "--run", str(tmp_path / "nope"), "--out", str(tmp_path / "d.png")]) == 2
        assert "artifact error" in capsys.readouterr().out
