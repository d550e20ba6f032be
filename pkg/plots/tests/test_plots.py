import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from slopecap_plots import (
    PlotSpec,
    plot_free_boundaries,
    plot_profiles,
    profile_residual_max,
)
from slopecap_plots.cli import main

REFERENCE_CONFIG = """\
n_cells = 400
dt = 0.0005
t_end = 1.25
snapshot_times = 0 0.75 1.125 1.25
"""


@pytest.fixture(scope="session")
def solver_output(tmp_path_factory):
    """Reference-resolution solver run, consumed through its CLI only."""
    root = tmp_path_factory.mktemp("solver")
    config = root / "sandpile.cfg"
    config.write_text(REFERENCE_CONFIG)
    out_dir = root / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "slopecap.cli", "sandpile",
         "--config", str(config), "--out", str(out_dir)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out_dir


@pytest.fixture()
def oracle_only_output(tmp_path, solver_output):
    """Same schema with the numeric column replaced by the reference one."""
    clone = tmp_path / "oracle_only"
    clone.mkdir()
    with open(solver_output / "profiles.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    with open(clone / "profiles.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["t", "x", "u_numeric", "u_oracle"])
        writer.writeheader()
        for row in rows:
            row["u_numeric"] = row["u_oracle"]
            writer.writerow(row)
    (clone / "free_boundary.csv").write_text(
        (solver_output / "free_boundary.csv").read_text())
    return clone


class TestPlotProfiles:
    def test_four_panel_figure_written(self, solver_output, tmp_path):
        out = tmp_path / "profiles.png"
        spec = PlotSpec(input_dir=solver_output, output=out,
                        times_to_plot=[0.0, 0.75, 1.125, 1.25])
        path = plot_profiles(spec)
        assert path == out
        assert out.stat().st_size > 10_000

    def test_default_times_are_all_available(self, solver_output, tmp_path):
        spec = PlotSpec(input_dir=solver_output, output=tmp_path / "p.png")
        assert plot_profiles(spec).exists()

    def test_unknown_time_rejected(self, solver_output, tmp_path):
        spec = PlotSpec(input_dir=solver_output, output=tmp_path / "p.png",
                        times_to_plot=[0.33])
        with pytest.raises(ValueError, match="not present"):
            plot_profiles(spec)

    def test_missing_csv_raises(self, tmp_path):
        spec = PlotSpec(input_dir=tmp_path, output=tmp_path / "p.png")
        with pytest.raises(FileNotFoundError):
            plot_profiles(spec)

    def test_oracle_only_residual_is_zero(self, oracle_only_output, tmp_path):
        spec = PlotSpec(input_dir=oracle_only_output, output=tmp_path / "p.png")
        plot_profiles(spec)
        assert profile_residual_max(oracle_only_output) == 0.0


class TestPlotFreeBoundaries:
    def test_figure_written(self, solver_output, tmp_path):
        out = tmp_path / "fb.png"
        spec = PlotSpec(input_dir=solver_output, output=out)
        assert plot_free_boundaries(spec) == out
        assert out.stat().st_size > 10_000

    def test_missing_csv_raises(self, tmp_path):
        spec = PlotSpec(input_dir=tmp_path, output=tmp_path / "fb.png")
        with pytest.raises(FileNotFoundError):
            plot_free_boundaries(spec)

    def test_wrong_schema_rejected(self, tmp_path):
        (tmp_path / "free_boundary.csv").write_text("a,b\n1,2\n")
        spec = PlotSpec(input_dir=tmp_path, output=tmp_path / "fb.png")
        with pytest.raises(ValueError, match="expected columns"):
            plot_free_boundaries(spec)


class TestCli:
    def test_profiles_and_boundaries_commands(self, solver_output, tmp_path):
        out1 = tmp_path / "profiles.png"
        code = main(["profiles", "--in", str(solver_output), "--out", str(out1),
                     "--times", "0", "0.75", "1.125", "1.25"])
        assert code == 0 and out1.exists()
        out2 = tmp_path / "fb.png"
        assert main(["boundaries", "--in", str(solver_output),
                     "--out", str(out2)]) == 0
        assert out2.exists()

    def test_missing_input_is_error_exit(self, tmp_path):
        code = main(["profiles", "--in", str(tmp_path / "nowhere"),
                     "--out", str(tmp_path / "p.png")])
        assert code == 1

    def test_empty_times_is_error_exit(self, solver_output, tmp_path):
        code = main(["profiles", "--in", str(solver_output),
                     "--out", str(tmp_path / "p.png"), "--times"])
        assert code == 1


class TestAcceptanceCriterion11:
    def test_residual_max_matches_manifest(self, solver_output, tmp_path):
        spec = PlotSpec(input_dir=solver_output, output=tmp_path / "p.png",
                        times_to_plot=[0.0, 0.75, 1.125, 1.25])
        plot_profiles(spec)
        residual = profile_residual_max(solver_output, spec.times_to_plot)
        manifest = json.loads((solver_output / "manifest.json").read_text())
        reported = max(e["measured"] for e in manifest["acceptance"]
                       if e["name"].startswith("profile_error"))
        print(f"[{'PASS' if abs(residual - reported) <= 1e-12 else 'FAIL'}] "
              f"criterion 11: residual panel max {residual!r} vs manifest {reported!r}")
        assert abs(residual - reported) <= 1e-12
        assert plot_free_boundaries(
            PlotSpec(input_dir=solver_output, output=tmp_path / "fb.png")).exists()
