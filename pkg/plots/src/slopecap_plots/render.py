"""Figure rendering for the solver CLI's CSV output.

Reads only the documented schemas (profiles.csv with columns
t,x,u_numeric,u_oracle and free_boundary.csv with columns
t,xi_numeric,xi_oracle,zeta_numeric,zeta_oracle) and never recomputes
solver quantities; the band envelope drawn behind the profiles is pure
geometry of the x-extent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PROFILE_COLUMNS = ("t", "x", "u_numeric", "u_oracle")
BOUNDARY_COLUMNS = ("t", "xi_numeric", "xi_oracle", "zeta_numeric", "zeta_oracle")


@dataclass
class PlotSpec:
    """Where to read the CSVs, which snapshot times to draw, where to write."""

    input_dir: Path
    output: Path
    times_to_plot: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.input_dir = Path(self.input_dir)
        self.output = Path(self.output)


def _read_csv(path: Path, expected: tuple[str, ...]) -> dict[str, np.ndarray]:
    if not path.is_file():
        raise FileNotFoundError(f"missing input file: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != expected:
            raise ValueError(
                f"{path}: expected columns {','.join(expected)}, "
                f"got {reader.fieldnames}")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return {name: np.array([float(row[name]) for row in rows])
            for name in expected}


def load_profiles(input_dir: Path) -> dict[str, np.ndarray]:
    return _read_csv(Path(input_dir) / "profiles.csv", PROFILE_COLUMNS)


def load_free_boundaries(input_dir: Path) -> dict[str, np.ndarray]:
    return _read_csv(Path(input_dir) / "free_boundary.csv", BOUNDARY_COLUMNS)


def _select_times(available: np.ndarray, requested: list[float]) -> list[float]:
    times = sorted(set(available.tolist()))
    if not requested:
        return times
    chosen = []
    for want in requested:
        matches = [t for t in times if abs(t - want) <= 1e-9 * max(1.0, abs(want))]
        if not matches:
            raise ValueError(f"time {want} not present in profiles.csv "
                             f"(available: {times})")
        chosen.append(matches[0])
    return chosen


def profile_residual_max(input_dir: Path, times_to_plot: list[float] | None = None) -> float:
    """Largest |u_numeric - u_oracle| over the plotted times; the number
    annotated on the residual panel."""
    table = load_profiles(input_dir)
    times = _select_times(table["t"], times_to_plot or [])
    worst = 0.0
    for t in times:
        mask = table["t"] == t
        worst = max(worst, float(np.max(np.abs(
            table["u_numeric"][mask] - table["u_oracle"][mask]))))
    return worst


def plot_profiles(spec: PlotSpec) -> Path:
    """One panel per requested time with numeric and reference curves over
    the +/- distance envelope, plus a shared residual panel underneath.
    Returns the written image path."""
    table = load_profiles(spec.input_dir)
    times = _select_times(table["t"], spec.times_to_plot)

    n_panels = len(times)
    fig = plt.figure(figsize=(3.2 * n_panels, 5.4))
    grid_spec = fig.add_gridspec(2, n_panels, height_ratios=(2.2, 1.0))

    x_all = table["x"]
    x_left, x_right = float(np.min(x_all)), float(np.max(x_all))
    residual_axis = fig.add_subplot(grid_spec[1, :])
    worst = 0.0
    for k, t in enumerate(times):
        mask = table["t"] == t
        x = table["x"][mask]
        numeric = table["u_numeric"][mask]
        reference = table["u_oracle"][mask]
        order = np.argsort(x)
        x, numeric, reference = x[order], numeric[order], reference[order]

        envelope = np.minimum(x - x_left, x_right - x)
        axis = fig.add_subplot(grid_spec[0, k])
        axis.fill_between(x, -envelope, envelope, color="0.92", zorder=0)
        axis.plot(x, envelope, color="0.6", lw=0.8)
        axis.plot(x, -envelope, color="0.6", lw=0.8)
        axis.plot(x, reference, "k--", lw=1.4, label="reference")
        axis.plot(x, numeric, "C0", lw=1.2, label="numeric")
        axis.set_title(f"t = {t:g}")
        axis.set_xlabel("x")
        if k == 0:
            axis.set_ylabel("u")
            axis.legend(fontsize=8)

        residual = np.abs(numeric - reference)
        worst = max(worst, float(np.max(residual)))
        residual_axis.plot(x, residual, lw=1.0, label=f"t = {t:g}")

    residual_axis.set_xlabel("x")
    residual_axis.set_ylabel("|numeric - reference|")
    residual_axis.set_title(f"residuals (max {worst:.3e})")
    residual_axis.legend(fontsize=8, ncols=min(4, n_panels))
    fig.tight_layout()
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, dpi=130)
    plt.close(fig)
    return spec.output


def plot_free_boundaries(spec: PlotSpec) -> Path:
    """Numeric contact-point positions as markers over the reference
    curves; NaN entries (absent edges) are skipped."""
    table = load_free_boundaries(spec.input_dir)
    t = table["t"]

    fig, axis = plt.subplots(figsize=(6.0, 4.2))
    for column, style, label in (
        ("xi_oracle", "k--", "xi reference"),
        ("zeta_oracle", "k:", "zeta reference"),
    ):
        values = table[column]
        mask = ~np.isnan(values)
        if np.any(mask):
            axis.plot(t[mask], values[mask], style, lw=1.4, label=label)
    for column, marker, label in (
        ("xi_numeric", "o", "xi numeric"),
        ("zeta_numeric", "s", "zeta numeric"),
    ):
        values = table[column]
        mask = ~np.isnan(values)
        if np.any(mask):
            axis.scatter(t[mask], values[mask], marker=marker, s=28,
                         zorder=3, label=label)
    axis.set_xlabel("t")
    axis.set_ylabel("contact position")
    axis.set_title("contact points over time")
    axis.legend(fontsize=8)
    fig.tight_layout()
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, dpi=130)
    plt.close(fig)
    return spec.output
