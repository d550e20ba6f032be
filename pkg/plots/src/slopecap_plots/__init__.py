"""Render slopecap study CSV files to static figures."""

from .render import (
    PlotSpec,
    plot_free_boundaries,
    plot_profiles,
    profile_residual_max,
)

__all__ = ["PlotSpec", "plot_profiles", "plot_free_boundaries",
           "profile_residual_max"]
