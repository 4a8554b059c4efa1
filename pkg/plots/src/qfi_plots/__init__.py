"""Figure rendering for thermoqfi CSV artifacts."""

from .render import PlotDataError, PlotJob, RenderResult, read_csv, render, render_contour, render_lines

__version__ = "0.1.0"
