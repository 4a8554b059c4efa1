"""Render line and contour figures from thermoqfi CSV artifacts.

Rendering is read-only presentation: the input CSV is never modified and no
physics is recomputed.  Output is raster (PNG at a fixed DPI) or vector
(SVG/PDF, by file extension); identical inputs re-render to identical files.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

#: Fixed raster resolution.
DPI = 150

THICK_WIDTH = 2.6
THIN_WIDTH = 1.0

_SCAN_REQUIRED = ("size", "scan_value", "qfi_nFn", "bound_gammaHL")


class PlotDataError(ValueError):
    """The input CSV does not match the expected column contract."""


@dataclass(frozen=True)
class PlotJob:
    """One rendering task: a CSV, the figure kind, and the output path."""

    input_csv: str
    kind: str
    output_image: str
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        if self.kind not in ("lines", "contour"):
            raise ValueError(f"kind must be 'lines' or 'contour', got {self.kind!r}")


@dataclass(frozen=True)
class RenderResult:
    """What was drawn: trace counts for lines, grid shape for contours."""

    output_image: str
    thick_traces: int = 0
    thin_traces: int = 0
    grid_shape: tuple[int, int] | None = None


def read_csv(path):
    """Parse a '#'-commented CSV into (header, string rows)."""
    header = None
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cells = line.split(",")
            if header is None:
                header = cells
            else:
                rows.append(cells)
    if header is None or not rows:
        raise PlotDataError(f"{path}: empty CSV")
    return header, rows


def _column(header, rows, name, path):
    if name not in header:
        raise PlotDataError(f"{path}: missing column {name!r} (have {header})")
    index = header.index(name)
    return [row[index] for row in rows]


def render_lines(job: PlotJob) -> RenderResult:
    """One thick curve (exact QFI) and one thin trace (bound) per size.

    Consumes the scan CSV contract; curves are keyed and labelled by the
    ``size`` column, in ascending order.
    """
    header, rows = read_csv(job.input_csv)
    for name in _SCAN_REQUIRED:
        _column(header, rows, name, job.input_csv)
    sizes = np.array([int(s) for s in _column(header, rows, "size", job.input_csv)])
    xs = np.array([float(v) for v in _column(header, rows, "scan_value", job.input_csv)])
    exact = np.array([float(v) for v in _column(header, rows, "qfi_nFn", job.input_csv)])
    bound = np.array([float(v) for v in _column(header, rows, "bound_gammaHL",
                                                job.input_csv)])
    scan_var = _column(header, rows, "scan_var", job.input_csv)[0] \
        if "scan_var" in header else "scan value"

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    thick = thin = 0
    for order, size in enumerate(np.unique(sizes)):
        keep = sizes == size
        color = f"C{order}"
        ax.plot(xs[keep], exact[keep], linewidth=THICK_WIDTH, color=color,
                label=f"N={size}")
        ax.plot(xs[keep], bound[keep], linewidth=THIN_WIDTH, color=color,
                linestyle="--")
        thick += 1
        thin += 1
    ax.set_xlabel(job.xlabel or scan_var)
    ax.set_ylabel(job.ylabel or "n^T F n")
    if job.title:
        ax.set_title(job.title)
    ax.legend(title="thick: exact, thin: bound")
    fig.savefig(job.output_image, dpi=DPI)
    plt.close(fig)
    return RenderResult(output_image=job.output_image,
                        thick_traces=thick, thin_traces=thin)


def render_contour(job: PlotJob) -> RenderResult:
    """Filled contour of ``qfi_nFn`` over the two grid variables."""
    header, rows = read_csv(job.input_csv)
    if len(header) != 3 or header[2] != "qfi_nFn":
        raise PlotDataError(
            f"{job.input_csv}: expected columns (var_x, var_y, qfi_nFn), got {header}")
    xs = np.array([float(row[0]) for row in rows])
    ys = np.array([float(row[1]) for row in rows])
    values = np.array([float(row[2]) for row in rows])

    x_axis = np.unique(xs)
    y_axis = np.unique(ys)
    if x_axis.size * y_axis.size != len(rows):
        raise PlotDataError(f"{job.input_csv}: non-rectangular grid "
                            f"({len(rows)} rows vs {x_axis.size}x{y_axis.size})")
    grid = np.full((x_axis.size, y_axis.size), np.nan)
    x_index = {value: i for i, value in enumerate(x_axis)}
    y_index = {value: i for i, value in enumerate(y_axis)}
    for x, y, value in zip(xs, ys, values):
        row, col = x_index[x], y_index[y]
        if not np.isnan(grid[row, col]):
            raise PlotDataError(f"{job.input_csv}: duplicate grid point ({x}, {y})")
        grid[row, col] = value
    if np.isnan(grid).any():
        raise PlotDataError(f"{job.input_csv}: non-rectangular grid (missing points)")

    fig, ax = plt.subplots(figsize=(5.8, 4.8))
    span = float(values.max() - values.min())
    if span == 0.0:
        # constant field: contourf needs distinct levels
        levels = np.linspace(values.min() - 0.5, values.max() + 0.5, 11)
    else:
        levels = np.linspace(values.min(), values.max(), 31)
    filled = ax.contourf(x_axis, y_axis, grid.T, levels=levels)
    fig.colorbar(filled, ax=ax, label="n^T F n")
    ax.set_xlabel(job.xlabel or header[0])
    ax.set_ylabel(job.ylabel or header[1])
    if job.title:
        ax.set_title(job.title)
    fig.savefig(job.output_image, dpi=DPI)
    plt.close(fig)
    return RenderResult(output_image=job.output_image,
                        grid_shape=(x_axis.size, y_axis.size))


def render(job: PlotJob) -> RenderResult:
    if job.kind == "lines":
        return render_lines(job)
    return render_contour(job)
