"""Rendering contracts: trace counts, grid checks, idempotence."""

import shutil
import subprocess
import sys

import numpy as np
import pytest

from qfi_plots import PlotDataError, PlotJob, render_contour, render_lines
from qfi_plots.cli import main

SCAN_HEADER = ("size,scan_var,scan_value,qfi_nFn,bound_finiteT,bound_gammaHL,"
               "gap,oracle_resid,method")


def scan_csv(path, sizes=(2, 4), points=5):
    lines = ["# synthetic scan", SCAN_HEADER]
    for size in sizes:
        for x in np.linspace(0.0, 2.0, points):
            value = float(size * (1.0 + x))
            bound = 4.0 * size ** 2
            lines.append(f"{size},J,{float(x)!r},{value!r},{value!r},{bound!r},"
                         "NA:transfer_path,NA:not_requested,transfer")
    path.write_text("\n".join(lines) + "\n")
    return path


def grid_csv(path, nx=4, ny=3, constant=None):
    lines = ["# synthetic grid", "B1,B2,qfi_nFn"]
    for x in np.linspace(-0.1, 0.1, nx):
        for y in np.linspace(-0.2, 0.2, ny):
            value = float(constant if constant is not None else 1.0 + np.cos(x + y))
            lines.append(f"{float(x)!r},{float(y)!r},{value!r}")
    path.write_text("\n".join(lines) + "\n")
    return path


class TestRenderLines:
    def test_trace_counts_per_size(self, tmp_path):
        csv = scan_csv(tmp_path / "scan.csv", sizes=(2, 4, 8))
        result = render_lines(PlotJob(str(csv), "lines", str(tmp_path / "out.png")))
        assert result.thick_traces == 3
        assert result.thin_traces == 3
        assert (tmp_path / "out.png").stat().st_size > 0

    def test_single_size(self, tmp_path):
        csv = scan_csv(tmp_path / "scan.csv", sizes=(5,))
        result = render_lines(PlotJob(str(csv), "lines", str(tmp_path / "out.png")))
        assert (result.thick_traces, result.thin_traces) == (1, 1)

    def test_bound_never_below_exact_in_data(self, tmp_path):
        csv = scan_csv(tmp_path / "scan.csv")
        from qfi_plots import read_csv
        header, rows = read_csv(str(csv))
        qfi = [float(r[header.index("qfi_nFn")]) for r in rows]
        bound = [float(r[header.index("bound_gammaHL")]) for r in rows]
        assert all(b >= q for q, b in zip(qfi, bound))

    def test_missing_column_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("size,scan_value,qfi_nFn\n2,0.0,1.0\n")
        with pytest.raises(PlotDataError, match="missing column"):
            render_lines(PlotJob(str(bad), "lines", str(tmp_path / "out.png")))

    def test_empty_csv_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("# only comments\n")
        with pytest.raises(PlotDataError, match="empty"):
            render_lines(PlotJob(str(empty), "lines", str(tmp_path / "out.png")))

    def test_idempotent_and_read_only(self, tmp_path):
        csv = scan_csv(tmp_path / "scan.csv")
        before = csv.read_bytes()
        job_a = PlotJob(str(csv), "lines", str(tmp_path / "a.png"))
        job_b = PlotJob(str(csv), "lines", str(tmp_path / "b.png"))
        render_lines(job_a)
        render_lines(job_b)
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
        assert csv.read_bytes() == before


class TestRenderContour:
    def test_basic_grid(self, tmp_path):
        csv = grid_csv(tmp_path / "grid.csv", nx=5, ny=4)
        result = render_contour(PlotJob(str(csv), "contour", str(tmp_path / "out.png")))
        assert result.grid_shape == (5, 4)
        assert (tmp_path / "out.png").stat().st_size > 0

    def test_constant_field_renders(self, tmp_path):
        csv = grid_csv(tmp_path / "grid.csv", constant=2.5)
        result = render_contour(PlotJob(str(csv), "contour", str(tmp_path / "out.png")))
        assert result.grid_shape == (4, 3)

    def test_non_rectangular_rejected(self, tmp_path):
        csv = grid_csv(tmp_path / "grid.csv")
        lines = csv.read_text().rstrip("\n").split("\n")
        csv.write_text("\n".join(lines[:-1]) + "\n")  # drop one grid point
        with pytest.raises(PlotDataError, match="non-rectangular"):
            render_contour(PlotJob(str(csv), "contour", str(tmp_path / "out.png")))

    def test_wrong_columns_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("B1,B2,other\n0.0,0.0,1.0\n")
        with pytest.raises(PlotDataError, match="expected columns"):
            render_contour(PlotJob(str(bad), "contour", str(tmp_path / "out.png")))

    def test_idempotent(self, tmp_path):
        csv = grid_csv(tmp_path / "grid.csv")
        render_contour(PlotJob(str(csv), "contour", str(tmp_path / "a.png")))
        render_contour(PlotJob(str(csv), "contour", str(tmp_path / "b.png")))
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


class TestCli:
    def test_lines_roundtrip(self, tmp_path, capsys):
        csv = scan_csv(tmp_path / "scan.csv")
        out = tmp_path / "fig.png"
        assert main(["lines", "--in", str(csv), "--out", str(out)]) == 0
        assert "2 thick + 2 thin" in capsys.readouterr().out

    def test_error_exit_code(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("#\n")
        assert main(["lines", "--in", str(empty),
                     "--out", str(tmp_path / "x.png")]) == 1

    def test_vector_output(self, tmp_path):
        csv = grid_csv(tmp_path / "grid.csv")
        out = tmp_path / "fig.svg"
        assert main(["contour", "--in", str(csv), "--out", str(out)]) == 0
        assert out.read_bytes().startswith(b"<?xml")


@pytest.mark.skipif(shutil.which("thermoqfi") is None,
                    reason="thermoqfi CLI not installed")
class TestAgainstRealArtifacts:
    """End-to-end: consume CSVs produced by the thermoqfi CLI itself."""

    def test_scan_and_grid_artifacts_render(self, tmp_path):
        import json

        scan_cfg = tmp_path / "scan.json"
        scan_cfg.write_text(json.dumps({
            "model": {"type": "ising", "n_pairs": 10, "coupling": 0.0,
                      "fields": [0.0, 0.06]},
            "beta": 0.5,
            "direction_n": [0.5, 0.5],
            "scan": {"variable": "J", "start": 0.0, "stop": 10.0, "points": 50},
            "sizes": [10, 15, 20],
        }))
        grid_cfg = tmp_path / "grid.json"
        grid_cfg.write_text(json.dumps({
            "model": {"type": "ising", "n_pairs": 10, "coupling": 6.0,
                      "fields": [0.0, 0.0]},
            "beta": 0.5,
            "direction_n": [0.5, 0.5],
            "grid": {"var_x": "B1", "var_y": "B2",
                     "ranges": [[-0.2, 0.2], [-0.2, 0.2]], "points": 50},
        }))
        scan_csv_path = tmp_path / "scan.csv"
        grid_csv_path = tmp_path / "grid.csv"
        subprocess.run(["thermoqfi", "scan", "--config", str(scan_cfg),
                        "--out", str(scan_csv_path)], check=True)
        subprocess.run(["thermoqfi", "grid", "--config", str(grid_cfg),
                        "--out", str(grid_csv_path)], check=True)

        lines = render_lines(PlotJob(str(scan_csv_path), "lines",
                                     str(tmp_path / "lines.png")))
        assert (lines.thick_traces, lines.thin_traces) == (3, 3)
        contour = render_contour(PlotJob(str(grid_csv_path), "contour",
                                         str(tmp_path / "contour.png")))
        assert contour.grid_shape == (50, 50)
        # idempotence on the real artifacts
        second = render_lines(PlotJob(str(scan_csv_path), "lines",
                                      str(tmp_path / "lines_again.png")))
        assert (tmp_path / "lines.png").read_bytes() == (
            tmp_path / "lines_again.png").read_bytes()
        assert second.thick_traces == 3
