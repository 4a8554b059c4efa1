"""Config validation, CSV/JSON contracts, determinism, exit codes."""

import json

import numpy as np
import pytest

from thermoqfi.cli import (
    EXIT_CONFIG,
    EXIT_CONTRACT,
    EXIT_OK,
    ConfigError,
    ContractViolationError,
    _check_dominance,
    main,
    parse_config,
    run_grid,
    run_report,
    run_scan,
)


def ising_doc(**overrides):
    doc = {
        "model": {"type": "ising", "n_pairs": 2, "coupling": 1.0, "fields": [0.1, 0.2]},
        "beta": 0.7,
        "direction_n": [0.5, 0.5],
    }
    doc.update(overrides)
    return doc


def read_rows(path):
    lines = [line.rstrip("\n") for line in open(path) if not line.startswith("#")]
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


class TestConfigValidation:
    def test_minimal_point_config(self):
        config = parse_config(ising_doc())
        assert config.mode == "point"
        assert config.checks.run_bounds

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown keys"):
            parse_config(ising_doc(extra=1))

    def test_unknown_model_key_rejected(self):
        doc = ising_doc()
        doc["model"]["typo"] = 3
        with pytest.raises(ConfigError, match="unknown keys"):
            parse_config(doc)

    def test_single_point_scan_rejected(self):
        doc = ising_doc(scan={"variable": "J", "start": 0.0, "stop": 1.0, "points": 1})
        with pytest.raises(ConfigError, match="points"):
            parse_config(doc)

    def test_scan_and_grid_exclusive(self):
        doc = ising_doc(
            scan={"variable": "J", "start": 0.0, "stop": 1.0, "points": 2},
            grid={"var_x": "B1", "var_y": "B2",
                  "ranges": [[-0.1, 0.1], [-0.1, 0.1]], "points": 2})
        with pytest.raises(ConfigError, match="mutually exclusive"):
            parse_config(doc)

    def test_direction_length_checked(self):
        with pytest.raises(ConfigError, match="direction_n"):
            parse_config(ising_doc(direction_n=[1.0]))

    def test_bad_scan_variable(self):
        doc = ising_doc(scan={"variable": "theta", "start": 0, "stop": 1, "points": 3})
        with pytest.raises(ConfigError, match="variable"):
            parse_config(doc)

    def test_local_field_beyond_dense_limit_rejected(self):
        doc = {
            "model": {"type": "local_field", "num_qubits": 20, "theta": 0.3},
            "beta": 1.0,
            "direction_n": [1.0],
        }
        with pytest.raises(ConfigError, match="dense limit"):
            parse_config(doc)

    def test_nonpositive_beta_rejected(self):
        with pytest.raises(ConfigError, match="beta"):
            parse_config(ising_doc(beta=0.0))

    def test_empty_output_path_rejected(self):
        with pytest.raises(ConfigError, match="nonempty path"):
            parse_config(ising_doc(outputs={"csv": ""}))


class TestRunScan:
    def test_csv_contract_dense_and_transfer(self, tmp_path):
        doc = ising_doc(
            scan={"variable": "J", "start": 0.0, "stop": 2.0, "points": 3},
            sizes=[2, 8],
            checks={"run_oracle": True})
        out = tmp_path / "scan.csv"
        run_scan(parse_config(doc), str(out))
        header, rows = read_rows(out)
        assert header == ["size", "scan_var", "scan_value", "qfi_nFn",
                          "bound_finiteT", "bound_gammaHL", "gap",
                          "oracle_resid", "method"]
        assert len(rows) == 6
        sizes = [int(r[0]) for r in rows]
        assert sizes == sorted(sizes)
        for row in rows:
            assert row[8] == ("dense" if int(row[0]) == 2 else "transfer")
            value, bound = float(row[3]), float(row[4])
            assert value <= bound + 1e-9 * (1.0 + bound)
        dense_rows = [r for r in rows if r[8] == "dense"]
        assert all(float(r[7]) < 1e-6 for r in dense_rows)
        transfer_rows = [r for r in rows if r[8] == "transfer"]
        assert all(r[7] == "NA:transfer_path" for r in transfer_rows)

    def test_scan_values_sorted(self, tmp_path):
        doc = ising_doc(scan={"variable": "B1", "start": 0.5, "stop": -0.5, "points": 3})
        out = tmp_path / "scan.csv"
        run_scan(parse_config(doc), str(out))
        _, rows = read_rows(out)
        values = [float(r[2]) for r in rows]
        assert values == sorted(values)

    def test_local_field_beta_scan(self, tmp_path):
        doc = {
            "model": {"type": "local_field", "num_qubits": 3, "theta": 0.2},
            "beta": 1.0,
            "direction_n": [1.0],
            "scan": {"variable": "beta", "start": 0.5, "stop": 2.0, "points": 4},
        }
        out = tmp_path / "scan.csv"
        run_scan(parse_config(doc), str(out))
        _, rows = read_rows(out)
        # F <= beta^2 N^2 / 4 ordering against the structural bound column
        for row in rows:
            beta = float(row[2])
            assert float(row[3]) <= beta ** 2 * 9.0 / 4.0 + 1e-9
            assert float(row[5]) == pytest.approx(beta ** 2 * 9.0 / 4.0, rel=1e-12)

    def test_degenerate_gap_marked(self, tmp_path):
        doc = ising_doc(
            model={"type": "ising", "n_pairs": 2, "coupling": 1.0, "fields": [0.0, 0.0]},
            scan={"variable": "J", "start": 0.5, "stop": 1.5, "points": 2})
        out = tmp_path / "scan.csv"
        run_scan(parse_config(doc), str(out))
        _, rows = read_rows(out)
        assert all(r[6] == "NA:degenerate_ground_state" for r in rows)


class TestRunGrid:
    def test_degenerate_two_by_two_grid(self, tmp_path):
        doc = ising_doc(grid={"var_x": "B1", "var_y": "B2",
                              "ranges": [[-0.1, 0.1], [-0.1, 0.1]], "points": 2})
        out = tmp_path / "grid.csv"
        run_grid(parse_config(doc), str(out))
        header, rows = read_rows(out)
        assert header == ["B1", "B2", "qfi_nFn"]
        assert len(rows) == 4
        # row-major: outer loop over B1
        assert [r[0] for r in rows] == ["-0.1", "-0.1", "0.1", "0.1"]

    def test_header_comments_record_parameters(self, tmp_path):
        doc = ising_doc(grid={"var_x": "B1", "var_y": "B2",
                              "ranges": [[-0.1, 0.1], [-0.1, 0.1]], "points": 2})
        out = tmp_path / "grid.csv"
        run_grid(parse_config(doc), str(out))
        comments = [line for line in open(out) if line.startswith("#")]
        joined = "".join(comments)
        assert "beta=0.7" in joined and "J=1.0" in joined and "N=2" in joined


class TestRunReport:
    def test_xyz_report_contract(self, tmp_path):
        doc = {
            "model": {"type": "xyz", "theta": [0.0, 0.0, 1.0]},
            "beta": 1.0,
            "direction_n": [1.0, 0.0, 0.0],
        }
        out = tmp_path / "report.json"
        run_report(parse_config(doc), str(out))
        document = json.loads(out.read_text())
        assert set(document) == {"qfi_matrix", "covariance_gamma", "bounds",
                                 "attainability", "oracle"}
        strong = np.array(document["attainability"]["strong"])
        assert strong.max() > 1e-3
        assert document["oracle"]["max_residual"] < 1e-6

    def test_disjoint_blocks_strong_zero(self, tmp_path):
        doc = {
            "model": {"type": "disjoint_blocks", "block_sizes": [2, 2],
                      "theta": [0.3, -0.2]},
            "beta": 1.0,
            "direction_n": [1.0, 1.0],
        }
        out = tmp_path / "report.json"
        run_report(parse_config(doc), str(out))
        document = json.loads(out.read_text())
        assert np.abs(np.array(document["attainability"]["strong"])).max() <= 1e-10

    def test_ising_report_zeros_and_oracle(self, tmp_path):
        out = tmp_path / "report.json"
        run_report(parse_config(ising_doc()), str(out))
        document = json.loads(out.read_text())
        assert np.abs(np.array(document["attainability"]["weak"])).max() <= 1e-10
        assert np.abs(np.array(document["attainability"]["strong"])).max() <= 1e-10
        assert document["oracle"]["max_residual"] < 1e-6
        assert document["bounds"]["gap"] is not None

    def test_degenerate_zero_t_is_structured_not_fatal(self, tmp_path):
        doc = ising_doc(model={"type": "ising", "n_pairs": 2, "coupling": 1.0,
                               "fields": [0.0, 0.0]})
        out = tmp_path / "report.json"
        run_report(parse_config(doc), str(out))
        document = json.loads(out.read_text())
        assert document["bounds"]["zero_T_limit"] is None
        assert document["bounds"]["zero_T_reason"] == "degenerate_ground_state"

    def test_report_rejects_scan_config(self, tmp_path):
        doc = ising_doc(scan={"variable": "J", "start": 0.0, "stop": 1.0, "points": 2})
        with pytest.raises(ConfigError):
            run_report(parse_config(doc), str(tmp_path / "x.json"))

    def test_report_rejects_transfer_size(self, tmp_path):
        doc = ising_doc(model={"type": "ising", "n_pairs": 10, "coupling": 1.0,
                               "fields": [0.1, 0.2]})
        with pytest.raises(ConfigError, match="dense"):
            run_report(parse_config(doc), str(tmp_path / "x.json"))


class TestDeterminismAndExitCodes:
    def test_rerun_and_thread_count_byte_identical(self, tmp_path):
        doc = ising_doc(scan={"variable": "J", "start": 0.0, "stop": 3.0, "points": 5},
                        sizes=[2, 9])
        config = parse_config(doc)
        paths = [tmp_path / name for name in ("a.csv", "b.csv", "c.csv")]
        run_scan(config, str(paths[0]), threads=1)
        run_scan(config, str(paths[1]), threads=1)
        run_scan(config, str(paths[2]), threads=4)
        blobs = [p.read_bytes() for p in paths]
        assert blobs[0] == blobs[1] == blobs[2]

    def test_main_exit_codes(self, tmp_path):
        config_path = tmp_path / "cfg.json"
        config_path.write_text(json.dumps(ising_doc(
            scan={"variable": "J", "start": 0.0, "stop": 1.0, "points": 2})))
        out = tmp_path / "out.csv"
        assert main(["scan", "--config", str(config_path), "--out", str(out)]) == EXIT_OK
        assert out.exists()

        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"model": {"type": "nope"}}))
        assert main(["scan", "--config", str(bad), "--out", str(out)]) == EXIT_CONFIG

        missing_out = tmp_path / "cfg2.json"
        missing_out.write_text(json.dumps(ising_doc(
            scan={"variable": "J", "start": 0.0, "stop": 1.0, "points": 2})))
        assert main(["scan", "--config", str(missing_out)]) == EXIT_CONFIG

    def test_outputs_block_used_when_no_flag(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config_path = tmp_path / "cfg.json"
        config_path.write_text(json.dumps(ising_doc(
            scan={"variable": "J", "start": 0.0, "stop": 1.0, "points": 2},
            outputs={"csv": "from_config.csv"})))
        assert main(["scan", "--config", str(config_path)]) == EXIT_OK
        assert (tmp_path / "from_config.csv").exists()

    def test_selftest_passes(self, capsys):
        assert main(["selftest"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("PASS") == 5 and "FAIL" not in out

    def test_dominance_contract_raises_beyond_tolerance(self, tmp_path, monkeypatch):
        _check_dominance(1.0, 1.0)       # exact saturation passes
        _check_dominance(1.0, 1.0 - 1e-10)
        with pytest.raises(ContractViolationError):
            _check_dominance(1.0 + 1e-6, 1.0)
        # a broken bound surfaces as exit code 3, with no file written
        import thermoqfi.cli as cli_mod
        monkeypatch.setattr(cli_mod, "_eval_dense", lambda *a, **k: {
            "qfi_nFn": 2.0, "bound_finiteT": 1.0, "bound_gammaHL": 3.0,
            "gap": 1.0, "oracle_resid": "NA:not_requested", "method": "dense"})
        config_path = tmp_path / "cfg.json"
        config_path.write_text(json.dumps(ising_doc(
            scan={"variable": "J", "start": 0.0, "stop": 1.0, "points": 2})))
        out = tmp_path / "broken.csv"
        assert main(["scan", "--config", str(config_path),
                     "--out", str(out)]) == EXIT_CONTRACT
        assert not out.exists()
