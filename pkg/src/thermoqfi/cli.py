"""Config-driven experiment runner.

Subcommands
-----------
scan      one CSV row per (size, scan point):
          size,scan_var,scan_value,qfi_nFn,bound_finiteT,bound_gammaHL,gap,oracle_resid,method
grid      rows (var_x, var_y, qfi_nFn) in row-major order
report    single-point JSON with the QFI matrix, covariance, bounds,
          attainability diagnostics, and the finite-difference oracle
selftest  runs a condensed invariant suite end to end

Exit codes: 0 success, 2 config error, 3 numerical-contract violation.

Output files are byte-reproducible: floats use the shortest round-trip
representation in CSVs and 17 significant digits in JSON, row order is fixed,
and no timestamps are recorded.  Unavailable values are written as
``NA:<reason>`` codes.

The dense-diagonalization ceiling is 12 qubits.  Ising rings beyond it route
to the transfer-matrix path (method column "transfer"), which evaluates the
analytic closed form of ln Z; that closed form depends on the sublattice
fields only through their mean, so transfer rows follow the analytic figure
curves rather than the exact staggered-field values (the two agree on
B1 == B2 and differ by O(e^{-4 beta J}) relative terms elsewhere; see
``models.transfer_qfi`` for the exact route).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import models as models_mod
from .bounds import (
    DegenerateGroundStateError,
    FullyDegenerateSpectrumError,
    covariance_matrix,
    energy_gap,
    finite_temperature_bound,
    heisenberg_bound,
)
from .models import IsingConfig, disjoint_blocks_model, ising_alternating, local_field_chain, single_qubit_xyz
from .operators import MAX_DENSE_QUBITS, assemble, eigendecompose
from .qfi import attainability, qfi_matrix, qfi_oracle_fd, quadratic_form
from .thermal import gibbs

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONTRACT = 3

#: Slack for the per-row dominance contract qfi <= bound_finiteT.
DOMINANCE_SLACK = 1e-9

_SCAN_COLUMNS = ("size", "scan_var", "scan_value", "qfi_nFn", "bound_finiteT",
                 "bound_gammaHL", "gap", "oracle_resid", "method")

_MODEL_VARIABLES = {
    "ising": ("J", "B1", "B2", "beta"),
    "local_field": ("theta", "beta"),
    "xyz": ("beta",),
    "disjoint_blocks": ("beta",),
}


class ConfigError(ValueError):
    """Invalid experiment configuration (exit code 2)."""


class ContractViolationError(RuntimeError):
    """A numerical contract (bound dominance) broke beyond tolerance (exit 3)."""


@dataclass(frozen=True)
class ScanSpec:
    variable: str
    start: float
    stop: float
    points: int


@dataclass(frozen=True)
class GridSpec:
    var_x: str
    var_y: str
    ranges: tuple[tuple[float, float], tuple[float, float]]
    points: int


@dataclass(frozen=True)
class Checks:
    run_oracle: bool = False
    run_bounds: bool = True
    run_attainability: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    model: dict
    beta: float
    direction_n: tuple[float, ...]
    scan: ScanSpec | None
    grid: GridSpec | None
    sizes: tuple[int, ...] | None
    outputs: dict
    checks: Checks

    @property
    def mode(self) -> str:
        if self.scan is not None:
            return "scan"
        if self.grid is not None:
            return "grid"
        return "point"


def _require_mapping(obj, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a JSON object")
    return obj


def _check_keys(obj, where, required, optional=()):
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = [key for key in required if key not in obj]
    if missing:
        raise ConfigError(f"{where}: missing required keys {missing}")


def _as_float(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number")
    value = float(value)
    if not np.isfinite(value):
        raise ConfigError(f"{where} must be finite")
    return value


def _as_int(value, where, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where} must be >= {minimum}")
    return value


def _parse_model(doc):
    doc = _require_mapping(doc, "model")
    if "type" not in doc:
        raise ConfigError("model: missing required keys ['type']")
    kind = doc["type"]
    if kind == "ising":
        _check_keys(doc, "model", ("type", "n_pairs", "coupling", "fields"))
        fields = doc["fields"]
        if not (isinstance(fields, list) and len(fields) == 2):
            raise ConfigError("model.fields must be a list [B1, B2]")
        return {"type": "ising",
                "n_pairs": _as_int(doc["n_pairs"], "model.n_pairs", minimum=1),
                "coupling": _as_float(doc["coupling"], "model.coupling"),
                "fields": (_as_float(fields[0], "model.fields[0]"),
                           _as_float(fields[1], "model.fields[1]"))}
    if kind == "local_field":
        _check_keys(doc, "model", ("type", "num_qubits", "theta"))
        num_qubits = _as_int(doc["num_qubits"], "model.num_qubits", minimum=1)
        if num_qubits > MAX_DENSE_QUBITS:
            raise ConfigError(
                f"model.num_qubits={num_qubits} exceeds the dense limit "
                f"({MAX_DENSE_QUBITS}) and this model has no transfer-matrix path")
        return {"type": "local_field", "num_qubits": num_qubits,
                "theta": _as_float(doc["theta"], "model.theta")}
    if kind == "xyz":
        _check_keys(doc, "model", ("type", "theta"))
        theta = doc["theta"]
        if not (isinstance(theta, list) and len(theta) == 3):
            raise ConfigError("model.theta must be a list of three numbers")
        return {"type": "xyz",
                "theta": tuple(_as_float(t, f"model.theta[{i}]")
                               for i, t in enumerate(theta))}
    if kind == "disjoint_blocks":
        _check_keys(doc, "model", ("type", "block_sizes", "theta"))
        blocks = doc["block_sizes"]
        theta = doc["theta"]
        if not (isinstance(blocks, list) and blocks):
            raise ConfigError("model.block_sizes must be a nonempty list")
        blocks = tuple(_as_int(b, f"model.block_sizes[{i}]", minimum=1)
                       for i, b in enumerate(blocks))
        if sum(blocks) > MAX_DENSE_QUBITS:
            raise ConfigError(
                f"model.block_sizes sum to {sum(blocks)} qubits, beyond the "
                f"dense limit ({MAX_DENSE_QUBITS})")
        if not (isinstance(theta, list) and len(theta) == len(blocks)):
            raise ConfigError("model.theta must match block_sizes in length")
        return {"type": "disjoint_blocks", "block_sizes": blocks,
                "theta": tuple(_as_float(t, f"model.theta[{i}]")
                               for i, t in enumerate(theta))}
    raise ConfigError(f"model.type must be one of "
                      f"{sorted(_MODEL_VARIABLES)}, got {kind!r}")


def _model_num_params(model):
    return {"ising": 2, "local_field": 1, "xyz": 3,
            "disjoint_blocks": len(model.get("block_sizes", ()))}[model["type"]]


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a raw JSON document; unknown keys are rejected everywhere."""
    doc = _require_mapping(doc, "config")
    _check_keys(doc, "config", ("model", "beta", "direction_n"),
                ("scan", "grid", "sizes", "outputs", "checks"))
    model = _parse_model(doc["model"])
    beta = _as_float(doc["beta"], "beta")
    if beta <= 0.0:
        raise ConfigError("beta must be > 0")

    direction = doc["direction_n"]
    if not (isinstance(direction, list) and direction):
        raise ConfigError("direction_n must be a nonempty list")
    direction = tuple(_as_float(x, f"direction_n[{i}]") for i, x in enumerate(direction))
    if len(direction) != _model_num_params(model):
        raise ConfigError(
            f"direction_n has length {len(direction)}, model "
            f"{model['type']!r} has {_model_num_params(model)} parameters")
    if all(x == 0.0 for x in direction):
        raise ConfigError("direction_n must be nonzero")

    scan = grid = None
    if "scan" in doc and "grid" in doc:
        raise ConfigError("config: scan and grid are mutually exclusive")
    if "scan" in doc:
        block = _require_mapping(doc["scan"], "scan")
        _check_keys(block, "scan", ("variable", "start", "stop", "points"))
        variable = block["variable"]
        if variable not in _MODEL_VARIABLES[model["type"]]:
            raise ConfigError(
                f"scan.variable {variable!r} is not valid for model "
                f"{model['type']!r}; choose from {_MODEL_VARIABLES[model['type']]}")
        scan = ScanSpec(variable=variable,
                        start=_as_float(block["start"], "scan.start"),
                        stop=_as_float(block["stop"], "scan.stop"),
                        points=_as_int(block["points"], "scan.points", minimum=2))
    if "grid" in doc:
        block = _require_mapping(doc["grid"], "grid")
        _check_keys(block, "grid", ("var_x", "var_y", "ranges", "points"))
        if model["type"] != "ising":
            raise ConfigError("grid mode is only supported for the ising model")
        var_x, var_y = block["var_x"], block["var_y"]
        allowed = _MODEL_VARIABLES["ising"]
        if var_x not in allowed or var_y not in allowed or var_x == var_y:
            raise ConfigError(f"grid.var_x/var_y must be distinct members of {allowed}")
        ranges = block["ranges"]
        if not (isinstance(ranges, list) and len(ranges) == 2
                and all(isinstance(r, list) and len(r) == 2 for r in ranges)):
            raise ConfigError("grid.ranges must be [[x_lo, x_hi], [y_lo, y_hi]]")
        ranges = tuple(tuple(_as_float(v, f"grid.ranges[{i}][{j}]")
                             for j, v in enumerate(r)) for i, r in enumerate(ranges))
        grid = GridSpec(var_x=var_x, var_y=var_y, ranges=ranges,
                        points=_as_int(block["points"], "grid.points", minimum=2))

    sizes = None
    if "sizes" in doc:
        if grid is not None:
            raise ConfigError("sizes are not supported in grid mode; set model.n_pairs")
        raw = doc["sizes"]
        if not (isinstance(raw, list) and raw):
            raise ConfigError("sizes must be a nonempty list of integers")
        sizes = tuple(sorted(_as_int(s, f"sizes[{i}]", minimum=1)
                             for i, s in enumerate(raw)))
        if model["type"] not in ("ising", "local_field"):
            raise ConfigError(f"sizes are not supported for model {model['type']!r}")
        if model["type"] == "local_field" and max(sizes) > MAX_DENSE_QUBITS:
            raise ConfigError(
                f"local_field size {max(sizes)} exceeds the dense limit "
                f"({MAX_DENSE_QUBITS}) and this model has no transfer-matrix path")

    outputs = {}
    if "outputs" in doc:
        block = _require_mapping(doc["outputs"], "outputs")
        _check_keys(block, "outputs", (), ("csv", "json"))
        for key, value in block.items():
            if not isinstance(value, str) or not value:
                raise ConfigError(f"outputs.{key} must be a nonempty path")
            outputs[key] = value

    checks = Checks()
    if "checks" in doc:
        block = _require_mapping(doc["checks"], "checks")
        _check_keys(block, "checks", (),
                    ("run_oracle", "run_bounds", "run_attainability"))
        values = {}
        for key in ("run_oracle", "run_bounds", "run_attainability"):
            if key in block:
                if not isinstance(block[key], bool):
                    raise ConfigError(f"checks.{key} must be a boolean")
                values[key] = block[key]
        checks = Checks(**values)

    return ExperimentConfig(model=model, beta=beta, direction_n=direction,
                            scan=scan, grid=grid, sizes=sizes,
                            outputs=outputs, checks=checks)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc)


# ---------------------------------------------------------------------------
# Point evaluation
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    """Shortest round-trip decimal representation (byte-reproducible)."""
    return repr(float(value))


def _build_dense_model(model_cfg, size, overrides):
    kind = model_cfg["type"]
    if kind == "ising":
        j = overrides.get("J", model_cfg["coupling"])
        b1 = overrides.get("B1", model_cfg["fields"][0])
        b2 = overrides.get("B2", model_cfg["fields"][1])
        return ising_alternating(IsingConfig(size, j, (b1, b2))), (b1, b2)
    if kind == "local_field":
        theta = overrides.get("theta", model_cfg["theta"])
        return local_field_chain(size), (theta,)
    if kind == "xyz":
        return single_qubit_xyz(), model_cfg["theta"]
    if kind == "disjoint_blocks":
        return disjoint_blocks_model(model_cfg["block_sizes"]), model_cfg["theta"]
    raise ConfigError(f"unsupported model type {kind!r}")


def _eval_dense(config, size, overrides):
    beta = overrides.get("beta", config.beta)
    model, theta = _build_dense_model(config.model, size, overrides)
    n = np.asarray(config.direction_n, dtype=float)
    f = qfi_matrix(model, theta, beta)
    record = {
        "qfi_nFn": quadratic_form(f, n),
        "bound_finiteT": finite_temperature_bound(model, theta, beta, n),
        "bound_gammaHL": heisenberg_bound(model, n, beta),
        "method": "dense",
    }
    try:
        record["gap"] = energy_gap(eigendecompose(assemble(model, theta)))
    except DegenerateGroundStateError:
        record["gap"] = "NA:degenerate_ground_state"
    except FullyDegenerateSpectrumError:
        record["gap"] = "NA:fully_degenerate_spectrum"
    if config.checks.run_oracle:
        oracle = qfi_oracle_fd(model, theta, beta)
        record["oracle_resid"] = float(np.abs(f.entries - oracle.entries).max())
    else:
        record["oracle_resid"] = "NA:not_requested"
    return record


def _eval_transfer(config, size, overrides):
    beta = overrides.get("beta", config.beta)
    j = overrides.get("J", config.model["coupling"])
    b1 = overrides.get("B1", config.model["fields"][0])
    b2 = overrides.get("B2", config.model["fields"][1])
    n = np.asarray(config.direction_n, dtype=float)
    result = models_mod.transfer_qfi(IsingConfig(size, j, (b1, b2)), beta,
                                     staggered=False)
    value = float(n @ result.qfi_2x2 @ n)
    # Commuting model: beta^2 n^T Gamma n equals the ln Z Hessian form exactly.
    bound_hl = beta ** 2 * (2.0 * size * (abs(n[0]) + abs(n[1]))) ** 2 / 4.0
    return {
        "qfi_nFn": value,
        "bound_finiteT": value,
        "bound_gammaHL": bound_hl,
        "gap": "NA:transfer_path",
        "oracle_resid": ("NA:transfer_path" if config.checks.run_oracle
                         else "NA:not_requested"),
        "method": "transfer",
    }


def _eval_point(config, size, overrides):
    if config.model["type"] == "ising" and 2 * size > MAX_DENSE_QUBITS:
        return _eval_transfer(config, size, overrides)
    return _eval_dense(config, size, overrides)


def _default_sizes(config):
    if config.sizes is not None:
        return config.sizes
    if config.model["type"] == "ising":
        return (config.model["n_pairs"],)
    if config.model["type"] == "local_field":
        return (config.model["num_qubits"],)
    return (None,)


def _check_dominance(qfi_value, bound):
    if qfi_value > bound + DOMINANCE_SLACK * (1.0 + abs(bound)):
        raise ContractViolationError(
            f"bound dominance violated: qfi_nFn={qfi_value!r} exceeds "
            f"bound_finiteT={bound!r} beyond tolerance")


def _run_tasks(tasks, worker, threads):
    if threads <= 1:
        return [worker(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, tasks))


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------

def run_scan(config: ExperimentConfig, out_path: str, threads: int = 1) -> None:
    """Evaluate a one-variable scan and write the canonical CSV."""
    if config.scan is None:
        raise ConfigError("scan subcommand requires a 'scan' block in the config")
    spec = config.scan
    values = np.sort(np.linspace(spec.start, spec.stop, spec.points))
    if spec.variable == "beta" and np.any(values <= 0.0):
        raise ConfigError("beta scan values must stay positive")
    sizes = _default_sizes(config)
    tasks = [(size, float(value)) for size in sizes for value in values]

    def worker(task):
        size, value = task
        return _eval_point(config, size, {spec.variable: value})

    records = _run_tasks(tasks, worker, threads)
    for record in records:
        _check_dominance(record["qfi_nFn"], record["bound_finiteT"])

    lines = ["# thermoqfi scan", f"# model={config.model['type']}"]
    if spec.variable != "beta":
        lines.append(f"# beta={_fmt(config.beta)}")
    lines.append(f"# n={','.join(_fmt(x) for x in config.direction_n)}")
    lines.append(f"# scan_var={spec.variable}")
    lines.append(",".join(_SCAN_COLUMNS))
    for (size, value), record in zip(tasks, records):
        row = [str(size), spec.variable, _fmt(value),
               _fmt(record["qfi_nFn"]), _fmt(record["bound_finiteT"]),
               _fmt(record["bound_gammaHL"]),
               record["gap"] if isinstance(record["gap"], str) else _fmt(record["gap"]),
               (record["oracle_resid"] if isinstance(record["oracle_resid"], str)
                else _fmt(record["oracle_resid"])),
               record["method"]]
        lines.append(",".join(row))
    _write_text(out_path, "\n".join(lines) + "\n")


def run_grid(config: ExperimentConfig, out_path: str, threads: int = 1) -> None:
    """Evaluate a two-variable grid and write (var_x, var_y, qfi_nFn) rows."""
    if config.grid is None:
        raise ConfigError("grid subcommand requires a 'grid' block in the config")
    spec = config.grid
    xs = np.linspace(spec.ranges[0][0], spec.ranges[0][1], spec.points)
    ys = np.linspace(spec.ranges[1][0], spec.ranges[1][1], spec.points)
    for name, arr in ((spec.var_x, xs), (spec.var_y, ys)):
        if name == "beta" and np.any(arr <= 0.0):
            raise ConfigError("beta grid values must stay positive")
    size = config.model["n_pairs"]
    tasks = [(float(x), float(y)) for x in xs for y in ys]

    def worker(task):
        x, y = task
        record = _eval_point(config, size, {spec.var_x: x, spec.var_y: y})
        return record

    records = _run_tasks(tasks, worker, threads)
    for record in records:
        _check_dominance(record["qfi_nFn"], record["bound_finiteT"])

    swept = {spec.var_x, spec.var_y}
    lines = ["# thermoqfi grid", f"# model={config.model['type']}"]
    if "beta" not in swept:
        lines.append(f"# beta={_fmt(config.beta)}")
    if "J" not in swept:
        lines.append(f"# J={_fmt(config.model['coupling'])}")
    lines.append(f"# N={config.model['n_pairs']}")
    lines.append(f"# n={','.join(_fmt(x) for x in config.direction_n)}")
    lines.append(f"{spec.var_x},{spec.var_y},qfi_nFn")
    for (x, y), record in zip(tasks, records):
        lines.append(",".join((_fmt(x), _fmt(y), _fmt(record["qfi_nFn"]))))
    _write_text(out_path, "\n".join(lines) + "\n")


def run_report(config: ExperimentConfig, out_path: str, threads: int = 1) -> None:
    """Full single-point JSON report (dense route only)."""
    if config.mode != "point":
        raise ConfigError("report subcommand requires a single-point config "
                          "(no scan or grid block)")
    if config.model["type"] == "ising" and 2 * config.model["n_pairs"] > MAX_DENSE_QUBITS:
        raise ConfigError(
            f"report requires a dense model: 2*n_pairs="
            f"{2 * config.model['n_pairs']} qubits exceeds {MAX_DENSE_QUBITS}")
    size = _default_sizes(config)[0]
    beta = config.beta
    model, theta = _build_dense_model(config.model, size, {})
    n = np.asarray(config.direction_n, dtype=float)

    f = qfi_matrix(model, theta, beta)
    state = gibbs(eigendecompose(assemble(model, theta)), beta)
    gamma = covariance_matrix(state, model)
    report = attainability(model, theta, beta)
    oracle = qfi_oracle_fd(model, theta, beta)
    max_residual = float(np.abs(f.entries - oracle.entries).max())
    _check_dominance(quadratic_form(f, n),
                     float(beta ** 2 * (n @ gamma @ n)))

    bounds_block = {
        "finite_T": float(beta ** 2 * (n @ gamma @ n)),
        "gamma_HL": heisenberg_bound(model, n, beta),
    }
    try:
        bounds_block["zero_T_limit"] = bounds_mod.zero_temperature_limit(model, theta, n)
        bounds_block["zero_T_bound"] = bounds_mod.zero_temperature_bound(model, theta, n)
        bounds_block["gap"] = energy_gap(state.spectrum)
    except DegenerateGroundStateError:
        bounds_block.update(zero_T_limit=None, zero_T_bound=None, gap=None,
                            zero_T_reason="degenerate_ground_state")
    except FullyDegenerateSpectrumError:
        bounds_block.update(zero_T_limit=None, zero_T_bound=None, gap=None,
                            zero_T_reason="fully_degenerate_spectrum")

    document = {
        "qfi_matrix": f.entries.tolist(),
        "covariance_gamma": gamma.tolist(),
        "bounds": bounds_block,
        "attainability": {
            "weak": report.weak.tolist(),
            "strong": report.strong.tolist(),
            "conditions": {
                "h_commute": [bool(x) for x in report.cond_H_commute],
                "generator_commute": [[bool(x) for x in row]
                                      for row in report.cond_gen_commute],
            },
        },
        "oracle": {
            "fd_matrix": oracle.entries.tolist(),
            "max_residual": max_residual,
        },
    }
    _write_text(out_path, _json_text(document) + "\n")


def _json_text(obj) -> str:
    """JSON with floats at 17 significant digits and stable key order."""
    if isinstance(obj, dict):
        body = ",".join(f"{json.dumps(key)}:{_json_text(value)}"
                        for key, value in obj.items())
        return "{" + body + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_json_text(value) for value in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    return json.dumps(obj)


def _write_text(path: str, text: str) -> None:
    target = Path(path)
    if target.parent != Path(""):
        target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


# ---------------------------------------------------------------------------
# Selftest
# ---------------------------------------------------------------------------

def _selftest_checks():
    rng = np.random.default_rng(20240917)

    def random_model(num_qubits, num_params):
        from .operators import ParamHamiltonian, PauliTerm
        axes = "XYZ"

        def random_terms(count):
            terms = []
            for _ in range(count):
                sites = rng.choice(num_qubits, size=rng.integers(1, min(2, num_qubits) + 1),
                                   replace=False)
                terms.append(PauliTerm(float(rng.uniform(-1, 1)),
                                       tuple((int(s), axes[rng.integers(3)]) for s in sites)))
            return tuple(terms)

        return ParamHamiltonian(num_qubits=num_qubits,
                                fixed_terms=random_terms(2),
                                generators=tuple(random_terms(2) for _ in range(num_params)),
                                param_names=tuple(f"p{i}" for i in range(num_params)))

    def check_superops():
        from .operators import HermitianOperator
        from .thermal import SuperopKind, apply_superoperator, bogoliubov_weight, kmb_weight
        worst = 0.0
        for _ in range(5):
            model = random_model(3, 1)
            state = gibbs(eigendecompose(assemble(model, [0.3])), 1.0)
            a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
            a = HermitianOperator(0.5 * (a + a.conj().T))
            back = apply_superoperator(SuperopKind.BOGOLIUBOV, state,
                                       apply_superoperator(SuperopKind.BOGOLIUBOV_INVERSE,
                                                           state, a))
            worst = max(worst, float(np.abs(back.entries - a.entries).max()))
        pairs = rng.uniform(1e-6, 1.0, size=(2000, 2))
        dominance = all(kmb_weight(a, b) <= bogoliubov_weight(a, b) + 1e-15
                        for a, b in pairs)
        return worst <= 1e-10 and dominance, f"roundtrip {worst:.2e}"

    def check_oracle():
        worst = 0.0
        for _ in range(8):
            model = random_model(int(rng.integers(1, 4)), int(rng.integers(1, 3)))
            theta = rng.uniform(-1, 1, size=model.num_params)
            beta = float(rng.choice([0.2, 1.0, 5.0]))
            f = qfi_matrix(model, theta, beta)
            g = qfi_oracle_fd(model, theta, beta)
            scale = max(1.0, float(np.abs(f.entries).max()))
            worst = max(worst, float(np.abs(f.entries - g.entries).max()) / scale)
        return worst <= 1e-6, f"max relative residual {worst:.2e}"

    def check_dominance():
        for _ in range(40):
            model = random_model(int(rng.integers(1, 4)), int(rng.integers(1, 3)))
            theta = rng.uniform(-1, 1, size=model.num_params)
            beta = float(rng.uniform(0.1, 3.0))
            n = rng.normal(size=model.num_params)
            if not np.any(n):
                continue
            value = quadratic_form(qfi_matrix(model, theta, beta), n)
            bound = finite_temperature_bound(model, theta, beta, n)
            if value > bound + 1e-9 * (1.0 + bound):
                return False, f"violation {value} > {bound}"
        return True, "40 samples"

    def check_transfer():
        worst = 0.0
        for j, b1, b2, beta in [(1.0, 0.1, 0.2, 0.7), (2.0, -0.1, 0.3, 0.5)]:
            cfg = IsingConfig(3, j, (b1, b2))
            dense = qfi_matrix(ising_alternating(cfg), (b1, b2), beta)
            transfer = models_mod.transfer_qfi(cfg, beta)
            scale = max(1.0, float(np.abs(dense.entries).max()))
            worst = max(worst, float(np.abs(dense.entries - transfer.qfi_2x2).max()) / scale)
        return worst <= 1e-6, f"max relative deviation {worst:.2e}"

    def check_ghz():
        from .bounds import covariance_matrix as cov, ghz_spec_for_direction, ghz_state
        worst = 0.0
        for _ in range(5):
            blocks = [int(rng.integers(1, 4)) for _ in range(int(rng.integers(1, 4)))]
            n = rng.normal(size=len(blocks))
            spec = ghz_spec_for_direction(blocks, n)
            model = disjoint_blocks_model(blocks)
            gamma = cov(ghz_state(spec), model)
            expected = float(np.dot(n, spec.v) ** 2 / 4.0)
            worst = max(worst, abs(float(n @ gamma @ n) - expected))
        return worst <= 1e-12, f"max deviation {worst:.2e}"

    return [("superoperator identities", check_superops),
            ("oracle equivalence", check_oracle),
            ("bound dominance", check_dominance),
            ("transfer vs dense", check_transfer),
            ("GHZ saturation", check_ghz)]


def run_selftest() -> int:
    failures = 0
    for name, check in _selftest_checks():
        ok, detail = check()
        print(f"{'PASS' if ok else 'FAIL'}: {name} ({detail})")
        if not ok:
            failures += 1
    return EXIT_OK if failures == 0 else EXIT_CONTRACT


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="thermoqfi",
        description="Thermal-state multiparameter QFI experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("scan", True), ("grid", True),
                               ("report", True), ("selftest", False)):
        cmd = sub.add_parser(name)
        if needs_config:
            cmd.add_argument("--config", required=True, help="JSON config path")
            cmd.add_argument("--out", default=None,
                             help="output path (overrides config outputs)")
            cmd.add_argument("--threads", type=int, default=1,
                             help="worker threads for scan/grid points")
    return parser


def _resolve_out(config: ExperimentConfig, args, key: str) -> str:
    if args.out:
        return args.out
    if key in config.outputs:
        return config.outputs[key]
    raise ConfigError(f"no output path: pass --out or set outputs.{key}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return run_selftest()
        config = load_config(args.config)
        threads = max(1, args.threads)
        if args.command == "scan":
            run_scan(config, _resolve_out(config, args, "csv"), threads)
        elif args.command == "grid":
            run_grid(config, _resolve_out(config, args, "csv"), threads)
        elif args.command == "report":
            run_report(config, _resolve_out(config, args, "json"), threads)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ContractViolationError as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
