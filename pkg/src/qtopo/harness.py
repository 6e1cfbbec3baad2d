"""Scenario files, seeded experiment batteries, comparisons, artifacts.

Scenario files are strict JSON (unknown fields are rejected) describing
the deployment geometry and the engine parameters.  Batteries run one
deterministic engine run per seed; the comparison aggregates the two
algorithms' batteries by median and emits byte-reproducible CSV, SVG and
JSON artifacts.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .engine import EngineConfig, Feasibility, RunResult, run
from .lqr import AdjustmentMode
from .wsn import Node, Scenario, assign_radii, build_adjacency, scenario_fingerprint

SCENARIO_SCHEMA = "qtopo-scenario/1"
REPORT_SCHEMA = "qtopo-report/1"

COMPARISON_COLUMNS = (
    "first_feasible_generation",
    "best_found_generation",
    "final_total_power",
    "final_violations",
)


class ScenarioError(Exception):
    """Base class for scenario-file problems."""


class ScenarioNotFoundError(ScenarioError):
    pass


class ScenarioParseError(ScenarioError):
    pass


class ScenarioSchemaError(ScenarioError):
    pass


class ScenarioSemanticError(ScenarioError):
    pass


class ExperimentError(RuntimeError):
    """A battery run failed; the message names the offending seed."""


@dataclass(frozen=True)
class ComparisonSummary:
    """Median/IQR aggregates per algorithm plus per-column win flags."""

    scenario_fingerprint: str
    runs_per_algorithm: dict
    aggregates: dict
    directions: dict

    def to_dict(self) -> dict:
        return {
            "scenario_fingerprint": self.scenario_fingerprint,
            "runs_per_algorithm": self.runs_per_algorithm,
            "aggregates": self.aggregates,
            "directions": self.directions,
        }


def benchmark_scenario_path() -> Path:
    """Path of the checked-in 16-node benchmark scenario."""
    return Path(resources.files("qtopo") / "scenarios" / "benchmark16.json")


def load_scenario(path) -> tuple:
    """Read and validate a scenario file into (Scenario, EngineConfig).

    The returned config carries the file's engine parameters with
    placeholder algorithm "qiga2" and seed 0; batteries override both.
    """
    path = Path(path)
    if not path.exists():
        raise ScenarioNotFoundError(f"scenario file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}: invalid JSON ({exc})") from exc
    return scenario_from_dict(raw)


def scenario_from_dict(raw: dict) -> tuple:
    """Validate an already-parsed scenario document."""
    _require_keys(raw, "scenario", required={"schema", "area", "r_max", "r_t", "dist_conn", "engine"},
                  optional={"nodes", "placement", "path_loss_exponent"})
    if raw.get("schema") != SCENARIO_SCHEMA:
        raise ScenarioSchemaError(f"unsupported schema {raw.get('schema')!r}, expected {SCENARIO_SCHEMA!r}")
    area = _check_pair(raw["area"], "area")
    if ("nodes" in raw) == ("placement" in raw):
        raise ScenarioSchemaError("exactly one of 'nodes' or 'placement' is required")

    if "nodes" in raw:
        coords = raw["nodes"]
        if not isinstance(coords, list) or not coords:
            raise ScenarioSchemaError("'nodes' must be a nonempty list of [x, y] pairs")
        positions = [_check_pair(c, "node") for c in coords]
    else:
        placement = raw["placement"]
        _require_keys(placement, "placement", required={"count", "seed"}, optional=set())
        count, seed = placement["count"], placement["seed"]
        if not isinstance(count, int) or count < 2:
            raise ScenarioSchemaError("placement.count must be an integer >= 2")
        if not isinstance(seed, int) or seed < 0:
            raise ScenarioSchemaError("placement.seed must be a nonnegative integer")
        u = rngmod.stream(seed, rngmod.LANE_PLACEMENT).random((count, 2))
        positions = [(float(x * area[0]), float(y * area[1])) for x, y in u]

    eng = raw["engine"]
    _require_keys(eng, "engine",
                  required={"generations_max", "delta", "feasibility"},
                  optional={"theta", "mode", "observations_per_generation", "fitness_weights"})
    feas = eng["feasibility"]
    _require_keys(feas, "feasibility", required={"min_connectivity_ratio", "max_violations"}, optional=set())

    mode_name = eng.get("mode", "unidirectional")
    try:
        mode = AdjustmentMode(mode_name)
    except ValueError:
        raise ScenarioSchemaError(f"engine.mode must be 'unidirectional' or 'bidirectional', got {mode_name!r}")

    try:
        scenario = Scenario(
            nodes=tuple(Node(x, y) for x, y in positions),
            r_max=_check_number(raw["r_max"], "r_max"),
            r_t=_check_number(raw["r_t"], "r_t"),
            area=area,
            dist_conn=_check_number(raw["dist_conn"], "dist_conn"),
            path_loss_exponent=_check_number(raw.get("path_loss_exponent", 2.0), "path_loss_exponent"),
        )
        config = EngineConfig(
            algorithm="qiga2",
            generations_max=int(eng["generations_max"]),
            seed=0,
            delta=_check_number(eng["delta"], "engine.delta"),
            feasibility=Feasibility(
                min_connectivity_ratio=_check_number(feas["min_connectivity_ratio"],
                                                     "feasibility.min_connectivity_ratio"),
                max_violations=int(feas["max_violations"]),
            ),
            theta=_check_number(eng.get("theta", EngineConfig.theta), "engine.theta"),
            mode=mode,
            fitness_weights=tuple(eng.get("fitness_weights", EngineConfig.fitness_weights)),
            observations_per_generation=int(eng.get("observations_per_generation", 10)),
        )
    except ScenarioError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioSemanticError(f"invalid scenario values: {exc}") from exc
    return scenario, config


def save_scenario(scenario: Scenario, config: EngineConfig, path) -> None:
    """Write a scenario back out in explicit-coordinates form."""
    doc = {
        "schema": SCENARIO_SCHEMA,
        "area": list(scenario.area),
        "nodes": [[node.x, node.y] for node in scenario.nodes],
        "r_max": scenario.r_max,
        "r_t": scenario.r_t,
        "dist_conn": scenario.dist_conn,
        "path_loss_exponent": scenario.path_loss_exponent,
        "engine": {
            "generations_max": config.generations_max,
            "theta": config.theta,
            "delta": config.delta,
            "mode": config.mode.value,
            "observations_per_generation": config.observations_per_generation,
            "fitness_weights": list(config.fitness_weights),
            "feasibility": asdict(config.feasibility),
        },
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def run_experiment(scenario: Scenario, config: EngineConfig, seeds, jobs: int = 1):
    """One deterministic run per seed, returned in sorted seed order.

    With jobs > 1 the runs execute on a thread pool; results are identical
    to sequential execution because each run owns its random streams.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("seeds must be nonempty")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")

    def one(seed: int) -> RunResult:
        try:
            return run(scenario, replace(config, seed=seed))
        except Exception as exc:
            raise ExperimentError(f"run failed for seed {seed}: {exc}") from exc

    ordered = sorted(seeds)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, ordered))
    return [one(seed) for seed in ordered]


def compare(results_qga, results_qiga2) -> ComparisonSummary:
    """Aggregate two batteries and flag which algorithm's median wins.

    Lower medians win for every column.  Runs that never reached
    feasibility contribute their generation count (a censored value) to
    the first-feasible column.
    """
    if not results_qga or not results_qiga2:
        raise ValueError("both result lists must be nonempty")
    fingerprints = {r.scenario_fingerprint for r in results_qga + results_qiga2}
    if len(fingerprints) != 1:
        raise ValueError(f"results come from different scenarios: {sorted(fingerprints)}")

    aggregates = {}
    for name, results in (("qga", results_qga), ("qiga2", results_qiga2)):
        rows = [result_row(r) for r in results]
        aggregates[name] = {
            col: _median_iqr([row[col] for row in rows]) for col in COMPARISON_COLUMNS
        }
    directions = {}
    for col in COMPARISON_COLUMNS:
        a, b = aggregates["qiga2"][col]["median"], aggregates["qga"][col]["median"]
        directions[col] = "qiga2" if a < b else ("qga" if b < a else "tie")
    return ComparisonSummary(
        scenario_fingerprint=next(iter(fingerprints)),
        runs_per_algorithm={"qga": len(results_qga), "qiga2": len(results_qiga2)},
        aggregates=aggregates,
        directions=directions,
    )


def result_row(result: RunResult) -> dict:
    """Flat per-run summary used by reports and aggregation."""
    generations = len(result.history)
    last = result.history[-1] if result.history else None
    ffg = result.first_feasible_generation
    return {
        "algorithm": result.algorithm,
        "seed": result.seed,
        "generations": generations,
        "first_feasible_generation": generations if ffg is None else ffg,
        "found_feasible": ffg is not None,
        "best_found_generation": result.best.found_at_generation if result.best else None,
        "best_fitness": result.best.best_fitness if result.best else None,
        "final_total_power": last.total_power if last else None,
        "final_violations": last.violations if last else None,
        "final_connectivity_ratio": last.connectivity_ratio if last else None,
    }


def emit_csv(results, path) -> None:
    """Per-generation convergence rows for every run, one CSV file."""
    lines = ["seed,generation,best_fitness,total_power,violations,connectivity_ratio,feasible"]
    for result in results:
        for rec in result.history:
            lines.append(
                f"{result.seed},{rec.generation},{rec.best_fitness!r},{rec.total_power!r},"
                f"{rec.violations},{rec.connectivity_ratio!r},{int(rec.feasible)}"
            )
    _write_text(path, "\n".join(lines) + "\n")


def emit_svg(scenario: Scenario, result: RunResult, path) -> None:
    """Topology snapshot: dots for nodes (hollow when asleep), dashed
    transmit-radius circles, and line segments for realized links."""
    positions = result.final_positions
    if result.best is not None:
        act = np.asarray(result.best.best_bits)
    else:
        act = np.zeros(scenario.n, dtype=np.int64)
    radii = assign_radii(scenario, act, positions)
    adj = build_adjacency(scenario, act, radii, positions)

    margin, box = 20.0, 560.0
    w, h = scenario.area
    scale = box / max(w, h)

    def sx(x):
        return margin + x * scale

    def sy(y):
        return margin + (h - y) * scale

    view_w, view_h = 2 * margin + w * scale, 2 * margin + h * scale
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{view_w:.1f}" height="{view_h:.1f}" '
        f'viewBox="0 0 {view_w:.1f} {view_h:.1f}">',
        f'<rect x="{margin:.1f}" y="{margin:.1f}" width="{w * scale:.1f}" height="{h * scale:.1f}" '
        f'fill="none" stroke="#888888" stroke-width="1"/>',
    ]
    for i, j in zip(*np.nonzero(np.triu(adj, 1))):
        parts.append(
            f'<line x1="{sx(positions[i, 0]):.2f}" y1="{sy(positions[i, 1]):.2f}" '
            f'x2="{sx(positions[j, 0]):.2f}" y2="{sy(positions[j, 1]):.2f}" '
            f'stroke="#1f77b4" stroke-width="1.5"/>'
        )
    for i in np.flatnonzero(act):
        parts.append(
            f'<circle cx="{sx(positions[i, 0]):.2f}" cy="{sy(positions[i, 1]):.2f}" '
            f'r="{radii[i] * scale:.2f}" fill="none" stroke="#999999" '
            f'stroke-width="0.8" stroke-dasharray="4 3"/>'
        )
    for i in range(scenario.n):
        style = 'fill="#222222"' if act[i] == 1 else 'fill="#ffffff" stroke="#222222"'
        parts.append(
            f'<circle cx="{sx(positions[i, 0]):.2f}" cy="{sy(positions[i, 1]):.2f}" r="4" {style}/>'
        )
    parts.append("</svg>")
    _write_text(path, "\n".join(parts) + "\n")


def emit_report(summary, results, path, scenario=None, config=None) -> None:
    """Structured JSON report: config echo, per-seed rows, comparison."""
    doc = {
        "schema": REPORT_SCHEMA,
        "results": [result_row(r) for r in results],
        "comparison": summary.to_dict() if summary is not None else None,
    }
    if scenario is not None:
        doc["scenario"] = {
            "fingerprint": scenario_fingerprint(scenario),
            "node_count": scenario.n,
            "area": list(scenario.area),
            "r_max": scenario.r_max,
            "r_t": scenario.r_t,
            "dist_conn": scenario.dist_conn,
            "path_loss_exponent": scenario.path_loss_exponent,
        }
    if config is not None:
        doc["engine_config"] = {
            "generations_max": config.generations_max,
            "theta": config.theta,
            "delta": config.delta,
            "mode": config.mode.value,
            "observations_per_generation": config.observations_per_generation,
            "fitness_weights": list(config.fitness_weights),
            "feasibility": asdict(config.feasibility),
        }
    _write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _median_iqr(values) -> dict:
    """Lower-convention median and quartiles (even counts take the lower
    middle element), so aggregates are exact data values."""
    vals = sorted(values)
    m = len(vals)
    return {
        "median": vals[(m - 1) // 2],
        "q1": vals[(m - 1) // 4],
        "q3": vals[(3 * (m - 1)) // 4],
    }


def _require_keys(obj, label, required, optional):
    if not isinstance(obj, dict):
        raise ScenarioSchemaError(f"'{label}' must be an object")
    missing = required - obj.keys()
    if missing:
        raise ScenarioSchemaError(f"'{label}' is missing required fields: {sorted(missing)}")
    unknown = obj.keys() - required - optional
    if unknown:
        raise ScenarioSchemaError(f"'{label}' has unknown fields: {sorted(unknown)}")


def _check_number(value, label) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioSchemaError(f"'{label}' must be a number, got {value!r}")
    return float(value)


def _check_pair(value, label) -> tuple:
    if not isinstance(value, list) or len(value) != 2:
        raise ScenarioSchemaError(f"'{label}' must be a [x, y] pair, got {value!r}")
    return (_check_number(value[0], label), _check_number(value[1], label))


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ExperimentError(f"could not write {path}: {exc}") from exc
