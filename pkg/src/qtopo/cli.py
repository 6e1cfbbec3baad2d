"""Command-line entry point for batteries and comparisons."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .harness import (
    ExperimentError,
    ScenarioNotFoundError,
    ScenarioParseError,
    ScenarioSchemaError,
    ScenarioSemanticError,
    compare,
    emit_csv,
    emit_report,
    emit_svg,
    load_scenario,
    run_experiment,
)

_EMITS = ("csv", "svg", "report")

_EXIT_CODES = (
    (ScenarioNotFoundError, 3),
    (ScenarioParseError, 4),
    (ScenarioSchemaError, 5),
    (ScenarioSemanticError, 6),
    (ExperimentError, 7),
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtopo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--seeds", default="31",
                       help="seed count (N runs seeds 1..N) or comma-separated list")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--emit", default="csv,svg,report",
                       help="comma-separated subset of csv,svg,report")
        p.add_argument("--jobs", type=int, default=1, help="parallel runs (threads)")

    p_run = sub.add_parser("run", help="run one algorithm's battery")
    p_run.add_argument("--algo", choices=("qga", "qiga2"), default="qiga2")
    common(p_run)

    p_cmp = sub.add_parser("compare", help="run both algorithms and compare")
    common(p_cmp)
    return parser


def parse_seeds(text: str):
    try:
        if "," in text:
            seeds = [int(tok) for tok in text.split(",") if tok.strip()]
        else:
            count = int(text)
            if count < 1:
                raise ValueError
            seeds = list(range(1, count + 1))
    except ValueError:
        raise ValueError(f"--seeds must be a positive count or comma-separated integers, got {text!r}")
    if len(set(seeds)) != len(seeds):
        raise ValueError("--seeds entries must be distinct")
    if any(s < 0 for s in seeds):
        raise ValueError("--seeds entries must be nonnegative")
    return seeds


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except tuple(cls for cls, _ in _EXIT_CODES) as exc:
        for cls, code in _EXIT_CODES:
            if isinstance(exc, cls):
                print(f"error: {exc}", file=sys.stderr)
                return code
        raise AssertionError("unreachable")


def _dispatch(args) -> int:
    emits = [e.strip() for e in args.emit.split(",") if e.strip()]
    unknown = set(emits) - set(_EMITS)
    if unknown:
        raise ValueError(f"unknown --emit values: {sorted(unknown)}")
    seeds = parse_seeds(args.seeds)
    scenario, config = load_scenario(args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.command == "run":
        batteries = {args.algo: run_experiment(
            scenario, replace(config, algorithm=args.algo), seeds, jobs=args.jobs)}
        summary = None
    else:
        batteries = {
            algo: run_experiment(scenario, replace(config, algorithm=algo), seeds, jobs=args.jobs)
            for algo in ("qga", "qiga2")
        }
        summary = compare(batteries["qga"], batteries["qiga2"])

    for algo, results in batteries.items():
        if "csv" in emits:
            emit_csv(results, out / f"{algo}.csv")
        if "svg" in emits:
            emit_svg(scenario, results[0], out / f"{algo}.svg")
    if "report" in emits:
        all_results = [r for algo in sorted(batteries) for r in batteries[algo]]
        emit_report(summary, all_results, out / "report.json", scenario=scenario, config=config)

    for algo in sorted(batteries):
        found = sum(1 for r in batteries[algo] if r.first_feasible_generation is not None)
        print(f"{algo}: {len(batteries[algo])} runs, {found} reached feasibility")
    if summary is not None:
        for col, flag in summary.directions.items():
            qga = summary.aggregates["qga"][col]["median"]
            qiga2 = summary.aggregates["qiga2"][col]["median"]
            print(f"{col}: qga median {qga} vs qiga2 median {qiga2} -> {flag}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
