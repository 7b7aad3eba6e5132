"""
Project: cranectl
Module: cranectl
Created Date: 18 Oct 2026
Author: Noah Keck
:------------------------------------------------------------------------------:
MIT License
Copyright (c) 2026
:------------------------------------------------------------------------------:
"""

import argparse
import json
import logging
import os
import re
import sys
from pathlib import Path

from cranectl.core import SWEEP_AXES, compare, run, sweep, tune_pd_baseline
from cranectl.errors import *
from cranectl.fuzzy.errors import RuleTableError
from cranectl.model import ScenarioFile, scenario_from_file
from cranectl.output import LOG_FORMAT, OutputBundle

LOG_ENV = "CRANE_CTL_LOG"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_SIMULATION = 4


def configure_logging(verbosity: int = 0):
    """Sets the root log level from CRANE_CTL_LOG (default WARNING), lowered by each -v."""
    name = (os.environ.get(LOG_ENV) or "WARNING").strip().upper()
    level = logging.getLevelName(name)
    known = isinstance(level, int)
    if not known:
        level = logging.WARNING
    level = max(logging.DEBUG, level - 10 * verbosity)
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)
    if not known:
        logging.warning(f"Ignoring unknown {LOG_ENV} level '{name}'.")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory (default: ./out)")
    common.add_argument("--decimate", type=int, help="write every N-th record to records.csv")
    common.add_argument("--dt", type=float, help="integrator step size in seconds")
    common.add_argument("--t-end", dest="t_end", type=float, help="simulation horizon in seconds")
    common.add_argument("--seed", type=int, help="reserved; the simulation is deterministic")
    common.add_argument("--fuzzy", choices=("on", "off"), help="switch fuzzy gain tuning on or off")
    common.add_argument("--table", help="rule table override file (49 lines of 'row col Kp Kd Kl')")
    common.add_argument("--workers", type=int, default=1, help="parallel runs for compare and sweep")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="cranectl", description="Double-pendulum crane simulator with a fuzzy-tuned anti-sway controller.")
    verbs = parser.add_subparsers(dest="verb", required=True)
    
    cmd = verbs.add_parser("run", parents=[common], help="simulate one scenario")
    cmd.add_argument("scenario", nargs="?", help="scenario JSON path, URL or preset:NAME (default: built-in)")
    
    cmd = verbs.add_parser("compare", parents=[common], help="simulate scenarios on the same plant and tabulate their metrics")
    cmd.add_argument("scenarios", nargs="*", help="two or more scenario paths, URLs or preset:NAME tokens")
    
    cmd = verbs.add_parser("sweep", parents=[common], help="repeat a scenario over values of one parameter")
    cmd.add_argument("scenario", nargs="?", help="base scenario (default: built-in)")
    cmd.add_argument("--axis", required=True, help=f"one of {', '.join(SWEEP_AXES)}")
    cmd.add_argument("--values", required=True, help="comma separated values, e.g. 1.5,2")
    
    cmd = verbs.add_parser("print-config", parents=[common], help="echo the effective scenario as JSON")
    cmd.add_argument("scenario", nargs="?")
    
    cmd = verbs.add_parser("tune-pd", parents=[common], help="find PD baseline gains matching the scenario's settling time")
    cmd.add_argument("scenario", nargs="?")
    return parser


def load_scenario_file(location: str | None, args: argparse.Namespace) -> ScenarioFile:
    """Loads a scenario document and applies the command line overrides to it."""
    sf = scenario_from_file(location)
    if args.dt is not None:
        sf.integrator.dt = args.dt
    if args.t_end is not None:
        sf.integrator.t_end = args.t_end
    if args.decimate is not None:
        sf.output.decimate = args.decimate
    if args.fuzzy == "on":
        if sf.controller.kind == "pd_baseline":
            logging.warning("--fuzzy on has no effect on the pd_baseline controller.")
        else:
            sf.controller.kind = "fuzzy_tuned"
            sf.controller.fuzzy.enabled = True
    elif args.fuzzy == "off":
        sf.controller.fuzzy.enabled = False
    if args.table is not None:
        sf.controller.fuzzy.table_override_path = str(Path(args.table).absolute())
    if args.seed is not None:
        logging.debug(f"--seed {args.seed} ignored; runs are deterministic.")
    return sf


def _safe_name(index: int, label: str) -> str:
    return f"{index:02d}_" + (re.sub(r"[^A-Za-z0-9_.-]+", "_", label).strip("_") or "scenario")


def cmd_run(args: argparse.Namespace) -> int:
    sf = load_scenario_file(args.scenario, args)
    scenario = sf.to_scenario()
    decimate = sf.output.decimation()
    bundle = OutputBundle(args.out)
    with bundle.capture_log():
        try:
            result = run(scenario)
        except SimulationError as err:
            bundle.write_failure(err, scenario, decimate)
            raise
        bundle.write_run(result, decimate)
    m = result.metrics
    settled = f"{m.settling_time:.3f} s" if m.settled else "not settled"
    print(f"{scenario.label}: settling {settled}, peak theta1 {m.peak_theta1:.3f} deg, peak theta2 {m.peak_theta2:.3f} deg, max |u| {m.max_u:.3f} N")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    if len(args.scenarios) < 2:
        raise InsufficientArgsError(f"compare needs at least 2 scenarios, got {len(args.scenarios)}")
    files = [load_scenario_file(location, args) for location in args.scenarios]
    scenarios = [sf.to_scenario() for sf in files]
    bundle = OutputBundle(args.out)
    with bundle.capture_log():
        report = compare(scenarios, workers=args.workers)
        for i, (sf, result) in enumerate(zip(files, report.results)):
            bundle.subdir(_safe_name(i, result.scenario.label)).write_run(result, sf.output.decimation())
        bundle.write_comparison(report)
    for name, winner in report.winners.items():
        print(f"{name}: {winner or 'tie'}")
    return EXIT_OK


def parse_values(text: str) -> list[float]:
    try:
        return [float(token) for token in text.split(",") if token.strip()]
    except ValueError as err:
        raise ArgumentTypeError(f"Sweep values must be numbers: {err}") from err


def cmd_sweep(args: argparse.Namespace) -> int:
    values = parse_values(args.values)
    if not values:
        raise InsufficientArgsError("sweep needs at least one value")
    if args.axis not in SWEEP_AXES:
        raise ArgumentTypeError(f"Unknown sweep axis '{args.axis}', valid axes are {list(SWEEP_AXES)}")
    base = load_scenario_file(args.scenario, args).to_scenario()
    bundle = OutputBundle(args.out)
    with bundle.capture_log():
        rows = sweep(base, args.axis, values, workers=args.workers)
        bundle.write_sweep(rows)
    ok = sum(row.ok for row in rows)
    print(f"{ok}/{len(rows)} sweep points completed")
    return EXIT_OK if ok else EXIT_SIMULATION


def cmd_print_config(args: argparse.Namespace) -> int:
    sf = load_scenario_file(args.scenario, args)
    sf.to_scenario()
    print(json.dumps(sf.effective_dict(), indent=2))
    return EXIT_OK


def cmd_tune_pd(args: argparse.Namespace) -> int:
    scenario = load_scenario_file(args.scenario, args).to_scenario()
    tuning = tune_pd_baseline(scenario)
    print(json.dumps({
        "kp": tuning.kp_pd,
        "kd": tuning.kd_pd,
        "settling_time": tuning.settling_time,
        "target_settling_time": tuning.target_settling,
        "within_tolerance": tuning.within_tolerance,
    }, indent=2))
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "print-config": cmd_print_config,
    "tune-pd": cmd_tune_pd,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return COMMANDS[args.verb](args)
    except (InsufficientArgsError, ArgumentTypeError) as err:
        logging.error(f"{type(err).__name__}: {str(err)}")
        return EXIT_USAGE
    except (ParseError, ValidationError, RuleTableError, MismatchedScenarios) as err:
        logging.error(f"{type(err).__name__}: {str(err)}")
        return EXIT_INVALID
    except (SimulationError, SingularMass) as err:
        logging.error(f"{type(err).__name__}: {str(err)}")
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
