"""Command-line front end: ``worldsheets <command> --config <path> ...``.

Commands map one-to-one onto the scenario runners; see ``scenarios``.
Exit codes follow the CI-gating contract: 0 success, 2 tolerance
violation, 1 input error.
"""

import argparse
import sys

from .config import ScenarioConfig, load_config
from .errors import ConvergenceError, WorldsheetError
from .scenarios import COMMANDS, run_scenario

__all__ = ["main", "build_parser"]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="worldsheets",
        description="extremal worldsheet geometry, invariants, and "
                    "phase-space reports")
    sub = parser.add_subparsers(dest="command", metavar="command")
    descriptions = {
        "geometry": "curvature and area report for one scenario",
        "invariants": "Euler characteristic / twist class report",
        "solve": "extremality residuals or relaxation convergence table",
        "symplectic": "per-slice two-form table for a solution family",
        "verify": "run every identity check and emit a summary table",
    }
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=descriptions[name])
        cmd.add_argument("--config", metavar="PATH",
                         help="scenario configuration file")
        cmd.add_argument("--grid", type=int, metavar="N",
                         help="override the grid size")
        cmd.add_argument("--out", metavar="DIR",
                         help="override the report directory")
        cmd.add_argument("--seed", type=int, metavar="S",
                         help="override the random seed")
    return parser


def _resolve_config(args):
    if args.config is not None:
        config = load_config(args.config)
    else:
        config = ScenarioConfig()
    overrides = {}
    if args.grid is not None:
        overrides["grid"] = args.grid
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        config = config.override(**overrides)
    return config


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 1
    try:
        config = _resolve_config(args)
        if args.command != "verify" and not config.scenario:
            print("error: no scenario selected; pass --config with a "
                  "'scenario = <name>' entry", file=sys.stderr)
            return 1
        return run_scenario(config, args.command)
    except ConvergenceError as exc:
        print("tolerance failure: %s" % exc, file=sys.stderr)
        return 2
    except WorldsheetError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
