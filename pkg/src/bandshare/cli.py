"""Command-line front end.

Exit codes: 0 success, 1 validation failure or I/O error, 2 scenario parse
error, 3 invalid parameters, 4 iterative solver did not converge.
"""

from __future__ import annotations

import argparse
import json
import sys

from .exceptions import CapacityError, InvalidParameterError, ScenarioParseError
from .experiments import (
    CSV_COLUMNS, compare_schemes, evaluate, fmt, rows_to_csv, sweep, validate,
)
from .model import Scheme
from .scenario import DEFAULT_GRIDS, SWEEP_VARIABLES, SweepSpec, load_scenario
from .statespace import enumerate_states

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_NOT_CONVERGED = 4


def _schemes(text):
    return tuple(Scheme.parse(s) for s in text.split(",") if s.strip())


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario file (default: bundled default scenario)")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--solver", choices=("iterative", "exact"))
    common.add_argument("--alpha", type=float, help="iterative solver convergence threshold")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--var", required=True, choices=SWEEP_VARIABLES)
    grid.add_argument("--from", dest="start", type=float)
    grid.add_argument("--to", dest="stop", type=float)
    grid.add_argument("--step", type=float)

    parser = argparse.ArgumentParser(prog="bandshare", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="blocking probabilities for one scenario")
    p.add_argument("--scheme")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")

    p = sub.add_parser("sweep", parents=[common, grid], help="sweep one variable, CSV rows per scheme and value")
    p.add_argument("--scheme", type=_schemes, help="comma-separated schemes (default: all three)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("compare", parents=[common, grid], help="compare the three schemes over a sweep")
    p.add_argument("--format", choices=("json",), default="json")

    p = sub.add_parser("validate", parents=[common], help="analytic model against the simulator")
    p.add_argument("--scheme")
    p.add_argument("--seed", type=int)
    p.add_argument("--horizon", type=float)
    p.add_argument("--warmup", type=float)
    p.add_argument("--reps", type=int)
    p.add_argument("--format", choices=("json",), default="json")

    p = sub.add_parser("dump-states", help="list the reachable states, one 'i,j,m,n' per line")
    p.add_argument("--scenario")
    p.add_argument("--scheme")
    p.add_argument("--out")
    return parser


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=2) + "\n"


def _scenario(args):
    scenario = load_scenario(args.scenario)
    changes = {}
    for key in ("solver", "alpha", "seed", "horizon", "warmup", "reps"):
        value = getattr(args, key, None)
        if value is not None:
            changes[key] = value
    if getattr(args, "scheme", None) and isinstance(args.scheme, str):
        changes["scheme"] = args.scheme
    return scenario.replace(**changes) if changes else scenario


def _grid(args, schemes):
    start, stop, step = DEFAULT_GRIDS[args.var]
    return SweepSpec(
        args.var,
        start if args.start is None else args.start,
        stop if args.stop is None else args.stop,
        step if args.step is None else args.step,
        schemes=schemes,
    )


def _cmd_eval(args):
    res = evaluate(_scenario(args))
    data = res.to_dict()
    if args.format == "json":
        text = _json(data)
    elif args.format == "csv":
        keys = list(data)
        text = ",".join(keys) + "\n" + ",".join(fmt(data[k]) for k in keys) + "\n"
    else:
        text = "".join(f"{k:<13}{fmt(v)}\n" for k, v in data.items())
    _emit(text, args.out)
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def _cmd_sweep(args):
    scenario = _scenario(args)
    rows = sweep(scenario, _grid(args, args.scheme or tuple(Scheme)))
    if args.format == "json":
        text = _json([{k: r[k] for k in CSV_COLUMNS} for r in rows])
    else:
        text = rows_to_csv(rows)
    _emit(text, args.out)
    return EXIT_OK


def _cmd_compare(args):
    _emit(_json(compare_schemes(_scenario(args), _grid(args, tuple(Scheme)))), args.out)
    return EXIT_OK


def _cmd_validate(args):
    report = validate(_scenario(args))
    _emit(_json(report), args.out)
    return EXIT_OK if report["pass"] else EXIT_FAILED


def _cmd_dump_states(args):
    scenario = _scenario(args)
    _emit(enumerate_states(scenario.params, scenario.scheme).dump(), args.out)
    return EXIT_OK


COMMANDS = {
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "compare": _cmd_compare,
    "validate": _cmd_validate,
    "dump-states": _cmd_dump_states,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except InvalidParameterError as exc:
        print(f"bandshare: invalid parameter {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](args)
    except ScenarioParseError as exc:
        print(f"bandshare: scenario parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidParameterError, CapacityError) as exc:
        print(f"bandshare: invalid parameter {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"bandshare: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
