"""
Command-line front end.

Every run prints one JSON RunRecord on stdout. Exit codes: 0 success,
2 usage error, 3 domain error, 4 numerical failure (or a failed selfcheck).
"""

import argparse
import csv
import json
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__, optimizer, selfcheck
from .exceptions import DEGENERATE_GRID, DomainError, NumericalError
from .models import CostParams, RunRecord, SimConfig, to_plain
from .planner import SupplyPlanner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4

# Argument destinations that steer the run but are not part of its parameters.
_CONTROL = {"command", "config", "out", "verbose"}

Rows = List[Dict[str, Any]]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting on bad usage."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sigma", type=float, default=1.0, help="demand volatility per period")
    common.add_argument("--mu", type=float, default=0.0, help="mean demand per period")
    common.add_argument("--n", type=int, default=100, help="horizon N in periods")
    common.add_argument("--seed", type=int, default=0, help="64-bit Monte Carlo seed")
    common.add_argument("--paths", type=int, default=10_000, help="Monte Carlo paths")
    common.add_argument("--steps", type=int, default=1_000, help="time steps for continuous functionals")
    common.add_argument("--antithetic", action="store_true", help="pair every path with its mirror")
    common.add_argument("--out", help="also write tabular rows to this CSV file")
    common.add_argument("--config", help="JSON file whose keys mirror the flags; flags win")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    return common


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    """Return the top-level parser and its subparsers by command name."""
    common = _common()
    parser = _Parser(prog="driftwalk", description="Lost sales under power-curve supply plans.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub = {}

    def add(name: str, help_text: str, epilog: str) -> argparse.ArgumentParser:
        sub[name] = commands.add_parser(name, parents=[common], help=help_text, epilog=epilog)
        return sub[name]

    p = add("bounds", "bound envelope of E[L_N]", "CSV columns: lower, upper, regime, growth_order")
    p.add_argument("--alpha", type=float)
    p.add_argument("--kappa", type=float)

    p = add("spitzer", "E[L_N] for linear drift", "CSV columns: kappa, value, exact")
    p.add_argument("--kappa", type=float)
    p.add_argument("--exact", action="store_true", help="exact sum instead of the closed integral form")

    p = add("simulate", "Monte Carlo estimate of E[L_N]", "CSV columns: mean, stderr, paths, seed")
    p.add_argument("--alpha", type=float)
    p.add_argument("--kappa", type=float)

    p = add("rho", "rho(kappa) of the Brownian limit", "CSV columns: kappa, mean, stderr")
    p.add_argument("--kappa", type=float, nargs="+")

    p = add("hitting", "hitting-time estimate of E[L_N] at alpha = 1/2",
            "CSV columns: mean, stderr, uncertainty")
    p.add_argument("--kappa", type=float)
    p.add_argument("--nodes", type=int, help="uniform x-grid size (with --x-max)")
    p.add_argument("--x-max", type=float, help="upper end of the x grid")

    p = add("optimize", "choose kappa for alpha = 1/2", "CSV columns: kappa, objective, method, stderr")
    p.add_argument("--c", type=float)
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--h-prime", type=float, default=0.0)
    p.add_argument("--holding", action="store_true", help="fold h into c and p first")
    p.add_argument("--method", default="lower",
                   choices=["lower", "upper", "upper-unconstrained", "brownian", "backorder"])

    p = add("equivalence", "lost-sales/backorder value ratio", "CSV columns: p, kappa, lost_sales, backorder, ratio")
    p.add_argument("--c", type=float)
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--p", type=float, nargs="+")

    add("selfcheck", "run the invariant suite", "CSV columns: name, passed, detail")
    return parser, sub


def _load_config(path: str, subparser: argparse.ArgumentParser) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, ValueError) as e:
        raise _UsageError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise _UsageError(f"config {path} must hold a JSON object")
    known = {action.dest for action in subparser._actions} - _CONTROL - {"help"}
    values = {str(key).replace("-", "_"): value for key, value in data.items()}
    unknown = sorted(set(values) - known)
    if unknown:
        raise _UsageError(f"unknown config keys for {subparser.prog}: {', '.join(unknown)}")
    return values


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [name for name in names if getattr(args, name, None) is None]
    if missing:
        raise _UsageError(f"{args.command}: missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _planner(args: argparse.Namespace) -> SupplyPlanner:
    sim = SimConfig(paths=args.paths, seed=args.seed, steps=args.steps, antithetic=args.antithetic)
    return SupplyPlanner(sigma=args.sigma, mu=args.mu, horizon=args.n, sim=sim)


def _bounds(args, planner) -> Tuple[Any, Rows]:
    _require(args, "alpha", "kappa")
    est = planner.bounds(args.alpha, args.kappa)
    result = est.to_dict()
    return result, [{k: result[k] for k in ("lower", "upper", "regime", "growth_order")}]


def _spitzer(args, planner) -> Tuple[Any, Rows]:
    _require(args, "kappa")
    value = planner.spitzer(args.kappa, exact=args.exact)
    result = {"kappa": args.kappa, "value": value, "exact": args.exact}
    return result, [result]


def _simulate(args, planner) -> Tuple[Any, Rows]:
    _require(args, "alpha", "kappa")
    result = planner.simulate(args.alpha, args.kappa).to_dict()
    return result, [{k: result[k] for k in ("mean", "stderr", "paths", "seed")}]


def _rho(args, planner) -> Tuple[Any, Rows]:
    _require(args, "kappa")
    estimates = planner.rho(args.kappa)
    rows = [{"kappa": k, "mean": e.mean, "stderr": e.stderr} for k, e in zip(args.kappa, estimates)]
    return [e.to_dict() for e in estimates], rows


def _hitting(args, planner) -> Tuple[Any, Rows]:
    _require(args, "kappa")
    grid = None
    if args.nodes is not None or args.x_max is not None:
        _require(args, "nodes", "x_max")
        if args.nodes < 2:
            raise DomainError(f"--nodes must be at least 2, got {args.nodes}", code=DEGENERATE_GRID)
        grid = np.linspace(0.0, args.x_max, args.nodes)
    result = planner.hitting(args.kappa, x_grid=grid).to_dict()
    return result, [{k: result[k] for k in ("mean", "stderr", "uncertainty")}]


def _optimize(args, planner) -> Tuple[Any, Rows]:
    _require(args, "c")
    costs = CostParams(c=args.c, p=args.p, h=args.h, b=args.b, h_prime=args.h_prime)
    solution = planner.optimize(costs, method=args.method, holding=args.holding)
    result = solution.to_dict()
    merged = optimizer.apply_holding(costs) if args.holding else costs
    if args.method in ("lower", "upper") and 0 < merged.c < merged.p:
        result["ratio_report"] = planner.ratio(merged).to_dict()
    row = {k: result[k] for k in ("kappa", "objective", "method", "stderr")}
    return result, [row]


def _equivalence(args, planner) -> Tuple[Any, Rows]:
    _require(args, "c", "p")
    rows = planner.equivalence_table(args.c, args.h, args.p)
    return [{"p": row["p"], "ratio": row["ratio"]} for row in rows], rows


def _selfcheck(args, planner) -> Tuple[Any, Rows]:
    results = selfcheck.run_checks()
    return results, results


HANDLERS: Dict[str, Callable[[argparse.Namespace, SupplyPlanner], Tuple[Any, Rows]]] = {
    "bounds": _bounds,
    "spitzer": _spitzer,
    "simulate": _simulate,
    "rho": _rho,
    "hitting": _hitting,
    "optimize": _optimize,
    "equivalence": _equivalence,
    "selfcheck": _selfcheck,
}


def _parse(argv: Sequence[str]) -> argparse.Namespace:
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        raise _UsageError("driftwalk: error: a command is required")
    if args.config:
        subparser = sub[args.command]
        subparser.set_defaults(**_load_config(args.config, subparser))
        args = parser.parse_args(argv)
    return args


def _write_csv(path: str, rows: Rows) -> None:
    if not rows:
        return
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: to_plain(v) for k, v in row.items()})


def dispatch(argv: Sequence[str]) -> Tuple[int, Optional[RunRecord]]:
    """
    Run one command.

    Returns:
        (exit code, RunRecord or None). Nothing is printed on stdout
        unless the run completes.
    """
    try:
        args = _parse(list(argv))
    except _UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE, None
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0), None

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    params = {k: v for k, v in vars(args).items() if k not in _CONTROL}
    started = time.perf_counter()
    try:
        planner = _planner(args)
        result, rows = HANDLERS[args.command](args, planner)
    except _UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE, None
    except DomainError as e:
        print(f"driftwalk: domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN, None
    except NumericalError as e:
        print(f"driftwalk: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL, None

    record = RunRecord(
        command=args.command,
        params=params,
        result=to_plain(result),
        seed=args.seed,
        version=__version__,
        wall_time=time.perf_counter() - started,
    )
    if args.out:
        _write_csv(args.out, rows)
    print(json.dumps(record.to_dict()))
    if args.command == "selfcheck" and not all(r["passed"] for r in result):
        return EXIT_NUMERICAL, record
    return EXIT_OK, record


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point."""
    code, _ = dispatch(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
