"""Command-line entry point.

Exit status: 0 on success, 1 on a numerical failure (or a failed check), 2 on
bad arguments or configuration.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace
from numbers import Integral

import numpy as np

from . import acceptance
from .auction import verify_equivalence
from .config import ConfigError, RunConfig, load_config
from .counterexamples import (
    cubic_coefficient,
    mixed_isoelastic,
    ratio_coefficient,
    waste_decreasing,
    waste_increasing,
)
from .equilibrium import equilibrium_cost, solve
from .errors import DomainError, RatioConditionError, SignalingError
from .ic_verify import verify_ic
from .tournament import (
    ContestSpec,
    TournamentSpec,
    compare_limits,
    simulate_tournament,
    tournament_waste,
    tullock_equilibrium,
)
from .waste import invariance_sweep, waste_profile

SUBCOMMANDS = ("solve", "waste", "sweep", "verify-ic", "tournament", "tullock",
               "compare", "auction", "counterexample", "reproduce")


def _fmt(x, precision: int) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (Integral, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.{precision}g}"


def emit_csv(rows, path=None, header=None, precision: int = 12) -> None:
    """Write ``header`` and ``rows`` as CSV with ``precision`` significant digits.

    ``path`` of None or "-" writes to stdout.
    """
    rows = [list(r) for r in rows]
    if not rows:
        raise ValueError("no rows to write")
    width = len(rows[0])
    if any(len(r) != width for r in rows) or (header is not None and len(header) != width):
        raise ValueError("rows must have uniform width")
    text = [[_fmt(x, precision) for x in r] for r in rows]
    if path in (None, "-"):
        _write(sys.stdout, header, text)
    else:
        with open(path, "w", newline="") as fh:
            _write(fh, header, text)


def _write(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    if header is not None:
        w.writerow(header)
    w.writerows(rows)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _floats(text: str):
    return [float(x) for x in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML/JSON run configuration")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)
    common.add_argument("--grid-points", type=int, help="override domain.grid_points")
    common.add_argument("--tol", type=float, help="override solver.tol")

    parser = argparse.ArgumentParser(prog="signalwaste", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}")
    sub.required = True

    sub.add_parser("solve", parents=[common], help="equilibrium action and cost on the type grid")
    sub.add_parser("waste", parents=[common], help="waste ratio on the type grid")
    p = sub.add_parser("sweep", parents=[common], help="waste over stakes x difficulty exponents")
    p.add_argument("--stakes", type=float, nargs="+", required=True)
    p.add_argument("--gamma", type=float, nargs="+", required=True)
    sub.add_parser("verify-ic", parents=[common], help="brute-force incentive-compatibility check")

    p = sub.add_parser("tournament", parents=[common], help="Monte Carlo signaling tournament")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("tullock", parents=[common], help="symmetric Tullock contest equilibrium")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)

    p = sub.add_parser("compare", parents=[common], help="signaling waste vs contest dissipation")
    p.add_argument("--n-list", type=int, nargs="+", required=True)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)

    p = sub.add_parser("auction", parents=[common], help="all-pay auction bids vs signaling")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("counterexample", parents=[common], help="stake-dependent constant waste")
    p.add_argument("--family", choices=("quadcubic", "ratio", "mixed"), required=True)
    p.add_argument("--s", type=float, nargs="+", required=True)
    p.add_argument("--weights", type=_floats)
    p.add_argument("--gammas", type=_floats)
    p.add_argument("--sigmas", type=_floats)
    p.add_argument("--beta", type=float, default=1.0)

    sub.add_parser("reproduce", parents=[common], help="run every acceptance check")
    return parser


def _run_config(args) -> RunConfig:
    if not args.config:
        raise ConfigError(f"{args.command} needs --config")
    cfg = load_config(args.config)
    if args.grid_points is not None:
        if args.grid_points < 64:
            raise ConfigError("--grid-points must be >= 64")
        cfg.domain = replace(cfg.domain, grid_points=args.grid_points)
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError("--tol must be positive")
        cfg.tol = args.tol
    if args.out:
        cfg.output_path = args.out
    return cfg


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    cfg = _run_config(args)
    strategy = solve(cfg.environment, cfg.domain, cfg.method, cfg.tol)
    cost = equilibrium_cost(cfg.environment, strategy).values
    emit_csv(zip(strategy.theta, strategy.actions, cost), cfg.output_path,
             ["theta", "action", "cost"], cfg.precision)
    return 0


def cmd_waste(args) -> int:
    cfg = _run_config(args)
    strategy = solve(cfg.environment, cfg.domain, cfg.method, cfg.tol)
    prof = waste_profile(cfg.environment, strategy)
    emit_csv(zip(prof.theta, prof.values), cfg.output_path, ["theta", "W"], cfg.precision)
    return 0


def cmd_sweep(args) -> int:
    cfg = _run_config(args)
    rep = invariance_sweep(cfg.environment, args.stakes, args.gamma, cfg.domain)
    rows = []
    for i, s in enumerate(rep.stakes):
        for j, g in enumerate(rep.gammas):
            for t, w, a, c in zip(rep.theta, rep.waste[i, j], rep.actions[i, j], rep.costs[i, j]):
                rows.append((s, g, t, w, a, c))
    emit_csv(rows, cfg.output_path, ["s", "gamma", "theta", "W", "action", "cost"], cfg.precision)
    return 0


def cmd_verify_ic(args) -> int:
    cfg = _run_config(args)
    strategy = solve(cfg.environment, cfg.domain, cfg.method, cfg.tol)
    rep = verify_ic(cfg.environment, strategy)
    if rep.passed:
        print(f"IC passed: max gain {rep.max_gain:.3e} <= {rep.tolerance:.3e}")
        return 0
    emit_csv([rep.witness], None, ["theta", "theta_hat", "gain"], cfg.precision)
    return 1


def cmd_tournament(args) -> int:
    spec = TournamentSpec(args.s, args.n, args.k, args.sigma)
    rep = simulate_tournament(spec, args.trials, args.seed, args.workers)
    header = ["n", "k", "sigma", "s", "trials", "seed", "mean_cost", "mean_benefit",
              "ratio", "ratio_se", "closed_form"]
    row = [spec.n, spec.k, spec.sigma, spec.prize, rep.trials, rep.seed, rep.mean_cost,
           rep.mean_benefit, rep.ratio, rep.ratio_se if rep.se_defined else "nan",
           tournament_waste(spec.n, spec.k, spec.sigma)]
    emit_csv([row], args.out, header)
    return 0


def cmd_tullock(args) -> int:
    effort, diss = tullock_equilibrium(ContestSpec(args.s, args.n, args.r, args.gamma))
    emit_csv([(args.n, args.r, args.gamma, args.s, effort, diss)], args.out,
             ["n", "r", "gamma", "s", "effort", "dissipation"])
    return 0


def cmd_compare(args) -> int:
    table = compare_limits(args.k, args.sigma, args.r, args.gamma, args.n_list)
    emit_csv(table.rows(), args.out, ["n", "signaling_waste", "contest_dissipation"])
    return 0


def cmd_auction(args) -> int:
    v = None
    if args.grid_points is not None:
        v = np.geomspace(1e-3, 1.0, args.grid_points)
    rep = verify_equivalence(args.beta, args.sigma, args.gamma, args.n, v)
    emit_csv(zip(rep.v, rep.bid_closed_form, rep.bid_from_signaling, rep.discrepancy), args.out,
             ["v", "bid_closed_form", "bid_from_signaling", "discrepancy"])
    return 0


def cmd_counterexample(args) -> int:
    rows = []
    if args.family == "mixed":
        if not (args.weights and args.gammas and args.sigmas):
            raise ConfigError("mixed family needs --weights, --gammas and --sigmas")
        for s in args.s:
            res = mixed_isoelastic(args.weights, args.gammas, args.sigmas, args.beta, s)
            rows.append((s, res.c, res.waste))
    else:
        coeff, waste = ((cubic_coefficient, waste_decreasing) if args.family == "quadcubic"
                        else (ratio_coefficient, waste_increasing))
        rows = [(s, coeff(s).c, waste(s)) for s in args.s]
    emit_csv(rows, args.out, ["s", "c", "waste"])
    return 0


def cmd_reproduce(args) -> int:
    results = acceptance.run_all(args.seed)
    print(acceptance.format_table(results))
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "solve": cmd_solve,
    "waste": cmd_waste,
    "sweep": cmd_sweep,
    "verify-ic": cmd_verify_ic,
    "tournament": cmd_tournament,
    "tullock": cmd_tullock,
    "compare": cmd_compare,
    "auction": cmd_auction,
    "counterexample": cmd_counterexample,
    "reproduce": cmd_reproduce,
}


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError, RatioConditionError) as exc:
        print(f"signalwaste {args.command}: {exc}", file=sys.stderr)
        return 2
    except (SignalingError, FloatingPointError) as exc:
        print(f"signalwaste {args.command}: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except OSError as exc:
        print(f"signalwaste {args.command}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
