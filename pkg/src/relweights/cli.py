"""Command-line entry point: ``relweights optimize|table|simulate``."""

from __future__ import annotations

import argparse
import logging
import sys

from .harness import (
    ConfigError,
    MethodSpec,
    TABLE_METHODS,
    build_weights,
    convergence_table,
    load_config,
    resolve_method,
    resolve_network,
    simulate,
    write_table,
)
from .optimizer import SolveOptions
from .weights import save_weights

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2


def _solve_options(args):
    return SolveOptions(
        max_iters=args.max_iters,
        tol=args.tol,
        seed=args.seed or 0,
        record_trace=bool(getattr(args, "trace", None)),
        refine=not args.no_refine,
    )


def _fmt_tau(tau):
    return "nonconvergent" if tau is None else f"{tau:.6g}"


def cmd_optimize(args):
    g = resolve_network(args.graph or args.network)
    g.require_connected()
    spec = MethodSpec(resolve_method(args.method), args.kappa)
    w, result = build_weights(g, spec, _solve_options(args))
    print(f"method={w.method} rho={w.rho:.6g} tau={_fmt_tau(w.tau)}")
    if args.out:
        save_weights(w, args.out)
    if args.trace and result is not None:
        with open(args.trace, "w", newline="\n") as fh:
            fh.write("iteration,rho\n")
            fh.writelines(f"{i},{v:.17g}\n" for i, v in result.objective_trace)
    if result is not None and not result.converged:
        print(f"warning: gap {result.gap:.3g} above tolerance {args.tol:g}", file=sys.stderr)
        if args.strict:
            return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_table(args):
    networks = list(args.network or [])
    networks += list(args.graph or [])
    if not networks:
        networks = ["complete5", "star5"]
    methods = [MethodSpec(resolve_method(m), args.kappa) for m in (args.method or TABLE_METHODS)]
    table = convergence_table(networks, methods, _solve_options(args))
    width = max(len(k) for k in table)
    print(" " * width + "".join(f"  {n:>24}" for n in networks))
    for label, row in table.items():
        cells = "".join(f"  {rho:>11.4g} {_fmt_tau(tau):>12}" for rho, tau in row.values())
        print(f"{label:<{width}}{cells}")
    if args.out:
        write_table(table, args.out)
    return EXIT_OK


def cmd_simulate(args):
    cfg = load_config(args.config, seed=args.seed, runs=args.runs, out=args.out)
    res = simulate(cfg, _solve_options(args))
    for label, s in res.settling.items():
        step = "not attained" if s is None else cfg.n_arms + 1 + s
        print(f"{label}: rho={res.weights[label].rho:.6g} settling_step={step} "
              f"final_regret={res.final_regret[label]:.6g}")
    print(f"wrote {len(res.files)} files to {cfg.out}")
    if res.solver_warnings and args.strict:
        print(f"warning: solver did not converge for {res.solver_warnings}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="relweights", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(p):
        p.add_argument("--max-iters", type=int, default=SolveOptions.max_iters)
        p.add_argument("--tol", type=float, default=SolveOptions.tol)
        p.add_argument("--seed", type=int, help="experiment seed (overrides the config in simulate)")
        p.add_argument("--no-refine", action="store_true",
                       help="stop after the subgradient phase (no certified gap)")
        p.add_argument("--strict", action="store_true", help="exit 2 if a solver misses its tolerance")

    p = sub.add_parser("optimize", help="build one weight matrix and report rho and tau")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--network", help="topology name, e.g. complete5, star5, cluster3")
    src.add_argument("--graph", help="edge-list file")
    p.add_argument("--method", required=True)
    p.add_argument("--kappa", type=float, default=0.02)
    p.add_argument("--out", help="weight CSV to write")
    p.add_argument("--trace", help="objective trace CSV to write (fmmc/fdla)")
    solver_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("table", help="convergence factor table across networks and methods")
    p.add_argument("--network", action="append")
    p.add_argument("--graph", action="append")
    p.add_argument("--method", action="append")
    p.add_argument("--kappa", type=float, default=0.02)
    p.add_argument("--out", help="summary CSV to write")
    solver_flags(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("simulate", help="Monte-Carlo Coop-UCB2 runs from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--runs", type=int, help="override the run count (e.g. 100 for a desk-scale check)")
    p.add_argument("--out")
    solver_flags(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
