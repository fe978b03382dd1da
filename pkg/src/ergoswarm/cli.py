"""Command-line front end.

Verbs:
    run <config> [--out DIR] [--jobs J]   run the configured trial batch
    summarize <DIR>                       print the comparison report
    validate-config <path>                check a config file
    synth-chain <config> --target ...     emit one transition matrix (debug)

The default output directory comes from --out, falling back to the
ERGOSWARM_OUT environment variable, then ./ergoswarm_out.  Exit codes:
0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .chains import fmmc_solve, metropolis_hastings, remc_solve, to_text_block, validate_chain
from .config import ConfigError, load_config
from .runner import run_experiment, summarize
from .sim import ground_truth_for
from .target import gibbs_target, optimal_target, uniform_target


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(self.prog + ": error: " + message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ergoswarm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to the experiment config file")
    p_run.add_argument("--out", help="output bundle directory")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel trial workers")

    p_sum = sub.add_parser("summarize", help="summarize a results bundle")
    p_sum.add_argument("bundle", help="results bundle directory")

    p_val = sub.add_parser("validate-config", help="validate a config file")
    p_val.add_argument("config")

    p_syn = sub.add_parser("synth-chain", help="synthesize one transition matrix")
    p_syn.add_argument("config")
    p_syn.add_argument(
        "--target",
        required=True,
        help="uniform | optimal | gibbs:BETA (gibbs uses the drawn true variances)",
    )
    p_syn.add_argument("--out", help="write the matrix block to a file instead of stdout")
    return parser


def _default_out() -> Path:
    return Path(os.environ.get("ERGOSWARM_OUT", "ergoswarm_out"))


def _cmd_run(args) -> int:
    config = load_config(args.config)
    out = Path(args.out) if args.out else _default_out()
    bundle = run_experiment(config, out, jobs=max(1, args.jobs))
    print(f"wrote results bundle: {bundle}")
    return 0


def _cmd_summarize(args) -> int:
    sys.stdout.write(summarize(args.bundle))
    return 0


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    g = config.graph
    print(
        f"OK: {g.n_regions} regions, {len(g.edges)} undirected edges, "
        f"{config.n_robots} robots, horizon {config.horizon}, "
        f"{config.trials} trials, planner {config.planner}"
    )
    return 0


def _cmd_synth_chain(args) -> int:
    config = load_config(args.config)
    graph = config.region_graph()
    n = graph.n_regions
    choice = args.target
    if choice == "uniform":
        target = uniform_target(n)
    elif choice == "optimal":
        target = optimal_target(ground_truth_for(config, config.base_seed).sigma2)
    elif choice.startswith("gibbs:"):
        beta = float(choice.split(":", 1)[1])
        target = gibbs_target(ground_truth_for(config, config.base_seed).sigma2, beta)
    else:
        raise ConfigError(f"unknown target {choice!r}; expected uniform, optimal, or gibbs:BETA")

    if config.planner == "metropolis_hastings":
        tm = metropolis_hastings(graph, target)
        diag = validate_chain(tm, graph, target)
    else:
        solve = remc_solve if config.planner == "remc" else fmmc_solve
        tm, diag = solve(graph, target, config.solver)

    block = to_text_block(tm)
    if args.out:
        Path(args.out).write_text(block)
    else:
        sys.stdout.write(block)
    print(f"# planner: {config.planner}")
    print(f"# stationarity residual: {diag.stationarity_residual:.3e}")
    print(f"# remc objective: {diag.remc_objective:.9f}")
    print(f"# slem: {diag.slem:.9f}" + ("  (symmetrized)" if diag.slem_symmetrized else ""))
    print(f"# ergodic: {diag.ergodic}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, str):  # our usage errors carry the message
            print(exc.code, file=sys.stderr)
            return 1
        return 0 if exc.code in (0, None) else 1
    try:
        if args.verb == "run":
            return _cmd_run(args)
        if args.verb == "summarize":
            return _cmd_summarize(args)
        if args.verb == "validate-config":
            return _cmd_validate(args)
        if args.verb == "synth-chain":
            return _cmd_synth_chain(args)
        return 1
    except (ConfigError, FileNotFoundError) as exc:
        print(f"ergoswarm: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 -- runtime failures exit 2
        print(f"ergoswarm: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
