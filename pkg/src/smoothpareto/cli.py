"""Command-line entry point: ``smoothpareto <subcommand> ...``.

Exit codes: 0 success, 2 bad input, 3 size guard refused, 4 internal
invariant failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from . import approx, graph_paths, knapsack
from .errors import ContractViolation, DomainError, GuardError, InfeasibleError, InvariantError, ParetoError
from .pareto_core import format_scalar
from .smoothed import experiment as exp
from .smoothed.perturbation import PerturbationKind, PerturbationModel
from .smoothed.rounding import round_and_solve
from .smoothed.winners import compute_lambda

SEED_ENV = "SMOOTHPARETO_SEED"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GUARD = 3
EXIT_INVARIANT = 4


class InputError(ParetoError):
    """Bad command-line usage detected after argument parsing."""


# -- formatting ---------------------------------------------------------------


def _entry_line(entry) -> str:
    parts = [format_scalar(v) for v in entry.objective.values]
    bits = str(entry.solution)
    if bits:
        parts.append(bits)
    return " ".join(parts)


def _label_line(v: int, label, graph) -> str:
    path = "-".join(str(x) for x in label.vertices(graph))
    edges = ",".join(str(e) for e in label.edge_indices()) or "-"
    return f"{v} {format_scalar(label.cost)} {format_scalar(label.weight)} {path} {edges}"


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_knapsack(args):
    return knapsack.parse_knapsack(_read(args.input), exact_int=args.exact_int)


def _load_graph(args):
    return graph_paths.parse_graph(_read(args.input), exact_int=args.exact_int)


def _lines(lines) -> str:
    return "".join(line + "\n" for line in lines)


# -- subcommands --------------------------------------------------------------


def _knapsack_front(args, inst):
    if inst.d == 2:
        front, _ = knapsack.nu_pareto(
            inst, prune_capacity=args.prune_capacity, check_invariants=args.check
        )
    else:
        if args.prune_capacity:
            raise InputError("--prune-capacity needs d=2")
        front, _ = knapsack.nu_pareto_multi(inst)
    return front


def _graph_targets(args, graph):
    if args.target is None:
        return range(graph.vertex_count)
    if not 0 <= args.target < graph.vertex_count:
        raise InputError(f"target {args.target} is not a vertex")
    return [args.target]


def cmd_pareto(args) -> int:
    if args.kind == "knapsack":
        front = _knapsack_front(args, _load_knapsack(args))
        _emit(_lines(_entry_line(e) for e in front), args.output)
        return EXIT_OK
    graph = _load_graph(args)
    lists = graph_paths.bf_pareto(
        graph, early_exit=not args.no_early_exit, check_invariants=args.check
    )
    out = []
    for v in _graph_targets(args, graph):
        out.extend(_label_line(v, lab, graph) for lab in lists.labels[v])
    _emit(_lines(out), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load_knapsack(args)
    if inst.capacities is None:
        raise InputError("the instance has no capacity line")
    best = knapsack.solve(inst, prune_capacity=args.prune_capacity)
    _emit(_entry_line(best) + "\n", args.output)
    return EXIT_OK


def cmd_approx(args) -> int:
    if args.kind == "knapsack":
        front = _knapsack_front(args, _load_knapsack(args))
    else:
        graph = _load_graph(args)
        target = graph.vertex_count - 1 if args.target is None else args.target
        front = graph_paths.paths_pareto(graph, target)
    core = approx.eps_coreset(front, args.eps)
    _emit(_lines(_entry_line(e) for e in core), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.family == "exponential":
        text = knapsack.format_knapsack(knapsack.gen_exponential(args.size))
    elif args.family == "nonmonotone":
        text = knapsack.format_knapsack(knapsack.gen_nonmonotone())
    else:
        text = graph_paths.format_graph(graph_paths.gen_exp_paths(args.size))
    _emit(text, args.output)
    return EXIT_OK


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def cmd_experiment(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    for phi in args.phi:
        if not phi >= 1:
            raise InputError(f"phi must be >= 1, got {phi}")
    if len(args.n) > 1 and len(args.phi) > 1 and args.plot_data:
        raise InputError("--plot-data needs a sweep over n or over phi, not both")
    kind = PerturbationKind.UNIFORM_INTERVAL if args.density == "interval" else PerturbationKind.BOUNDED_DENSITY
    shape = "triangular" if args.density == "triangular" else "uniform"
    value_range = (-1.0, 1.0) if args.range == "symmetric" else (0.0, 1.0)
    reports = []
    for n in args.n:
        for phi in args.phi:
            spec = exp.ExperimentSpec(
                problem=args.problem,
                n=n,
                phi=phi,
                trials=args.trials,
                master_seed=seed,
                statistic=args.statistic,
                profile=args.profile,
                adversary_seed=args.adversary_seed,
            )
            model = PerturbationModel(kind=kind, phi=phi, value_range=value_range, shape=shape)
            reports.append(exp.run_experiment(spec, model, workers=args.workers, timing=args.timing))
    _emit(exp.write_csv(reports), args.output)
    if args.plot_data:
        x = "phi" if len(args.phi) > 1 else "n"
        Path(args.plot_data).write_text(exp.plot_data(reports, x))
    return EXIT_OK


def _fmt_lambda(v) -> str:
    return "inf" if v == math.inf else format_scalar(v)


def cmd_lambda(args) -> int:
    inst = _load_knapsack(args)
    res = compute_lambda(inst, args.t)
    out = [
        f"t {format_scalar(res.t)}",
        f"winner {_entry_line(res.winner)}",
        f"loser {_entry_line(res.loser) if res.loser else 'none'}",
        f"lambda {_fmt_lambda(res.lam)}",
    ]
    out.extend(f"lambda_{i} {_fmt_lambda(v)}" for i, v in enumerate(res.per_index))
    out.append(f"decomposition {'holds' if res.decomposition_holds() else 'fails'}")
    _emit(_lines(out), args.output)
    if not res.decomposition_holds():
        raise InvariantError("Λ(t) matches no Λ^i(t)")
    return EXIT_OK


def cmd_roundsolve(args) -> int:
    inst = _load_knapsack(args)
    res = round_and_solve(inst)
    out = [
        _entry_line(res.solution),
        f"bits_used {res.bits_used}",
        f"certified {int(res.certified)}",
        f"fallback {int(res.fallback_used)}",
    ]
    _emit(_lines(out), args.output)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _instance_args(p, *, kinds: bool = True) -> None:
    p.add_argument("input", help="instance file, or - for stdin")
    if kinds:
        p.add_argument("--kind", choices=("knapsack", "graph"), default="knapsack")
        p.add_argument("--target", type=int, help="graph target vertex")
    p.add_argument("--exact-int", action="store_true", help="reject non-integer values")
    p.add_argument("-o", "--output", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothpareto",
        description="Exact and approximate Pareto sets, plus smoothed-analysis experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pareto", help="list the Pareto set of an instance")
    _instance_args(p)
    p.add_argument("--prune-capacity", action="store_true")
    p.add_argument("--no-early-exit", action="store_true", help="run every Bellman-Ford round")
    p.add_argument("--check", action="store_true", help="assert internal invariants")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("solve", help="optimal knapsack solution")
    _instance_args(p, kinds=False)
    p.add_argument("--prune-capacity", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("approx", help="epsilon-approximate Pareto set")
    _instance_args(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--prune-capacity", action="store_true")
    p.set_defaults(func=cmd_approx, check=False)

    p = sub.add_parser("gen", help="write a fixture instance")
    p.add_argument("family", choices=("exponential", "nonmonotone", "exp-paths"))
    p.add_argument("size", type=int, nargs="?", default=None, help="n or k")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("experiment", help="seeded Monte-Carlo experiment, CSV output")
    p.add_argument("--problem", choices=[x.value for x in exp.Problem], default="knapsack")
    p.add_argument(
        "--statistic",
        choices=[x.value for x in exp.Statistic] + ["maxima"],
        default=None,
    )
    p.add_argument("--n", type=_positive_int, nargs="+", required=True)
    p.add_argument("--phi", type=float, nargs="+", default=[1.0])
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, help=f"master seed (default ${SEED_ENV} or 0)")
    p.add_argument("--adversary-seed", type=int)
    p.add_argument("--profile", choices=[x.value for x in exp.ProfitProfile], default="uniform")
    p.add_argument("--density", choices=("interval", "uniform", "triangular"), default="interval")
    p.add_argument("--range", choices=("unit", "symmetric"), default="unit")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--timing", action="store_true", help="record wall time (breaks byte-identity)")
    p.add_argument("--plot-data", help="also write x/mean pairs as TSV")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("lambda", help="winner, loser and Λ diagnostics at threshold t")
    _instance_args(p, kinds=False)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("roundsolve", help="solve by rounded profits with a certificate")
    _instance_args(p, kinds=False)
    p.set_defaults(func=cmd_roundsolve)
    return parser


def _normalize(args, parser) -> None:
    if args.command == "gen":
        if args.family != "nonmonotone" and args.size is None:
            parser.error(f"gen {args.family} needs a size")
    if args.command == "experiment":
        if args.statistic == "maxima":
            args.statistic = "maxima_count"
            args.problem = "points_2d"
        if args.statistic is None:
            args.statistic = "maxima_count" if args.problem == "points_2d" else "pareto_count"
    if args.command in ("pareto", "approx") and args.kind == "knapsack" and args.target is not None:
        parser.error("--target applies to graphs only")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _normalize(args, parser)
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InputError, ContractViolation, DomainError, InfeasibleError, ParetoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
