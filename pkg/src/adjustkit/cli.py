"""Unified command-line entry point.

Exit codes: 0 success, 1 usage error, 2 domain negative (no valid
adjustment set, FAIL, non-amenable), 3 numeric failure. Node-list
arguments are comma-separated and order-insensitive; node-set output is
sorted lexicographically, one name per line. Configuration precedence is
flags, then ADJUSTKIT_* environment variables, then defaults; stochastic
subcommands require a seed.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import adjustment, graphio, ida, simharness, varselect
from .adjustment import NotAmenableError
from .fixtures import FIXTURE_NAMES, get_fixture
from .graph import Graph, GraphError, possible_descendants
from .meek import consistent_extension, construct_max_pdag
from .scm import RankError, random_scm

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _env(name: str, default=None):
    return os.environ.get(f"ADJUSTKIT_{name}", default)


def _nodes(arg: str) -> frozenset[str]:
    names = [p.strip() for p in arg.split(",") if p.strip()]
    if not names:
        raise _UsageError("empty node list")
    return frozenset(names)


def _load_graph(args) -> Graph:
    if getattr(args, "fixture", None):
        return get_fixture(args.fixture).graph
    if getattr(args, "graph", None):
        return graphio.load_graph(args.graph)
    raise _UsageError("pass --graph FILE or --fixture NAME")


def _need_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = _env("SEED")
    if env is not None:
        return int(env)
    raise _UsageError("--seed is mandatory for stochastic subcommands "
                      "(or set ADJUSTKIT_SEED)")


def _print_nodes(nodes):
    for n in sorted(nodes):
        print(n)


def _add_graph_args(sub, roles=True):
    sub.add_argument("--graph", help="edge-list graph file")
    sub.add_argument("--fixture", help="built-in fixture name")
    if roles:
        sub.add_argument("--x", required=True, type=_nodes, help="treatments")
        sub.add_argument("--y", required=True, type=_nodes, help="outcomes")


def build_parser() -> _Parser:
    parser = _Parser(prog="adjustkit",
                     description="Efficient covariate-adjustment sets in causal graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oset", help="compute the variance-optimal adjustment set")
    _add_graph_args(p)
    p.add_argument("--via-projection", action="store_true",
                   help="compute it as the outcome's parents in the forbidden projection")
    p.set_defaults(func=_cmd_oset)

    p = sub.add_parser("project", help="write the forbidden projection")
    _add_graph_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("validate", help="check a candidate adjustment set")
    _add_graph_args(p)
    p.add_argument("--z", required=True, type=_nodes)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("separate", help="d-/m-separation query")
    _add_graph_args(p, roles=False)
    p.add_argument("--a", required=True, type=_nodes)
    p.add_argument("--b", required=True, type=_nodes)
    p.add_argument("--c", type=_nodes, default=frozenset())
    p.set_defaults(func=_cmd_separate)

    p = sub.add_parser("orient", help="impose orientations and close under the rules")
    _add_graph_args(p, roles=False)
    p.add_argument("--require", action="append", default=[],
                   metavar="A->B", help="orientation to impose (repeatable)")
    p.set_defaults(func=_cmd_orient)

    p = sub.add_parser("ida", help="multiset of possible causal effects")
    _add_graph_args(p, roles=False)
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--method", choices=("optimal", "semilocal"), default="optimal")
    p.add_argument("--dedupe", action="store_true",
                   help="also print the deduplicated possible O-sets")
    p.add_argument("--out", help="write the CSV here instead of stdout")
    p.set_defaults(func=_cmd_ida)

    p = sub.add_parser("select", help="backward regression selection")
    p.add_argument("--data", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--z", required=True, type=_nodes)
    p.add_argument("--alpha", required=True,
                   help="numeric threshold, or 'aic'/'bic'")
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("simulate", help="relative-MSE scenario (true-CPDAG track)")
    p.add_argument("--p", required=True, type=int)
    p.add_argument("--d", required=True, type=float)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--reps", required=True, type=int)
    p.add_argument("--dpg", required=True, type=int, help="datasets per graph")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="per-replication results CSV")
    p.add_argument("--plot", help="also render a violin figure to this file")
    p.add_argument("--err-var", type=float,
                   default=float(_env("ERR_VAR", "1.0")))
    p.add_argument("--track", choices=("true", "estimated"), default="true")
    p.add_argument("--rejection-cap", type=int, default=10_000)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("density", help="per-entry IDA estimates over replications")
    _add_graph_args(p, roles=False)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--scm-seed", required=True, type=int,
                   help="seed for the coefficients on a consistent extension")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--reps", required=True, type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="also render the density figure to this file")
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("fixtures", help="print a built-in fixture")
    p.add_argument("--name")
    p.set_defaults(func=_cmd_fixtures)
    return parser


def _cmd_oset(args) -> int:
    g = _load_graph(args)
    x, y = args.x, args.y
    result = (adjustment.o_star_set(g, x, y) if args.via_projection
              else adjustment.o_set(g, x, y))
    _print_nodes(result)
    kept, dropped = adjustment.reduce_outcomes(g, x, y)
    if dropped:
        print(f"note: zero effect on {','.join(sorted(dropped))}", file=sys.stderr)
    if kept and not adjustment.adjustment_set_exists(g, x, kept):
        print("no valid adjustment set exists", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def _cmd_project(args) -> int:
    g = _load_graph(args)
    proj = adjustment.forbidden_projection(g, args.x, args.y)
    graphio.save_graph(proj.graph, args.out)
    print(f"kept {len(proj.kept)} nodes, projected over "
          f"{','.join(sorted(proj.removed)) or 'nothing'}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    g = _load_graph(args)
    x, y = args.x, args.y
    if not adjustment.amenable(g, x, y):
        print("not amenable: no common adjustment set across the represented DAGs",
              file=sys.stderr)
        return EXIT_DOMAIN
    if adjustment.is_valid_adjustment_set(g, x, y, args.z):
        print("valid")
        return EXIT_OK
    kept, _ = adjustment.reduce_outcomes(g, x, y)
    if kept and not adjustment.adjustment_set_exists(g, x, kept):
        print("no valid adjustment set exists", file=sys.stderr)
    else:
        print("invalid adjustment set", file=sys.stderr)
    return EXIT_DOMAIN


def _cmd_separate(args) -> int:
    from .separation import connecting_path, separated

    g = _load_graph(args)
    if separated(g, args.a, args.b, args.c):
        print("separated")
        return EXIT_OK
    print("connected")
    try:
        witness = connecting_path(g, args.a, args.b, args.c)
    except GraphError:
        witness = None  # too large for path enumeration
    if witness is not None:
        pieces = [witness.nodes[0]]
        for step, node in zip(witness.steps, witness.nodes[1:]):
            pieces.append(f" {step} {node}")
        print("open path: " + "".join(pieces))
    return EXIT_OK


def _cmd_orient(args) -> int:
    g = _load_graph(args)
    background = []
    for spec_str in args.require:
        if "->" not in spec_str:
            raise _UsageError(f"--require wants 'A->B', got {spec_str!r}")
        tail, head = (s.strip() for s in spec_str.split("->", 1))
        background.append((tail, head))
    oriented = construct_max_pdag(g, background)
    if oriented is None:
        print("FAIL")
        return EXIT_DOMAIN
    sys.stdout.write(graphio.format_graph(oriented))
    return EXIT_OK


def _fmt_set(s) -> str:
    if s is ida.ZERO:
        return "ZERO"
    return ";".join(sorted(s)) if s else "(empty)"


def _cmd_ida(args) -> int:
    g = _load_graph(args)
    data = graphio.read_dataset_csv(args.data)
    run = ida.optimal_ida if args.method == "optimal" else ida.semi_local_ida
    multiset = run(g, args.x, args.y, data)
    lines = ["subset,adjustment_set,estimate"]
    for e in multiset.entries:
        est = "" if e.estimate is None else f"{e.estimate:.17g}"
        lines.append(f"{_fmt_set(e.sibling_subset)},{_fmt_set(e.adjustment_set)},{est}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.dedupe:
        for s in ida.possible_o_sets(g, args.x, args.y, dedupe=True):
            print("oset:", _fmt_set(s))
    if any(e.error for e in multiset.entries):
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_select(args) -> int:
    data = graphio.read_dataset_csv(args.data)
    try:
        alpha = float(args.alpha)
    except ValueError:
        alpha = varselect.alpha_for_criterion(args.alpha, data.n)
        print(f"alpha({args.alpha}, n={data.n}) = {alpha:.6g}")
    selected, trace = varselect.backward_select_with_trace(
        data, args.x, args.y, args.z, alpha)
    for name, pvalue in trace:
        print(f"drop {name} (p={pvalue:.4g})")
    print("selected:", ",".join(sorted(selected)) or "(empty)")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = simharness.ScenarioConfig(
        p=args.p, d=args.d, n=args.n, reps=args.reps,
        datasets_per_graph=args.dpg, seed=_need_seed(args),
        rejection_cap=args.rejection_cap, err_var=args.err_var)
    summary = simharness.run_rmse_scenario(cfg, track=args.track)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("rep,min_abs_true,mse_optimal,mse_local,rmse\n")
        for r in summary.records:
            fh.write(f"{r.rep},{r.min_abs_true:.17g},{r.mse_optimal:.17g},"
                     f"{r.mse_local:.17g},{r.rmse:.17g}\n")
    print(f"p={args.p} d={args.d:g} n={args.n}: geometric mean RMSE "
          f"{summary.geometric_mean:.2f} ({summary.median:.2f})")
    if summary.failed_reps:
        print(f"note: {summary.failed_reps} replications failed", file=sys.stderr)
    if args.plot:
        from .plots import save_rmse_plot
        save_rmse_plot(summary, args.plot,
                       title=f"p={args.p}, d={args.d:g}, n={args.n}")
    return EXIT_OK


def _cmd_density(args) -> int:
    g = _load_graph(args)
    scm = random_scm(consistent_extension(g), args.scm_seed)
    rows = simharness.density_experiment(
        g, scm, args.x, args.y, args.n, args.reps, _need_seed(args))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("rep,method,subset,adjustment_set,estimate\n")
        for r in rows:
            adj = "ZERO" if r.adjustment_set is None else (
                ";".join(r.adjustment_set) or "(empty)")
            fh.write(f"{r.rep},{r.method},{';'.join(r.sibling_subset) or '(empty)'},"
                     f"{adj},{r.estimate:.17g}\n")
    if args.plot:
        from .ida import population_ida
        from .plots import save_density_plot
        truth = sorted({round(v, 12) for v in
                        population_ida(g, args.x, args.y, scm,
                                       "optimal", validate=False).values()})
        save_density_plot(rows, args.plot, true_values=truth)
    return EXIT_OK


def _cmd_fixtures(args) -> int:
    if args.name:
        fixture = get_fixture(args.name)
        sys.stdout.write(graphio.format_graph(fixture.graph))
        print(f"# x: {','.join(sorted(fixture.x))}  y: {','.join(sorted(fixture.y))}")
        return EXIT_OK
    for name in FIXTURE_NAMES:
        f = get_fixture(name)
        print(f"{name}: {f.graph.graph_class}, {len(f.graph.nodes)} nodes, "
              f"x={','.join(sorted(f.x))}, y={','.join(sorted(f.y))}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except NotAmenableError as err:
        print(f"not amenable: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except (RankError, np.linalg.LinAlgError) as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphError, graphio.ParseError, KeyError, ValueError,
            FileNotFoundError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
