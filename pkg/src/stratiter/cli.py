"""Command-line interface.

Exit codes: 0 success, 1 unreadable or malformed input, 2 invalid model,
3 internal soundness failure (including solver disagreement in ``bench``).
"""

from __future__ import annotations

import argparse
import random
import sys

from . import energy, pametrics, ssg
from .bench import SOLVERS, BenchConfig, Disagreement, bench, render_csv, render_table
from .formats import GameFileError, InvariantError, format_value, load, parse_rational
from .nonexp import NotAFixpoint, SoundnessError

EXIT_PARSE, EXIT_INVARIANT, EXIT_SOUNDNESS = 1, 2, 3


def _fmt_values(values, names):
    width = max(len(str(v)) for v in names)
    return [f"{str(v):<{width}}  {format_value(values[v])}" for v in names]


def _fmt_assignment(a, names=None):
    names = names or a.domain
    return " ".join(f"{v}={format_value(a[v])}" for v in names)


def _print_trace(sol, dec, out):
    for step in sol.trace:
        choice = dec.describe(step.strategy)
        desc = " ".join(f"{y}->{c}" for y, c in choice.items()) or "-"
        print(f"iter {step.index}: strategy {desc}", file=out)
        print(f"  values {_fmt_assignment(step.values)}", file=out)
        if step.skip is not None:
            cyc = ",".join(sorted(map(str, step.skip.cycle)))
            print(f"  skip cycle {{{cyc}}} delta {format_value(step.skip.delta)}", file=out)


def _initial(dec, seed):
    if seed is None:
        return None
    return dec.random_initial(random.Random(seed))


def _load(path, kind):
    got, model, params = load(path)
    if got != kind:
        raise GameFileError(f"expected a {kind} file, found {got}")
    return model


def cmd_solve_ssg(args, out):
    g = _load(args.file, "ssg")
    if args.below:
        dec = ssg.max_decomposition(g)
        sol = ssg.solve_ssg_below(g, initial=_initial(dec, args.random_init))
        who = "max"
    else:
        dec = ssg.min_decomposition(g)
        sol = ssg.solve_ssg_above(g, initial=_initial(dec, args.random_init))
        who = "min"
    for line in _fmt_values(sol.values, g.states):
        print(line, file=out)
    for y, c in dec.describe(sol.strategy).items():
        print(f"strategy[{who}] {y} -> {c}", file=out)
    print(f"iterations {sol.iterations}", file=out)
    if args.trace:
        _print_trace(sol, dec, out)


def cmd_solve_energy(args, out):
    g = _load(args.file, "energy")
    sol = dec = None
    if args.kleene:
        values, steps = energy.solve_kleene(g)
    elif args.vi:
        values, steps = energy.solve_vi(g)
    elif args.below:
        t = energy.transform_finite(g)
        dec = energy.max_decomposition(t.game, t.k)
        values, sol, dec = energy.solve_energy_below(g, initial=_initial(dec, args.random_init))
        steps = sol.iterations
    else:
        t = energy.transform_finite(g)
        dec = energy.min_decomposition(t.game, t.k)
        values, sol, dec = energy.solve_energy_above(g, initial=_initial(dec, args.random_init))
        steps = sol.iterations
    for line in _fmt_values(values, g.states):
        print(line, file=out)
    if sol is not None:
        who = "player1" if args.below else "player0"
        for y, c in dec.describe(sol.strategy).items():
            print(f"strategy[{who}] {y} -> {c}", file=out)
    print(f"iterations {steps}", file=out)
    if args.trace and sol is not None:
        _print_trace(sol, dec, out)


def cmd_solve_pa(args, out):
    pa = _load(args.file, "pa")
    dec = pametrics.PADecomposition(pa)
    sol = pametrics.solve_pa_above(pa)
    S = pa.states
    cells = [[format_value(sol.values[s, t]) for t in S] for s in S]
    width = max([len(s) for s in S] + [len(c) for row in cells for c in row])
    print(" " * width + "  " + "  ".join(f"{t:>{width}}" for t in S), file=out)
    for s, row in zip(S, cells):
        print(f"{s:<{width}}  " + "  ".join(f"{c:>{width}}" for c in row), file=out)
    for (s, t), R in sol.strategy.rho.items():
        if s < t:
            pairs = " ".join(f"({a},{b})" for a, b in sorted(R))
            print(f"coupling {s} {t}: {pairs}", file=out)
    print(f"iterations {sol.iterations}", file=out)
    if args.trace:
        _print_trace(sol, dec, out)


def cmd_bench(args, out):
    solvers = tuple(s.strip().upper() for s in args.solvers.split(",") if s.strip())
    p = parse_rational(args.p) if args.p is not None else None
    try:
        cfg = BenchConfig(args.n, p, args.W, args.seed, args.runs, solvers)
    except ValueError as exc:
        raise InvariantError(str(exc)) from None
    results = bench(cfg, dump_dir=args.dump_dir)
    if args.csv:
        print(render_csv(cfg, results, show_time=not args.no_time), end="", file=out)
    else:
        print(render_table(cfg, results, show_time=not args.no_time), file=out)


def build_parser():
    parser = argparse.ArgumentParser(prog="stratiter", description=(
        "Strategy iteration for least fixpoints: stochastic games, energy games "
        "and behavioural distances."))
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file")
        p.add_argument("--trace", action="store_true", help="print every outer iteration")

    p = sub.add_parser("solve-ssg", help="solve a simple stochastic game")
    common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--above", action="store_true", help="iterate over Min strategies (default)")
    g.add_argument("--below", action="store_true", help="iterate over Max strategies")
    p.add_argument("--random-init", type=int, metavar="SEED", help="random initial strategy")
    p.set_defaults(func=cmd_solve_ssg)

    p = sub.add_parser("solve-energy", help="solve an energy game")
    common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--kleene", action="store_true")
    g.add_argument("--vi", action="store_true", help="worklist value iteration")
    g.add_argument("--above", action="store_true", help="strategy iteration for player 0 (default)")
    g.add_argument("--below", action="store_true", help="strategy iteration for player 1")
    p.add_argument("--random-init", type=int, metavar="SEED", help="random initial strategy")
    p.set_defaults(func=cmd_solve_energy)

    p = sub.add_parser("solve-pa", help="behavioural distance of a probabilistic automaton")
    common(p)
    p.set_defaults(func=cmd_solve_pa)

    p = sub.add_parser("bench", help="compare energy-game solvers on random games")
    p.add_argument("--n", type=int, required=True, help="number of states")
    p.add_argument("--p", help="edge probability as p/q (default 2/n)")
    p.add_argument("--W", type=int, help="weight bound (default n)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--solvers", default=",".join(SOLVERS),
                   help=f"comma-separated subset of {','.join(SOLVERS)}")
    p.add_argument("--csv", action="store_true", help="one CSV row per instance and solver")
    p.add_argument("--no-time", action="store_true", help="omit wall-clock columns")
    p.add_argument("--dump-dir", default=".", help="where to write counterexamples")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except InvariantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (GameFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SoundnessError, NotAFixpoint, ArithmeticError, Disagreement) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_SOUNDNESS
    return 0


if __name__ == "__main__":
    sys.exit(main())
