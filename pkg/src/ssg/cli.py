"""Command line front end: solve, classify, generate, bench.

Exit codes: 0 on success, 1 for input errors, 2 when a solver refuses
an instance outside its documented domain, 3 when an internal
invariant breaks (a bug).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .dichotomy import dichotomy_solve, make_stopping, solve_feedback
from .errors import (
    GameError,
    InternalInvariantError,
    NotStoppingError,
    PreconditionError,
)
from .evaluation import greedy_strategies
from .gamefile import parse, serialize
from .generate import DEFAULT_PROPORTIONS, Family, GeneratorSpec, generate
from .iteration import hoffman_karp
from .model import Game, ValueVector
from .oracle import oracle_solve
from .solvers import (
    solve_acyclic,
    solve_almost_acyclic_scc,
    solve_by_scc,
    solve_fork_fpt,
    solve_max_acyclic_scc,
)
from .structure import analyze, feedback_vertex_set

ALGORITHMS = (
    "auto",
    "oracle",
    "hk",
    "acyclic",
    "max_acyclic",
    "almost_acyclic",
    "fork_fpt",
    "dichotomy",
    "feedback",
)

FORK_WEIGHT_LIMIT = 10
FEEDBACK_SIZE_LIMIT = 3


@dataclass
class RunReport:
    algorithm: str
    values: ValueVector
    iterations: int | None
    subsolver_calls: int | None
    seconds: float


class _Counting:
    """Wraps a solver and counts how many times it runs."""

    def __init__(self, solver):
        self.solver = solver
        self.calls = 0

    def __call__(self, game: Game) -> ValueVector:
        self.calls += 1
        return self.solver(game)


def choose_algorithm(game: Game) -> str:
    """The AUTO dispatch order, cheapest structure first."""
    report = analyze(game)
    if report.is_acyclic:
        return "acyclic"
    if report.k_p == 0 and report.k_a == 0:
        return "almost_acyclic"
    if report.is_max_acyclic:
        return "max_acyclic"
    if report.k_p + report.k_a <= FORK_WEIGHT_LIMIT:
        return "fork_fpt"
    if feedback_vertex_set(game, FEEDBACK_SIZE_LIMIT) is not None:
        return "feedback"
    return "hk"


def run_algorithm(game: Game, name: str) -> RunReport:
    """Solve with the named algorithm and time it."""
    started = time.perf_counter()
    iterations: int | None = None
    calls: int | None = None
    if name == "auto":
        name = choose_algorithm(game)
    if name == "oracle":
        values = oracle_solve(game).values
    elif name == "hk":
        trace = hoffman_karp(game)
        values = trace.values
        iterations = trace.iterations
    elif name == "acyclic":
        values = solve_acyclic(game)
    elif name == "max_acyclic":
        values = solve_by_scc(game, solve_max_acyclic_scc)
    elif name == "almost_acyclic":
        values = solve_by_scc(game, solve_almost_acyclic_scc)
    elif name == "fork_fpt":
        values = solve_fork_fpt(game)
    elif name == "dichotomy":
        cover = feedback_vertex_set(game, 1)
        if cover is None:
            raise PreconditionError(
                "dichotomy needs a single vertex covering every cycle"
            )
        counter = _Counting(solve_acyclic)
        if cover:
            values = dichotomy_solve(game, cover[0], counter)
        else:
            values = counter(game)
        calls = counter.calls
    elif name == "feedback":
        cover = feedback_vertex_set(game)
        counter = _Counting(solve_acyclic)
        values = solve_feedback(game, cover, counter)
        calls = counter.calls
    else:
        raise PreconditionError(f"unknown algorithm {name!r}")
    seconds = time.perf_counter() - started
    return RunReport(name, values, iterations, calls, seconds)


def _rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _load(path: str) -> Game:
    return parse(Path(path).read_text(encoding="utf-8"))


def solve_command(args: argparse.Namespace) -> int:
    game = _load(args.file)
    if args.make_stopping is not None:
        game = make_stopping(game, args.make_stopping or None)
    requested = args.algorithm
    try:
        report = run_algorithm(game, requested)
    except NotStoppingError as exc:
        raise NotStoppingError(
            f"{exc} (rerun with --make-stopping to solve a nearby stopping game)"
        ) from None
    chosen = report.algorithm + (" (auto)" if requested == "auto" else "")
    print(f"algorithm: {chosen}")
    print(
        f"vertices: {game.n} (max {game.n_max}, min {game.n_min}, "
        f"ave {game.n_ave})"
    )
    if report.iterations is not None:
        print(f"iterations: {report.iterations}")
    if report.subsolver_calls is not None:
        print(f"subsolver calls: {report.subsolver_calls}")
    print(f"time: {report.seconds:.4f}s")
    print("values:")
    for v, value in enumerate(report.values):
        print(f"  {v} = {_rational(value)}")
    if args.strategies:
        pair = greedy_strategies(game, report.values)
        print("strategies:")
        for label, strategy in (("max", pair.sigma), ("min", pair.tau)):
            for v in strategy.support:
                print(f"  {label} {v} -> {strategy[v]}")
    return 0


def classify_command(args: argparse.Namespace) -> int:
    game = _load(args.file)
    report = analyze(game)
    n_sink = game.n - game.n_max - game.n_min - game.n_ave
    cyclic = sum(
        1
        for comp in report.components
        if len(comp) > 1 or comp[0] in game.succs[comp[0]] and not game.is_sink(comp[0])
    )
    print(
        f"vertices: {game.n} (max {game.n_max}, min {game.n_min}, "
        f"ave {game.n_ave}, sink {n_sink})"
    )
    print(f"components: {len(report.components)} ({cyclic} cyclic)")
    print(f"cycle arcs: {len(report.cycle_arcs)}")
    print(f"k_p: {report.k_p} (fork vertices: {_vertex_list(report.fork_positional)})")
    print(f"k_a: {report.k_a} (fork vertices: {_vertex_list(report.fork_average)})")
    for label, flag in (
        ("acyclic", report.is_acyclic),
        ("max_acyclic", report.is_max_acyclic),
        ("min_acyclic", report.is_min_acyclic),
        ("almost_acyclic", report.is_almost_acyclic),
    ):
        print(f"{label}: {'yes' if flag else 'no'}")
    cover = feedback_vertex_set(game, args.fvs_max)
    if cover is None:
        print(f"feedback vertex set: none of size <= {args.fvs_max}")
    else:
        members = ", ".join(str(v) for v in cover) or "empty"
        print(f"feedback vertex set: size {len(cover)} ({members})")
    return 0


def _vertex_list(forks) -> str:
    return ", ".join(str(v) for v in sorted(forks)) or "none"


def generate_command(args: argparse.Namespace) -> int:
    spec = GeneratorSpec(
        n=args.n,
        family=Family(args.family),
        seed=args.seed,
        proportions=args.proportions,
        k=args.k,
    )
    text = serialize(generate(spec))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def bench_command(args: argparse.Namespace) -> int:
    header = (
        f"{'solver':>15} {'n':>8} {'n_max':>6} {'n_ave':>6} "
        f"{'iters':>7} {'calls':>7} {'time_s':>10} {'status':>8}"
    )
    print(header)
    rows: list[str] = []
    instance = 0
    for size in args.sizes:
        for rep in range(args.reps):
            spec = GeneratorSpec(
                n=size,
                family=Family(args.family),
                seed=args.seed + instance,
                proportions=args.proportions,
                k=args.k,
            )
            game = generate(spec)
            for solver in args.solvers:
                try:
                    run = run_algorithm(game, solver)
                    status = "ok"
                    iters = "" if run.iterations is None else run.iterations
                    calls = "" if run.subsolver_calls is None else run.subsolver_calls
                    secs = f"{run.seconds:.4f}"
                except PreconditionError:
                    status, iters, calls, secs = "refused", "", "", ""
                print(
                    f"{solver:>15} {size:>8} {game.n_max:>6} {game.n_ave:>6} "
                    f"{iters!s:>7} {calls!s:>7} {secs:>10} {status:>8}"
                )
                rows.append(
                    f"#row solver={solver} n={size} n_max={game.n_max} "
                    f"n_ave={game.n_ave} seed={spec.seed} "
                    f"iterations={iters} subsolver_calls={calls} "
                    f"time_s={secs} status={status}"
                )
            instance += 1
    for row in rows:
        print(row)
    return 0


def _proportions(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            "proportions must be four comma-separated numbers (max,min,ave,sink)"
        )
    try:
        values = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return values


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _solver_list(text: str) -> list[str]:
    names = [p.strip() for p in text.split(",") if p.strip()]
    for name in names:
        if name not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown solver {name!r}")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssg", description="Exact solvers for simple stochastic games."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="solve a game file exactly")
    solve.add_argument("file")
    solve.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    solve.add_argument(
        "--strategies", action="store_true", help="print greedy optimal strategies"
    )
    solve.add_argument(
        "--make-stopping",
        type=int,
        metavar="M",
        default=None,
        help="reroute arcs through M-step coin chains first (0 picks M automatically)",
    )
    solve.set_defaults(run=solve_command)

    classify = commands.add_parser("classify", help="report cycle structure")
    classify.add_argument("file")
    classify.add_argument("--fvs-max", type=int, default=5, metavar="K")
    classify.set_defaults(run=classify_command)

    gen = commands.add_parser("generate", help="write a random game file")
    gen.add_argument("--family", choices=[f.value for f in Family], required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--k", type=int, default=1, help="cycle covers for dag_plus_k")
    gen.add_argument(
        "--proportions",
        type=_proportions,
        default=DEFAULT_PROPORTIONS,
        metavar="MAX,MIN,AVE,SINK",
    )
    gen.add_argument("-o", "--output", default=None)
    gen.set_defaults(run=generate_command)

    bench = commands.add_parser("bench", help="time solvers over generated games")
    bench.add_argument("--family", choices=[f.value for f in Family], required=True)
    bench.add_argument("--sizes", type=_int_list, required=True, metavar="N1,N2,...")
    bench.add_argument(
        "--solvers", type=_solver_list, required=True, metavar="S1,S2,..."
    )
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--reps", type=int, default=1)
    bench.add_argument("--k", type=int, default=1)
    bench.add_argument(
        "--proportions",
        type=_proportions,
        default=DEFAULT_PROPORTIONS,
        metavar="MAX,MIN,AVE,SINK",
    )
    bench.set_defaults(run=bench_command)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.run(args)
    except InternalInvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 3
    except PreconditionError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except (GameError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
