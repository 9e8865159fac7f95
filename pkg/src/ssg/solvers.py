"""Solvers that exploit how close a game's cycle structure is to a DAG.

Four layers, each reducing to the one below: acyclic games fall to a
single backward pass; strongly connected MAX-acyclic games to strategy
iteration with a linear iteration bound; single cycles to one closed
evaluation plus at most two acyclic solves; and games with few fork
vertices to a bounded recursion that opens one vertex at a time.  All
of them return exact rationals and certify their answer against the
local optimality equations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InternalInvariantError, NotStoppingError, PreconditionError
from .evaluation import (
    check_local_optimality,
    check_stopping,
    one_step_value,
    solve_linear_system,
)
from .iteration import all_open_strategy, hoffman_karp
from .model import Game, ValueVector, VertexKind, merge_sink_neighbors
from .structure import StructureReport, analyze, component_game

ZERO = Fraction(0)
HALF = Fraction(1, 2)


def solve_acyclic(game: Game) -> ValueVector:
    """Optimal values of a DAG game in one backward pass.

    Every vertex takes its one-step value over already-solved
    successors.  Refuses games with a sink-free cycle.
    """
    n = game.n
    indeg = [0] * n
    nonsinks = [v for v in range(n) if not game.is_sink(v)]
    for v in nonsinks:
        for s in game.succs[v]:
            if not game.is_sink(s):
                indeg[s] += 1
    queue = [v for v in nonsinks if indeg[v] == 0]
    order = []
    while queue:
        v = queue.pop()
        order.append(v)
        for s in game.succs[v]:
            if not game.is_sink(s):
                indeg[s] -= 1
                if indeg[s] == 0:
                    queue.append(s)
    if len(order) != len(nonsinks):
        raise PreconditionError("game has a sink-free cycle")
    values: list[Fraction] = [ZERO] * n
    for v in game.sink_vertices:
        values[v] = game.sink_value(v)
    for v in reversed(order):
        values[v] = one_step_value(game, values, v)
    return tuple(values)


def solve_by_scc(game: Game, component_solver) -> ValueVector:
    """Assemble optimal values component by component.

    Components are processed successors-first, so when a component's
    turn comes every arc leaving it points at an already-solved vertex
    and the component solver sees those values as frontier sinks.
    Sinks and non-cyclic singletons are folded in directly.
    """
    report = analyze(game)
    values: list[Fraction | None] = [None] * game.n
    solved: dict[int, Fraction] = {}
    for comp in report.components:
        v = comp[0]
        if len(comp) == 1 and game.is_sink(v):
            values[v] = game.sink_value(v)
        elif len(comp) == 1 and v not in game.succs[v]:
            values[v] = one_step_value(game, values, v)
        else:
            sub = component_game(game, comp, solved)
            sub_values = component_solver(sub)
            for u in comp:
                values[u] = sub_values[u]
        for u in comp:
            solved[u] = values[u]
    vector = tuple(values)
    outcome = check_local_optimality(game, vector)
    if not outcome.satisfied:
        raise InternalInvariantError(
            "assembled values violate local optimality at "
            f"{[bad.vertex for bad in outcome.violations]}"
        )
    return vector


def _cyclic_component_set(game: Game, report: StructureReport) -> frozenset[int]:
    members = {x for x, _ in report.cycle_arcs}
    members.update(y for _, y in report.cycle_arcs)
    return frozenset(members)


def _require_one_cycle_component(game: Game, report: StructureReport) -> frozenset[int]:
    """The preconditions shared by the strongly connected solvers.

    Every non-sink vertex must belong to a single cyclic component
    (frontier sinks aside); returns that component's vertex set.
    """
    on_cycles = _cyclic_component_set(game, report)
    nonsinks = {v for v in range(game.n) if not game.is_sink(v)}
    if nonsinks != on_cycles:
        raise PreconditionError(
            "expected one strongly connected component plus sinks"
        )
    comps = {report.component_of[v] for v in on_cycles}
    if len(comps) > 1:
        raise PreconditionError("more than one strongly connected component")
    return frozenset(on_cycles)


def solve_max_acyclic_scc(game: Game) -> ValueVector:
    """Solve a strongly connected component where no MAX vertex forks.

    After merging each vertex's sink neighbors, strategy iteration from
    the all-open start provably needs at most one improvement step per
    MAX vertex; that bound is asserted.
    """
    report = analyze(game)
    _require_one_cycle_component(game, report)
    if not report.is_max_acyclic:
        raise PreconditionError("a MAX vertex has two outgoing cycle arcs")
    merged = merge_sink_neighbors(game)
    trace = hoffman_karp(merged, all_open_strategy(merged), require_stopping=False)
    n_max = len(game.max_vertices)
    if trace.iterations > n_max:
        raise InternalInvariantError(
            f"{trace.iterations} improvement steps on a component "
            f"with {n_max} MAX vertices"
        )
    return trace.values


def _sorted_cycle_targets(
    game: Game, report: StructureReport, v: int
) -> list[int]:
    return sorted({s for s in game.succs[v] if (v, s) in report.cycle_arcs})


def _escape_targets(game: Game, report: StructureReport, v: int) -> list[int]:
    cyc = {s for s in game.succs[v] if (v, s) in report.cycle_arcs}
    return sorted(set(game.succs[v]) - cyc)


def _best_escape(game: Game, escapes: list[int], kind: VertexKind) -> int:
    # escapes are sinks: real ones or solved frontier vertices
    if kind is VertexKind.MAX:
        best = max(game.sink_value(s) for s in escapes)
    else:
        best = min(game.sink_value(s) for s in escapes)
    return min(s for s in escapes if game.sink_value(s) == best)


def _with_succs(game: Game, v: int, succs: tuple[int, ...]) -> Game:
    new_succs = list(game.succs)
    new_succs[v] = succs
    return game.replace(succs=tuple(new_succs))


def _opened(game: Game, report: StructureReport, v: int, kind: VertexKind) -> Game:
    escape = _best_escape(game, _escape_targets(game, report, v), kind)
    return _with_succs(game, v, (escape,))


def _greedy_choice(game: Game, w, v: int) -> int:
    if game.kinds[v] is VertexKind.MAX:
        best = max(w[s] for s in game.succs[v])
    else:
        best = min(w[s] for s in game.succs[v])
    return min(s for s in game.succs[v] if w[s] == best)


def closed_values(game: Game) -> ValueVector:
    """Values when every positional vertex keeps the play inside.

    With positional choices committed to their cycle arcs the play is a
    Markov chain that only leaves through the coin flips of AVE
    vertices.  Vertices that cannot reach an escape at all are worth 0.
    On a plain cycle the first AVE vertex is worth
    2^l/(2^l - 1) * sum over i of 2^(-i) * s_i, where s_1..s_l are the
    escape values in walk order; everything else unrolls from there.
    With forking AVE vertices each value is affine in the fork values,
    which solve an exact linear system with one row per fork.
    """
    report = analyze(game)
    if report.k_p:
        raise PreconditionError("positional fork vertices present")
    comp = _require_one_cycle_component(game, report)

    values: list[Fraction | None] = [None] * game.n
    for v in game.sink_vertices:
        values[v] = game.sink_value(v)
    if not comp:
        return tuple(values)

    forks = set(report.fork_average)
    walk_succ: dict[int, int] = {}
    escape_value: dict[int, Fraction] = {}
    for v in sorted(comp):
        if v in forks:
            continue
        targets = _sorted_cycle_targets(game, report, v)
        if len(targets) != 1:
            raise InternalInvariantError(
                f"vertex {v} has {len(targets)} cycle arcs in a fork-free walk"
            )
        walk_succ[v] = targets[0]
        if game.kinds[v] is VertexKind.AVE:
            rest = set(game.succs[v]) - {targets[0]}
            if rest:
                escape_value[v] = game.sink_value(rest.pop())

    # Vertices that reach an escape with positive probability; the
    # rest sit in a sink-free trap and are worth exactly 0.
    preds: dict[int, list[int]] = {v: [] for v in comp}
    for v in comp:
        outs = [walk_succ[v]] if v not in forks else _sorted_cycle_targets(game, report, v)
        for t in outs:
            preds[t].append(v)
    reaches = set(escape_value)
    stack = sorted(reaches)
    while stack:
        t = stack.pop()
        for p in preds[t]:
            if p not in reaches:
                reaches.add(p)
                stack.append(p)
    for v in comp - reaches:
        values[v] = ZERO

    # Affine form value(v) = c + gamma * value(fork): resolved by
    # walking forward to the first fork, or absolutely when the walk
    # ends in a value-0 trap or a fork-free cycle (the Eq-style case).
    affine: dict[int, tuple[Fraction, Fraction, int | None]] = {}
    for v in comp - reaches:
        affine[v] = (ZERO, ZERO, None)

    def resolve_chain(start: int) -> None:
        trail: list[int] = []
        on_trail: dict[int, int] = {}
        cur = start
        while True:
            if cur in forks:
                base = (ZERO, Fraction(1), cur)
                break
            if cur in affine:
                base = affine[cur]
                break
            if cur in on_trail:
                _assign_cycle_values(
                    game, trail[on_trail[cur]:], escape_value, values, affine
                )
                base = affine[cur]
                trail = trail[: on_trail[cur]]
                break
            on_trail[cur] = len(trail)
            trail.append(cur)
            cur = walk_succ[cur]
        for v in reversed(trail):
            s = escape_value.get(v)
            if s is None:
                affine[v] = base
            else:
                c, gamma, f = base
                base = (HALF * (s + c), HALF * gamma, f)
                affine[v] = base

    for v in sorted(comp & reaches):
        if v not in affine and v not in forks:
            resolve_chain(v)

    fork_list = sorted(forks & reaches)
    if fork_list:
        index = {f: i for i, f in enumerate(fork_list)}
        k = len(fork_list)
        matrix = [[ZERO] * k for _ in range(k)]
        rhs = [ZERO] * k
        for f in fork_list:
            i = index[f]
            matrix[i][i] = Fraction(1)
            for t in _sorted_cycle_targets(game, report, f):
                c, gamma, g = (ZERO, Fraction(1), t) if t in forks else affine[t]
                rhs[i] += HALF * c
                if g is not None and gamma:
                    matrix[i][index[g]] -= HALF * gamma
        fork_values = solve_linear_system(matrix, rhs)
        for f in fork_list:
            values[f] = fork_values[index[f]]
        for v, (c, gamma, f) in affine.items():
            if values[v] is None:
                values[v] = c + gamma * fork_values[index[f]] if gamma else c
    else:
        for v, (c, gamma, _) in affine.items():
            if values[v] is None:
                values[v] = c
    return tuple(values)


def _assign_cycle_values(
    game: Game,
    cycle: list[int],
    escape_value: dict[int, Fraction],
    values: list[Fraction | None],
    affine: dict[int, tuple[Fraction, Fraction, int | None]],
) -> None:
    """Exact values along one fork-free cycle, by integer recurrence.

    The cycle is given in walk order and contains at least one escaping
    AVE vertex (it is reachable from an escape, and its walk never
    leaves it).  Values share one denominator D = (2^l - 1) * q, so the
    whole pass is integer arithmetic; consecutive escape-free vertices
    share the same Fraction object.
    """
    starts = [v for v in cycle if v in escape_value]
    if not starts:
        raise InternalInvariantError("escape-free cycle classified as escaping")
    first = min(starts)
    at = cycle.index(first)
    cycle = cycle[at:] + cycle[:at]

    escapes = [escape_value[v] for v in cycle if v in escape_value]
    count = len(escapes)
    q = math.lcm(*(s.denominator for s in escapes))
    full = (1 << count) - 1
    denom = full * q
    m = 0
    for s in escapes:
        m = 2 * m + s.numerator * (q // s.denominator)

    first_m = m
    current = Fraction(m, denom)
    for i, v in enumerate(cycle):
        values[v] = current
        affine[v] = (current, ZERO, None)
        s = escape_value.get(v)
        if s is not None:
            m = 2 * m - s.numerator * (q // s.denominator) * full
            if i + 1 < len(cycle):
                current = Fraction(m, denom)
    if m != first_m:
        raise InternalInvariantError("cycle value recurrence did not close")


def solve_almost_acyclic_scc(game: Game) -> ValueVector:
    """Solve one strongly connected single cycle exactly.

    Try the all-closed values first; if they fail the local optimality
    equations, probe openings: solve the acyclic game with the
    smallest-id escaping MAX vertex opened, read off which MAX vertex
    that solution really opens first, open that one instead, and accept
    if the result is locally optimal in the original game.  Then the
    same on the MIN side.  For single cycles one of the three steps
    always lands.
    """
    report = analyze(game)
    if report.k_p or report.k_a:
        raise PreconditionError("component is not a single cycle")
    _require_one_cycle_component(game, report)
    w = closed_values(game)
    if check_local_optimality(game, w).satisfied:
        return w
    attempt = _single_cycle_probe(game, report, VertexKind.MAX)
    if attempt is not None:
        return attempt
    if not check_stopping(game).stopping:
        # play can stay on the cycle forever, so closed MIN choices cost
        # MIN nothing and the MIN probe should never have been reached
        raise InternalInvariantError(
            "MAX probe failed on a cycle that play never has to leave"
        )
    attempt = _single_cycle_probe(game, report, VertexKind.MIN)
    if attempt is not None:
        return attempt
    raise InternalInvariantError("single-cycle solver exhausted all branches")


def _single_cycle_probe(
    game: Game, report: StructureReport, kind: VertexKind
) -> ValueVector | None:
    walk_succ = {x: y for x, y in report.cycle_arcs}

    def can_open(v: int) -> bool:
        return game.kinds[v] is kind and bool(_escape_targets(game, report, v))

    openable = sorted(v for v in walk_succ if can_open(v))
    if not openable:
        return None
    x = openable[0]
    w1 = solve_acyclic(_opened(game, report, x, kind))

    y = x
    cur = walk_succ[x]
    while cur != x:
        if can_open(cur) and _greedy_choice(game, w1, cur) != walk_succ[cur]:
            y = cur
            break
        cur = walk_succ[cur]
    w2 = w1 if y == x else solve_acyclic(_opened(game, report, y, kind))
    if check_local_optimality(game, w2).satisfied:
        return w2
    return None


@dataclass(frozen=True)
class ForkBudget:
    """Recursion accounting for the fork solver.

    k_a is the average fork weight of the component currently being
    solved; descend() enforces that every opening strictly lowers it,
    which bounds the recursion depth by the initial weight plus one.
    """

    k_p: int
    k_a: int
    depth: int

    def descend(self, k_a: int) -> "ForkBudget":
        if k_a >= self.k_a or k_a < 0:
            raise InternalInvariantError(
                f"average fork weight went from {self.k_a} to {k_a}"
            )
        return ForkBudget(self.k_p, k_a, self.depth + 1)

    def at_component(self, k_a: int) -> "ForkBudget":
        if k_a > self.k_a:
            raise InternalInvariantError(
                f"component fork weight {k_a} exceeds its game's {self.k_a}"
            )
        return ForkBudget(self.k_p, k_a, self.depth)


def solve_fork_fpt(game: Game) -> ValueVector:
    """Solve a stopping game with few fork vertices.

    Per strongly connected component: enumerate the cycle-arc choices
    of positional fork vertices (2^{k_p} branches when binary), and
    within each branch recurse on the number of AVE forks by opening
    one vertex at a time, as described at _average_fork_component.  A
    candidate solution is accepted when it satisfies local optimality
    in the component, which on stopping games identifies the value
    vector exactly.
    """
    stopping = check_stopping(game)
    if not stopping.stopping:
        raise NotStoppingError(
            "game is not stopping; play can be confined to "
            f"{sorted(stopping.witness)}"
        )
    return solve_by_scc(game, _positional_fork_component)


def _positional_fork_component(cgame: Game) -> ValueVector:
    report = analyze(cgame)
    budget = ForkBudget(report.k_p, report.k_a, 0)
    forks = sorted(report.fork_positional)
    if not forks:
        return _fork_free_recursion(cgame, budget)
    pools = [_sorted_cycle_targets(cgame, report, v) for v in forks]
    for combo in itertools.product(*pools):
        sub = cgame
        for v, keep in zip(forks, combo):
            kept = tuple(
                s
                for s in sub.succs[v]
                if (v, s) not in report.cycle_arcs or s == keep
            )
            sub = _with_succs(sub, v, kept)
        w = _fork_free_recursion(sub, budget)
        if check_local_optimality(cgame, w).satisfied:
            return w
    raise InternalInvariantError("no positional fork resolution was optimal")


def _fork_free_recursion(game: Game, budget: ForkBudget) -> ValueVector:
    return solve_by_scc(
        game, lambda comp: _average_fork_component(comp, budget)
    )


def _average_fork_component(cgame: Game, budget: ForkBudget) -> ValueVector:
    """One strongly connected component with only AVE forks left.

    Base case: no forks means a single cycle.  Otherwise try the
    all-closed values; then for each side in turn, open the nearest
    escaping vertex strictly before a fork, solve the smaller game, and
    use its solution to nominate the few vertices that could be the
    truly optimal opening (the first opened vertices downstream of each
    fork).  Each nomination costs one recursive solve; local optimality
    in this component decides acceptance.
    """
    report = analyze(cgame)
    if report.k_p:
        raise InternalInvariantError("positional fork inside the fork-free recursion")
    if report.k_a == 0:
        return solve_almost_acyclic_scc(cgame)
    budget = budget.at_component(report.k_a)
    w = closed_values(cgame)
    if check_local_optimality(cgame, w).satisfied:
        return w
    for kind in (VertexKind.MAX, VertexKind.MIN):
        found = _fork_opening_pass(cgame, report, kind, budget)
        if found is not None:
            return found
    raise InternalInvariantError("average fork recursion found no optimal opening")


def _fork_opening_pass(
    cgame: Game, report: StructureReport, kind: VertexKind, budget: ForkBudget
) -> ValueVector | None:
    forks = sorted(report.fork_average)
    fork_set = set(forks)

    def can_open(v: int) -> bool:
        return cgame.kinds[v] is kind and bool(_escape_targets(cgame, report, v))

    cycle_preds: dict[int, list[int]] = {}
    for a, b in report.cycle_arcs:
        cycle_preds.setdefault(b, []).append(a)

    opener = None
    for f in forks:
        seen = {f}
        frontier = [f]
        while frontier and opener is None:
            layer: list[int] = []
            for v in frontier:
                for p in sorted(cycle_preds.get(v, ())):
                    if p not in seen and p not in fork_set:
                        seen.add(p)
                        layer.append(p)
            for p in sorted(layer):
                if can_open(p):
                    opener = p
                    break
            frontier = layer
        if opener is not None:
            break
    if opener is None:
        return None

    sub1 = _opened(cgame, report, opener, kind)
    w1 = _fork_free_recursion(sub1, budget.descend(analyze(sub1).k_a))
    if check_local_optimality(cgame, w1).satisfied:
        return w1

    # vertices the sub-solution actually opens
    opened = set()
    for v in sorted(cgame.vertices_of(kind)):
        sub_succs = sub1.succs[v]
        if cgame.kinds[v] is VertexKind.MAX:
            best = max(w1[s] for s in sub_succs)
        else:
            best = min(w1[s] for s in sub_succs)
        choice = min(s for s in sub_succs if w1[s] == best)
        if (v, choice) not in report.cycle_arcs:
            opened.add(v)

    walk_succ: dict[int, int] = {}
    for v in range(cgame.n):
        if cgame.is_sink(v) or v in fork_set:
            continue
        targets = _sorted_cycle_targets(cgame, report, v)
        if targets:
            walk_succ[v] = targets[0]

    candidates: list[int] = []
    for f in forks:
        for start in _sorted_cycle_targets(cgame, report, f):
            cur = start
            steps = 0
            while cur not in fork_set and steps <= cgame.n:
                if cur in opened:
                    if cur not in candidates:
                        candidates.append(cur)
                    break
                nxt = walk_succ.get(cur)
                if nxt is None:
                    break
                cur = nxt
                steps += 1

    for c in candidates:
        if c == opener:
            continue
        sub = _opened(cgame, report, c, kind)
        w = _fork_free_recursion(sub, budget.descend(analyze(sub).k_a))
        if check_local_optimality(cgame, w).satisfied:
            return w
    return None
