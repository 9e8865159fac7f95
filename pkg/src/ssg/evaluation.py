"""Exact evaluation of strategy pairs and one-player best responses.

Fixing a pure stationary strategy for each player turns the game into
an absorbing Markov chain, and every vertex value is the expected value
of the sink the chain gets absorbed in.  Evaluation is exact: first the
vertices of value zero are peeled off by a fixpoint (they are the ones
that never reach a positive sink), the surviving positional vertices
forward deterministically to the next branching vertex, and the values
of the branching AVE vertices solve a linear system over the rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import (
    InternalInvariantError,
    InvalidStrategyError,
    PreconditionError,
)
from .model import (
    Game,
    Player,
    Strategy,
    StrategyPair,
    ValueVector,
    VertexKind,
    check_strategy,
)

ZERO = Fraction(0)
HALF = Fraction(1, 2)


def _require_total(game: Game, sigma: Strategy, tau: Strategy) -> None:
    if sigma.owner is not Player.MAX or tau.owner is not Player.MIN:
        raise InvalidStrategyError("evaluate expects (MAX strategy, MIN strategy)")
    check_strategy(game, sigma)
    check_strategy(game, tau)
    if not sigma.is_total_for(game):
        raise InvalidStrategyError("MAX strategy does not cover every MAX vertex")
    if not tau.is_total_for(game):
        raise InvalidStrategyError("MIN strategy does not cover every MIN vertex")


def _chosen(game: Game, sigma: Strategy, tau: Strategy, v: int) -> int:
    if game.kinds[v] is VertexKind.MAX:
        return sigma[v]
    return tau[v]


def zero_set(game: Game, sigma: Strategy, tau: Strategy) -> frozenset[int]:
    """Vertices of value exactly zero under the fixed pair.

    A vertex has value zero iff, in the chain induced by the pair, it
    cannot reach a positive-value sink.  Computed as a removal fixpoint
    on the complement: start from everything except positive sinks, drop
    an AVE vertex once either successor has been dropped and a
    positional vertex once its chosen successor has been dropped.
    """
    _require_total(game, sigma, tau)
    in_z = [True] * game.n
    stack = []
    for v in game.sink_vertices:
        if game.sink_value(v) > 0:
            in_z[v] = False
            stack.append(v)

    # Reverse adjacency of the arcs the pair actually uses.
    preds: list[list[int]] = [[] for _ in range(game.n)]
    for v in range(game.n):
        kind = game.kinds[v]
        if kind is VertexKind.SINK:
            continue
        if kind is VertexKind.AVE:
            for s in game.succs[v]:
                preds[s].append(v)
        else:
            preds[_chosen(game, sigma, tau, v)].append(v)

    while stack:
        u = stack.pop()
        for p in preds[u]:
            if in_z[p]:
                in_z[p] = False
                stack.append(p)
    return frozenset(v for v in range(game.n) if in_z[v])


def solve_linear_system(
    matrix: list[list[Fraction]], rhs: list[Fraction]
) -> list[Fraction]:
    """Solve A x = b exactly by Gaussian elimination.

    Pivoting picks, within the current column, the row whose entry has
    the largest numerator in absolute value (smallest row index on
    ties); with exact rationals this is purely for determinism.
    Raises InternalInvariantError on a singular matrix.
    """
    k = len(matrix)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(k):
        pivot_row = -1
        pivot_size = -1
        for i in range(col, k):
            entry = a[i][col]
            if entry:
                size = abs(entry.numerator)
                if size > pivot_size:
                    pivot_row, pivot_size = i, size
        if pivot_row < 0:
            raise InternalInvariantError("singular linear system")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
        pivot = a[col][col]
        for i in range(col + 1, k):
            factor = a[i][col]
            if factor:
                factor /= pivot
                row_i, row_c = a[i], a[col]
                for j in range(col, k + 1):
                    if row_c[j]:
                        row_i[j] -= factor * row_c[j]
    x = [ZERO] * k
    for i in range(k - 1, -1, -1):
        acc = a[i][k]
        row = a[i]
        for j in range(i + 1, k):
            if row[j]:
                acc -= row[j] * x[j]
        x[i] = acc / row[i]
    return x


def evaluate(game: Game, sigma: Strategy, tau: Strategy) -> ValueVector:
    """Exact vertex values under a total strategy pair.

    Sinks keep their value, zero-set vertices get 0, the remaining
    positional vertices take the value of the first branching vertex
    their deterministic walk reaches, and the branching AVE values solve
    an exact linear system (one equation per AVE vertex: its value is
    the half-sum of its successors' values).
    """
    z = zero_set(game, sigma, tau)
    n = game.n

    # Forward target of the deterministic part of the chain: positional
    # vertices follow their chosen arc, an AVE vertex whose two arcs
    # coincide is a mere pass-through.
    def step(v: int) -> int | None:
        kind = game.kinds[v]
        if kind is VertexKind.SINK:
            return None
        if kind is VertexKind.AVE:
            s1, s2 = game.succs[v]
            return s1 if s1 == s2 else None
        return _chosen(game, sigma, tau, v)

    # resolved[v] is the sink / branching AVE / zero vertex the walk
    # from v reaches.  Walks cannot cycle outside the zero set: a
    # deterministic sink-free loop never reaches a positive sink.
    resolved: list[int | None] = [None] * n
    for v in range(n):
        if resolved[v] is not None or v in z:
            continue
        trail = []
        cur = v
        while cur not in z and resolved[cur] is None and step(cur) is not None:
            trail.append(cur)
            cur = step(cur)
        if resolved[cur] is not None:
            cur = resolved[cur]
        for u in trail:
            if u not in z:
                resolved[u] = cur

    def anchor(v: int) -> int:
        if v in z:
            return v
        r = resolved[v]
        return v if r is None else r

    unknowns = [
        v
        for v in range(n)
        if v not in z
        and game.kinds[v] is VertexKind.AVE
        and game.succs[v][0] != game.succs[v][1]
    ]
    index = {v: i for i, v in enumerate(unknowns)}
    k = len(unknowns)
    if k:
        matrix = [[ZERO] * k for _ in range(k)]
        rhs = [ZERO] * k
        for v in unknowns:
            i = index[v]
            matrix[i][i] = Fraction(1)
            for s in game.succs[v]:
                t = anchor(s)
                if t in z:
                    continue
                if game.kinds[t] is VertexKind.SINK:
                    rhs[i] += HALF * game.sink_value(t)
                else:
                    matrix[i][index[t]] -= HALF
        solution = solve_linear_system(matrix, rhs)
    else:
        solution = []

    values: list[Fraction] = [ZERO] * n
    for v in range(n):
        if v in z:
            continue
        t = anchor(v)
        if game.kinds[t] is VertexKind.SINK:
            values[v] = game.sink_value(t)
        else:
            values[v] = solution[index[t]]
    return tuple(values)


@dataclass(frozen=True)
class Violation:
    vertex: int
    expected: Fraction
    found: Fraction


@dataclass(frozen=True)
class OptimalityReport:
    satisfied: bool
    violations: tuple[Violation, ...]


def one_step_value(game: Game, w: ValueVector, v: int) -> Fraction:
    """Value the local optimality equations demand at one vertex."""
    kind = game.kinds[v]
    if kind is VertexKind.SINK:
        return game.sink_value(v)
    if kind is VertexKind.AVE:
        s1, s2 = game.succs[v]
        return HALF * (w[s1] + w[s2])
    if kind is VertexKind.MAX:
        return max(w[s] for s in game.succs[v])
    return min(w[s] for s in game.succs[v])


def check_local_optimality(game: Game, w: ValueVector) -> OptimalityReport:
    """Check the local optimality equations at every vertex.

    MAX vertices must equal the maximum over successors, MIN the
    minimum, AVE the half-sum of its two successors, sinks their own
    value.  In a stopping game these equations pin down the value
    vector uniquely.
    """
    if len(w) != game.n:
        raise PreconditionError("value vector length differs from vertex count")
    violations = []
    for v in range(game.n):
        expected = one_step_value(game, w, v)
        if w[v] != expected:
            violations.append(Violation(v, expected, w[v]))
    return OptimalityReport(not violations, tuple(violations))


def greedy_strategies(game: Game, w: ValueVector) -> StrategyPair:
    """Strategy pair reading the argmax/argmin out of a locally optimal w.

    Ties go to the smallest successor id.  Refuses a w that is not
    locally optimal, because the greedy readout is only meaningful
    there.
    """
    report = check_local_optimality(game, w)
    if not report.satisfied:
        raise PreconditionError(
            f"value vector violates local optimality at {len(report.violations)} vertices"
        )
    sigma = {}
    for v in game.max_vertices:
        best = max(w[s] for s in game.succs[v])
        sigma[v] = min(s for s in game.succs[v] if w[s] == best)
    tau = {}
    for v in game.min_vertices:
        best = min(w[s] for s in game.succs[v])
        tau[v] = min(s for s in game.succs[v] if w[s] == best)
    return StrategyPair(Strategy(Player.MAX, sigma), Strategy(Player.MIN, tau))


def _min_zero_region(game: Game, sigma: Strategy) -> frozenset[int]:
    """Vertices where MIN can force value 0 against the fixed sigma.

    Largest set without positive sinks such that AVE members keep both
    successors inside, MAX members have their sigma choice inside, and
    MIN members have at least one successor inside.  From such a set
    MIN confines the play forever, so its value is 0; outside it every
    MIN strategy leaks to a positive sink with positive probability.
    """
    n = game.n
    in_z = [True] * n
    stack = []
    for v in game.sink_vertices:
        if game.sink_value(v) > 0:
            in_z[v] = False
            stack.append(v)

    preds: list[list[int]] = [[] for _ in range(n)]
    out_count = [0] * n
    for v in range(n):
        kind = game.kinds[v]
        if kind is VertexKind.SINK:
            continue
        if kind is VertexKind.MAX:
            targets = [sigma[v]]
        else:
            targets = list(game.succs[v])
        for s in targets:
            preds[s].append(v)
        out_count[v] = len(targets)

    # MIN survives while it still has one arc inside; AVE and forced
    # MAX drop as soon as any of their arcs leaves.
    remaining = out_count[:]
    while stack:
        u = stack.pop()
        for p in preds[u]:
            if not in_z[p]:
                continue
            remaining[p] -= 1
            kind = game.kinds[p]
            if kind is VertexKind.MIN:
                if remaining[p] == 0:
                    in_z[p] = False
                    stack.append(p)
            else:
                in_z[p] = False
                stack.append(p)
    return frozenset(v for v in range(n) if in_z[v])


def _assert_monotone(
    old: ValueVector, new: ValueVector, switched: list[int], decreasing: bool
) -> None:
    for i, (a, b) in enumerate(zip(old, new)):
        ok = b <= a if decreasing else b >= a
        if not ok:
            raise InternalInvariantError(
                f"policy iteration lost monotonicity at vertex {i}: {a} -> {b}"
            )
    for v in switched:
        if decreasing:
            ok = new[v] < old[v]
        else:
            ok = new[v] > old[v]
        if not ok:
            raise InternalInvariantError(
                f"switched vertex {v} did not strictly improve: {old[v]} -> {new[v]}"
            )


class BestResponse(NamedTuple):
    strategy: Strategy
    values: ValueVector


def best_response_min(game: Game, sigma: Strategy) -> BestResponse:
    """Exact best response of MIN against a total MAX strategy.

    Returns a MIN strategy and the value vector that simultaneously
    minimises every vertex value.  Vertices where MIN can confine the
    play away from positive sinks are pinned to a confining arc first
    (their value is 0 and plain switching would never discover it);
    the rest is policy iteration, switching every improving MIN vertex
    each round, ties to the smallest successor id.  Each round strictly
    decreases the value vector, which bounds the number of rounds.
    """
    check_strategy(game, sigma)
    if not sigma.is_total_for(game):
        raise InvalidStrategyError("MAX strategy does not cover every MAX vertex")
    zero_region = _min_zero_region(game, sigma)
    choice = {}
    for v in game.min_vertices:
        if v in zero_region:
            choice[v] = min(s for s in game.succs[v] if s in zero_region)
        else:
            choice[v] = min(game.succs[v])
    free = [v for v in game.min_vertices if v not in zero_region]
    tau = Strategy(Player.MIN, choice)
    values = evaluate(game, sigma, tau)
    while True:
        switches = {}
        for v in free:
            best_val = min(values[s] for s in game.succs[v])
            if best_val < values[tau[v]]:
                switches[v] = min(s for s in game.succs[v] if values[s] == best_val)
        if not switches:
            return BestResponse(tau, values)
        tau = tau.updated(switches)
        new_values = evaluate(game, sigma, tau)
        _assert_monotone(values, new_values, sorted(switches), decreasing=True)
        values = new_values


def best_response_max(game: Game, tau: Strategy) -> BestResponse:
    """Exact best response of MAX against a total MIN strategy.

    Plain policy iteration suffices on the MAX side: a stalled strategy
    satisfies all MAX local equations, and since the value vector of a
    game is the least fixpoint of the one-step operator, stalling
    already certifies optimality.  Each round strictly increases the
    value vector.
    """
    check_strategy(game, tau)
    if not tau.is_total_for(game):
        raise InvalidStrategyError("MIN strategy does not cover every MIN vertex")
    sigma = Strategy(Player.MAX, {v: min(game.succs[v]) for v in game.max_vertices})
    values = evaluate(game, sigma, tau)
    while True:
        switches = {}
        for v in game.max_vertices:
            best_val = max(values[s] for s in game.succs[v])
            if best_val > values[sigma[v]]:
                switches[v] = min(s for s in game.succs[v] if values[s] == best_val)
        if not switches:
            return BestResponse(sigma, values)
        sigma = sigma.updated(switches)
        new_values = evaluate(game, sigma, tau)
        _assert_monotone(values, new_values, sorted(switches), decreasing=False)
        values = new_values


def confinement_set(game: Game) -> frozenset[int]:
    """Largest sink-free vertex set some strategy pair never leaves.

    Members satisfy: AVE vertices keep both successors in the set,
    positional vertices keep at least one.  The set is empty exactly
    when the game is stopping.
    """
    n = game.n
    alive = [not game.is_sink(v) for v in range(n)]
    preds: list[list[int]] = [[] for _ in range(n)]
    remaining = [0] * n
    for v in range(n):
        if not alive[v]:
            continue
        for s in game.succs[v]:
            preds[s].append(v)
        remaining[v] = len(game.succs[v])
    stack = [v for v in range(n) if not alive[v]]
    while stack:
        u = stack.pop()
        for p in preds[u]:
            if not alive[p]:
                continue
            remaining[p] -= 1
            if game.kinds[p] is VertexKind.AVE or remaining[p] == 0:
                alive[p] = False
                stack.append(p)
    return frozenset(v for v in range(n) if alive[v])


class StoppingReport(NamedTuple):
    stopping: bool
    witness: frozenset[int]


def check_stopping(game: Game) -> StoppingReport:
    """Whether every strategy pair reaches a sink almost surely.

    The witness is the largest sink-free set some pair can confine the
    play to; the game is stopping exactly when it is empty.
    """
    witness = confinement_set(game)
    return StoppingReport(not witness, witness)
