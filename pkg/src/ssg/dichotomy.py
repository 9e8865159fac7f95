"""Value search along a feedback vertex set.

Turning one vertex x into a sink of trial value v makes the rest of
the game easier to solve; the map f sending v to the one-step value at
x over the solved rest is monotone, and on stopping games its unique
fixed point is x's true value.  Bisection narrows an interval around
the fixed point until it contains a single rational with denominator
within the game's precision bound, and a Stern-Brocot walk names that
rational exactly.  Iterating the trick over a whole feedback vertex
set solves any stopping game whose cycles are covered by a few
vertices.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

from .errors import InternalInvariantError, NotStoppingError, PreconditionError
from .evaluation import check_local_optimality, check_stopping, one_step_value
from .model import Game, RationalLike, ValueVector, VertexKind, as_fraction, vertex_to_sink
from .solvers import solve_acyclic
from .structure import is_feedback_set

Subsolver = Callable[[Game], ValueVector]


def sink_denominator_lcm(game: Game) -> int:
    """Least common denominator of all sink values (1 when sink-free)."""
    return math.lcm(1, *(game.sink_value(v).denominator for v in game.sink_vertices))


def value_denominator_bound(game: Game) -> int:
    """An integer that every optimal value's denominator divides into.

    Optimal values are reached by some positional strategy pair, and
    evaluating a fixed pair keeps denominators within 6 to the power of
    half the AVE count, times the sinks' common denominator.
    """
    return 6 ** ((game.n_ave + 1) // 2) * sink_denominator_lcm(game)


def fixed_point_f(
    game: Game, x: int, v: RationalLike, subsolver: Subsolver = solve_acyclic
) -> Fraction:
    """One-step value at x when x is frozen to the trial value v.

    Solves the game with x turned into a v-sink, then plays one step
    from x over its original successors.  Monotone in v; its fixed
    point is x's optimal value whenever the game is stopping.
    """
    trial = vertex_to_sink(game, x, v)
    values = subsolver(trial)
    return one_step_value(game, values, x)


def dichotomy_solve(
    game: Game, x: int, subsolver: Subsolver = solve_acyclic
) -> ValueVector:
    """Solve a stopping game by bisecting on the value of one vertex.

    x should cover every cycle, so that the default DAG subsolver can
    handle the rest; any exact solver for the frozen games works.  The
    search interval shrinks below 1/bound^2, which pins down a unique
    candidate of denominator at most bound, and the candidate is
    verified to be a fixed point before the values are returned.
    """
    stopping = check_stopping(game)
    if not stopping.stopping:
        raise NotStoppingError(
            "game is not stopping; play can be confined to "
            f"{sorted(stopping.witness)}"
        )
    if game.is_sink(x):
        raise PreconditionError(f"vertex {x} is a sink")
    return _dichotomy_core(game, x, subsolver)


def _dichotomy_core(game: Game, x: int, subsolver: Subsolver) -> ValueVector:
    bound = value_denominator_bound(game)
    target_width = Fraction(1, bound * bound)
    lo, hi = Fraction(0), Fraction(1)
    while hi - lo > target_width:
        mid = (lo + hi) / 2
        values = subsolver(vertex_to_sink(game, x, mid))
        fm = one_step_value(game, values, x)
        if fm == mid:
            return _certified(game, values)
        if fm > mid:
            lo = mid
        else:
            hi = mid
    candidate = stern_brocot(lo, hi, bound)
    values = subsolver(vertex_to_sink(game, x, candidate))
    if one_step_value(game, values, x) != candidate:
        raise InternalInvariantError(
            f"no fixed point at the unique candidate {candidate} "
            f"in [{lo}, {hi}]"
        )
    return _certified(game, values)


def _certified(game: Game, values: ValueVector) -> ValueVector:
    values = tuple(values)
    outcome = check_local_optimality(game, values)
    if not outcome.satisfied:
        raise InternalInvariantError(
            "bisection result violates local optimality at "
            f"{[bad.vertex for bad in outcome.violations]}"
        )
    return values


def stern_brocot(lo: RationalLike, hi: RationalLike, max_denominator: int) -> Fraction:
    """The simplest rational in [lo, hi], walking the Stern-Brocot tree.

    Simplest means smallest denominator (smallest numerator breaking
    ties), and it is unique.  Runs in time logarithmic in the result's
    denominator by descending whole continued-fraction runs at once.
    Raises PreconditionError if even the simplest rational needs a
    denominator beyond max_denominator.
    """
    lo, hi = as_fraction(lo), as_fraction(hi)
    if lo < 0 or hi < lo:
        raise PreconditionError(f"invalid interval [{lo}, {hi}]")
    a_num, a_den = lo.numerator, lo.denominator
    b_num, b_den = hi.numerator, hi.denominator
    # result = (p0 * t + p1) / (q0 * t + q1) for the subtree's value t
    p0, p1, q0, q1 = 1, 0, 0, 1
    while True:
        t = -(-a_num // a_den)
        if t * b_den <= b_num:
            num, den = p0 * t + p1, q0 * t + q1
            break
        whole = a_num // a_den
        p0, p1 = p0 * whole + p1, p0
        q0, q1 = q0 * whole + q1, q0
        a_num, a_den, b_num, b_den = (
            b_den,
            b_num - whole * b_den,
            a_den,
            a_num - whole * a_den,
        )
    if den > max_denominator:
        raise PreconditionError(
            f"simplest rational {num}/{den} exceeds denominator {max_denominator}"
        )
    return Fraction(num, den)


def solve_feedback(
    game: Game, feedback: Sequence[int], subsolver: Subsolver = solve_acyclic
) -> ValueVector:
    """Solve a stopping game given a feedback vertex set.

    Feedback vertices are frozen one at a time in increasing id order;
    each level bisects on its vertex with the next level as subsolver,
    bottoming out in subsolver (the DAG solver by default, replaceable
    for instrumentation).  Refuses sets that leave a cycle uncovered
    and games that are not stopping.
    """
    xs = sorted(set(feedback))
    for x in xs:
        if not (0 <= x < game.n) or game.is_sink(x):
            raise PreconditionError(f"feedback vertex {x} is not a playable vertex")
    if not is_feedback_set(game, xs):
        raise PreconditionError("a cycle avoids the proposed feedback set")
    stopping = check_stopping(game)
    if not stopping.stopping:
        raise NotStoppingError(
            "game is not stopping; play can be confined to "
            f"{sorted(stopping.witness)}"
        )
    return _feedback_level(game, xs, subsolver)


def _feedback_level(game: Game, xs: list[int], subsolver: Subsolver) -> ValueVector:
    if not xs:
        return subsolver(game)
    return _dichotomy_core(
        game, xs[0], lambda sub: _feedback_level(sub, xs[1:], subsolver)
    )


def make_stopping(game: Game, m: int | None = None) -> Game:
    """A nearby stopping game with the same vertex ids.

    Every arc between playable vertices is routed through a fresh coin
    chain of length m that continues with probability one half per step
    and drops to a value-0 sink after m straight continues.  Original
    optimal values change by at most n / 2^m; the default m makes that
    smaller than the gap between any two candidate values, at the cost
    of a much bigger game.
    """
    if m is None:
        q0 = sink_denominator_lcm(game)
        m = max(1, 2 * game.n + (q0 - 1).bit_length())
    if m < 1:
        raise PreconditionError(f"chain length {m} must be positive")

    kinds = [game.kinds[v] for v in range(game.n)]
    succs = [list(game.succs[v]) for v in range(game.n)]
    values = [game.sink_values[v] for v in range(game.n)]

    zero = next(
        (v for v in game.sink_vertices if game.sink_value(v) == 0), None
    )
    if zero is None:
        zero = len(kinds)
        kinds.append(VertexKind.SINK)
        succs.append([zero])
        values.append(Fraction(0))

    for v in range(game.n):
        if game.is_sink(v):
            continue
        for slot, y in enumerate(game.succs[v]):
            if game.is_sink(y):
                continue
            head = len(kinds)
            for j in range(m):
                step = head + j
                onward = step + 1 if j + 1 < m else zero
                kinds.append(VertexKind.AVE)
                succs.append([onward, y])
                values.append(None)
            succs[v][slot] = head
    return Game(
        tuple(kinds), tuple(tuple(s) for s in succs), tuple(values)
    )


def precision_schedule(n_ave: int, q0: int, levels: int) -> tuple[int, ...]:
    """Denominator bounds for nested bisection levels, outermost first.

    Level i must pin values whose denominators reflect i+1 rounds of
    squaring: p_i = 6^((2^(i+1) - 1) * n_ave) * q0, so each level obeys
    p_next = p_i^2 * 6^n_ave / q0.  Useful for sizing worst-case work;
    the solver itself re-derives tighter bounds per level.
    """
    if n_ave < 0 or q0 < 1 or levels < 0:
        raise PreconditionError("schedule parameters out of range")
    schedule = [6 ** ((2 ** (i + 1) - 1) * n_ave) * q0 for i in range(levels)]
    for i in range(levels - 1):
        if schedule[i + 1] * q0 != schedule[i] ** 2 * 6**n_ave:
            raise InternalInvariantError("schedule recurrence failed")
    return tuple(schedule)
