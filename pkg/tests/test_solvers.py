"""Component-based exact solvers, from acyclic games up to fork games."""

from fractions import Fraction

import pytest

from helpers import closed_profile, game_stream, hand_system
from ssg.errors import InternalInvariantError, NotStoppingError, PreconditionError
from ssg.evaluation import evaluate
from ssg.generate import Family
from ssg.model import VertexKind, game_of
from ssg.oracle import oracle_solve
from ssg.solvers import (
    ForkBudget,
    closed_values,
    solve_acyclic,
    solve_almost_acyclic_scc,
    solve_by_scc,
    solve_fork_fpt,
    solve_max_acyclic_scc,
)
from ssg.structure import analyze


F = Fraction


def two_ave_cycle():
    return game_of([("ave", 1, 2), ("ave", 0, 3), ("sink", 0), ("sink", 1)])


def ave_fork_triangle():
    return game_of([
        ("ave", 1, 2),
        ("ave", 0, 4),
        ("ave", 0, 5),
        ("sink", 0),
        ("sink", F(1, 4)),
        ("sink", F(3, 4)),
    ])


# --- acyclic -----------------------------------------------------------


def test_solve_acyclic_caterpillar():
    g = game_of([
        ("ave", 1, 4),
        ("ave", 2, 4),
        ("ave", 3, 4),
        ("sink", 1),
        ("sink", 0),
    ])
    values = solve_acyclic(g)
    assert values[0] == F(1, 8)
    assert values[1] == F(1, 4)
    assert values[2] == F(1, 2)


def test_solve_acyclic_refuses_cycles():
    with pytest.raises(PreconditionError):
        solve_acyclic(two_ave_cycle())


def test_solve_acyclic_matches_oracle():
    for g in game_stream(30, family=Family.ACYCLIC, seed=41):
        assert solve_acyclic(g) == oracle_solve(g).values


# --- componentwise driver ----------------------------------------------


def test_solve_by_scc_layers_component_values():
    g = game_of([
        ("max", 1, 2),
        ("min", 0, 3),
        ("ave", 3, 4),
        ("ave", 2, 4),
        ("sink", F(1, 2)),
    ])
    values = solve_by_scc(g, solve_almost_acyclic_scc)
    assert values == oracle_solve(g).values


def test_solve_by_scc_rejects_dishonest_component_values():
    g = two_ave_cycle()

    def wrong(cgame):
        return tuple(F(1) for _ in range(cgame.n))

    with pytest.raises(InternalInvariantError):
        solve_by_scc(g, wrong)


# --- closed evaluation --------------------------------------------------


def test_closed_values_two_ave_cycle():
    values = closed_values(two_ave_cycle())
    assert values[0] == F(1, 3)
    assert values[1] == F(2, 3)


def test_closed_values_fork_system():
    values = closed_values(ave_fork_triangle())
    assert values[0] == F(1, 2)
    assert values[1] == F(3, 8)
    assert values[2] == F(5, 8)


def test_closed_values_zero_trap():
    g = game_of([("min", 0, 1), ("sink", 1)])
    values = closed_values(g)
    assert values[0] == 0
    assert values[1] == 1


def test_closed_values_rejects_positional_forks():
    g = game_of([
        ("max", 1, 2),
        ("ave", 0, 3),
        ("ave", 0, 4),
        ("sink", F(1, 3)),
        ("sink", F(2, 3)),
    ])
    with pytest.raises(PreconditionError):
        closed_values(g)


def test_closed_values_match_hand_system_and_evaluation():
    checked = 0
    for g in game_stream(60, family=Family.SINGLE_CYCLE, min_n=3, max_n=14, seed=43):
        report = analyze(g)
        values = closed_values(g)
        sigma, tau = closed_profile(g, report)
        assert evaluate(g, sigma, tau) == values
        cycle = sorted({v for v, _ in report.cycle_arcs})
        escaping = any(
            g.kinds[v] is VertexKind.AVE
            and any(g.is_sink(s) for s in g.succs[v])
            for v in cycle
        )
        if escaping:
            sol = hand_system(g, report)
            assert all(values[v] == sol[v] for v in cycle)
            checked += 1
        else:
            assert all(values[v] == 0 for v in cycle)
    assert checked >= 20


# --- single strongly connected cycles ------------------------------------


def test_almost_acyclic_closed_case():
    values = solve_almost_acyclic_scc(two_ave_cycle())
    assert values[0] == F(1, 3) and values[1] == F(2, 3)


def test_almost_acyclic_max_stays_on_cycle():
    g = game_of([("max", 1, 2), ("ave", 0, 3), ("sink", F(1, 2)), ("sink", 1)])
    values = solve_almost_acyclic_scc(g)
    assert values[0] == 1 and values[1] == 1


def test_almost_acyclic_max_opens():
    g = game_of([("max", 1, 2), ("ave", 0, 3), ("sink", F(1, 2)), ("sink", 0)])
    values = solve_almost_acyclic_scc(g)
    # staying on the cycle is worth 1/4 at the fork, leaving pays 1/2
    assert values[0] == F(1, 2)
    assert values[1] == F(1, 4)


def test_almost_acyclic_min_opens():
    g = game_of([("min", 1, 2), ("ave", 0, 3), ("sink", F(1, 2)), ("sink", 1)])
    values = solve_almost_acyclic_scc(g)
    assert values[0] == F(1, 2)
    assert values[1] == F(3, 4)


def test_almost_acyclic_rejects_forks():
    with pytest.raises(PreconditionError):
        solve_almost_acyclic_scc(ave_fork_triangle())


def test_almost_acyclic_rejects_disconnected_cycles():
    g = game_of([
        ("max", 0, 1),
        ("min", 1, 2),
        ("sink", F(1, 2)),
    ])
    with pytest.raises(PreconditionError):
        solve_almost_acyclic_scc(g)


def test_almost_acyclic_matches_oracle():
    for g in game_stream(40, family=Family.SINGLE_CYCLE, min_n=3, max_n=10, seed=47):
        report = analyze(g)
        if report.k_p or report.k_a:
            continue
        values = solve_by_scc(g, solve_almost_acyclic_scc)
        assert values == oracle_solve(g).values


# --- strongly connected, MAX never forks ---------------------------------


def test_max_acyclic_frozen():
    g = game_of([
        ("max", 1, 3),
        ("min", 2, 4),
        ("max", 0, 5),
        ("sink", F(1, 2)),
        ("sink", F(1, 4)),
        ("sink", 1),
    ])
    values = solve_max_acyclic_scc(g)
    assert values[0] == F(1, 2)
    assert values[1] == F(1, 4)
    assert values[2] == 1


def test_max_acyclic_rejects_max_forks():
    g = game_of([
        ("max", 1, 2),
        ("ave", 0, 3),
        ("ave", 0, 4),
        ("sink", F(1, 3)),
        ("sink", F(2, 3)),
    ])
    with pytest.raises(PreconditionError):
        solve_max_acyclic_scc(g)


def test_max_acyclic_matches_oracle():
    for g in game_stream(30, family=Family.MAX_ACYCLIC, min_n=4, max_n=8, seed=53):
        values = solve_by_scc(g, solve_max_acyclic_scc)
        assert values == oracle_solve(g).values


# --- few forks of either kind --------------------------------------------


def test_fork_fpt_positional_fork():
    g = game_of([
        ("max", 1, 2),
        ("ave", 0, 3),
        ("ave", 0, 4),
        ("sink", F(1, 3)),
        ("sink", F(2, 3)),
    ])
    values = solve_fork_fpt(g)
    assert values[0] == F(2, 3)
    assert values[1] == F(1, 2)
    assert values[2] == F(2, 3)


def test_fork_fpt_average_fork():
    g = game_of([
        ("ave", 1, 2),
        ("max", 0, 4),
        ("ave", 0, 5),
        ("sink", F(1, 2)),
        ("sink", 1),
        ("sink", 0),
    ])
    values = solve_fork_fpt(g)
    assert values[0] == F(2, 3)
    assert values[1] == 1
    assert values[2] == F(1, 3)


def test_fork_fpt_pure_average_forks():
    g = ave_fork_triangle()
    assert solve_fork_fpt(g) == closed_values(g)


def test_fork_fpt_requires_stopping():
    trap = game_of([("max", 2, 1), ("min", 3, 0), ("sink", 1), ("sink", 0)])
    with pytest.raises(NotStoppingError):
        solve_fork_fpt(trap)


def test_fork_fpt_matches_oracle_on_random_games():
    for g in game_stream(60, seed=59, stopping=True):
        assert solve_fork_fpt(g) == oracle_solve(g).values


def test_fork_budget_bookkeeping():
    b = ForkBudget(k_p=0, k_a=3, depth=0)
    down = b.descend(1)
    assert (down.k_a, down.depth) == (1, 1)
    with pytest.raises(InternalInvariantError):
        down.descend(1)
    with pytest.raises(InternalInvariantError):
        down.at_component(2)
    same = down.at_component(0)
    assert (same.k_a, same.depth) == (0, 1)
