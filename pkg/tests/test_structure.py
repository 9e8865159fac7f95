"""Component decomposition, cycle arcs, fork counting, feedback sets."""

from fractions import Fraction

import pytest

from helpers import game_stream
from ssg.errors import PreconditionError
from ssg.model import game_of
from ssg.structure import (
    analyze,
    component_game,
    feedback_vertex_set,
    is_feedback_set,
    scc_subgames,
    strongly_connected_components,
)


def layered_game():
    return game_of([
        ("max", 1, 2),
        ("min", 0, 3),
        ("ave", 3, 4),
        ("ave", 2, 4),
        ("sink", Fraction(1, 2)),
    ])


def test_components_come_successors_first():
    g = layered_game()
    comps = strongly_connected_components(g)
    assert [sorted(c) for c in comps] == [[4], [2, 3], [0, 1]]


def test_self_loop_and_sink_components():
    g = game_of([("max", 0, 1), ("sink", 1)])
    comps = strongly_connected_components(g)
    assert [sorted(c) for c in comps] == [[1], [0]]
    report = analyze(g)
    assert report.component_of[0] != report.component_of[1]
    # the self-loop makes {0} cyclic
    assert (0, 0) in report.cycle_arcs


def test_cycle_arcs_exclude_escapes():
    g = layered_game()
    report = analyze(g)
    assert (2, 3) in report.cycle_arcs and (3, 2) in report.cycle_arcs
    assert (2, 4) not in report.cycle_arcs
    assert (0, 1) in report.cycle_arcs and (1, 0) in report.cycle_arcs
    assert (0, 2) not in report.cycle_arcs and (1, 3) not in report.cycle_arcs


def test_fork_counts_on_two_cycle_structure():
    g = game_of([
        ("ave", 1, 3),
        ("max", 2, 4),
        ("max", 3, 5),
        ("ave", 0, 1),
        ("sink", Fraction(1, 2)),
        ("sink", 1),
    ])
    report = analyze(g)
    assert report.k_p == 0
    assert report.k_a == 2
    assert dict(report.fork_average) == {0: 2, 3: 2}
    assert report.fork_positional == {}
    assert not report.is_almost_acyclic
    assert not report.is_acyclic


def test_fork_counts_positional():
    g = game_of([
        ("max", 1, 2),
        ("ave", 0, 3),
        ("ave", 0, 4),
        ("sink", Fraction(1, 3)),
        ("sink", Fraction(2, 3)),
    ])
    report = analyze(g)
    assert dict(report.fork_positional) == {0: 2}
    assert report.k_p == 1 and report.k_a == 0
    assert not report.is_max_acyclic
    assert report.is_min_acyclic


def test_acyclic_flags():
    g = game_of([("ave", 1, 2), ("max", 2, 2), ("sink", 1)])
    report = analyze(g)
    assert report.is_acyclic
    assert report.is_pos_acyclic and report.is_almost_acyclic
    assert report.is_max_acyclic and report.is_min_acyclic
    assert report.cycle_arcs == frozenset()
    assert report.k_p == 0 and report.k_a == 0


def test_max_acyclic_flag():
    g = game_of([
        ("max", 1, 3),
        ("min", 2, 4),
        ("max", 0, 5),
        ("sink", Fraction(1, 2)),
        ("sink", Fraction(1, 4)),
        ("sink", 1),
    ])
    report = analyze(g)
    assert report.is_max_acyclic
    assert not report.is_acyclic


def test_component_game_keeps_ids_and_converts_boundary():
    g = layered_game()
    solved = {2: Fraction(1, 3), 3: Fraction(1, 2)}
    sub = component_game(g, (0, 1), solved)
    assert sub.n == g.n
    assert sub.is_sink(2) and sub.sink_value(2) == Fraction(1, 3)
    assert sub.succs[0] == g.succs[0]
    # sinks outside the boundary mapping keep their own value
    assert sub.is_sink(4) and sub.sink_value(4) == Fraction(1, 2)
    # non-sink vertices without a boundary value become 0 placeholders
    bare = component_game(g, (0, 1))
    assert bare.is_sink(3) and bare.sink_value(3) == 0


def test_scc_subgames_order_matches_components():
    g = layered_game()
    report = analyze(g)
    pairs = list(scc_subgames(g))
    assert [c for c, _ in pairs] == list(report.components)


def test_feedback_vertex_set_single_cycle():
    g = game_of([("max", 1, 2), ("min", 0, 2), ("sink", 1)])
    fvs = feedback_vertex_set(g)
    assert fvs == (0,)
    assert is_feedback_set(g, fvs)
    assert not is_feedback_set(g, ())


def test_feedback_vertex_set_two_disjoint_cycles():
    g = game_of([
        ("max", 1, 4),
        ("min", 0, 4),
        ("max", 3, 4),
        ("min", 2, 4),
        ("sink", 1),
    ])
    fvs = feedback_vertex_set(g)
    assert len(fvs) == 2
    assert is_feedback_set(g, fvs)
    assert feedback_vertex_set(g, 1) is None


def test_feedback_vertex_set_empty_for_dag():
    g = game_of([("max", 1, 2), ("ave", 2, 2), ("sink", 0)])
    assert feedback_vertex_set(g) == ()


def test_feedback_prefers_small_ids_deterministically():
    for g in game_stream(25, seed=23):
        a = feedback_vertex_set(g)
        b = feedback_vertex_set(g)
        assert a == b
        assert is_feedback_set(g, a)
