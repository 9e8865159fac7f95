"""Shared corpus builders; everything is seeded and deterministic."""

from __future__ import annotations

import random
from fractions import Fraction

from ssg.evaluation import check_stopping, solve_linear_system
from ssg.generate import Family, GeneratorSpec, generate
from ssg.model import Game, Player, Strategy, VertexKind


def game_stream(
    count: int,
    family: Family = Family.RANDOM,
    min_n: int = 4,
    max_n: int = 8,
    seed: int = 0,
    stopping: bool | None = None,
    k: int = 1,
):
    """Deterministic list of generated games, optionally stopping-filtered."""
    games: list[Game] = []
    attempt = 0
    while len(games) < count:
        n = min_n + attempt % (max_n - min_n + 1)
        game = generate(
            GeneratorSpec(
                n=n, family=family, seed=seed * 1_000_003 + attempt, k=k
            )
        )
        attempt += 1
        if attempt > max(400, count * 400):
            raise RuntimeError("corpus filter rejected too many instances")
        if stopping is not None and check_stopping(game).stopping is not stopping:
            continue
        games.append(game)
    return games


def random_pair(game: Game, rng: random.Random) -> tuple[Strategy, Strategy]:
    """A uniformly random total positional strategy pair."""
    sigma = {v: rng.choice(game.succs[v]) for v in game.max_vertices}
    tau = {v: rng.choice(game.succs[v]) for v in game.min_vertices}
    return Strategy(Player.MAX, sigma), Strategy(Player.MIN, tau)


def all_pairs(game: Game):
    """Every total positional strategy pair, MAX-major order."""
    from ssg.oracle import enumerate_strategies

    for sigma in enumerate_strategies(game, Player.MAX):
        for tau in enumerate_strategies(game, Player.MIN):
            yield sigma, tau


def closed_profile(game: Game, report) -> tuple[Strategy, Strategy]:
    """Every positional vertex takes its smallest-id cycle arc."""
    max_choice, min_choice = {}, {}
    for v in game.positional_vertices:
        in_cycle = sorted(s for s in game.succs[v] if (v, s) in report.cycle_arcs)
        choice = in_cycle[0] if in_cycle else min(game.succs[v])
        if game.kinds[v] is VertexKind.MAX:
            max_choice[v] = choice
        else:
            min_choice[v] = choice
    return Strategy(Player.MAX, max_choice), Strategy(Player.MIN, min_choice)


def hand_system(game: Game, report) -> dict[int, Fraction]:
    """Cycle values written out as a plain linear system."""
    cycle = sorted({v for v, _ in report.cycle_arcs})
    index = {v: i for i, v in enumerate(cycle)}
    matrix = [[Fraction(0)] * len(cycle) for _ in cycle]
    rhs = [Fraction(0)] * len(cycle)
    for v in cycle:
        i = index[v]
        matrix[i][i] += Fraction(1)
        if game.kinds[v] is VertexKind.AVE:
            succs = game.succs[v]
            share = Fraction(1, 2)
        else:
            succs = [min(s for s in game.succs[v] if (v, s) in report.cycle_arcs)]
            share = Fraction(1)
        for s in succs:
            if game.is_sink(s):
                rhs[i] += share * game.sink_value(s)
            else:
                matrix[i][index[s]] -= share
    sol = solve_linear_system(matrix, rhs)
    return {v: sol[index[v]] for v in cycle}
