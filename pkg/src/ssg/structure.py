"""Cycle structure analysis: SCCs, fork counts and feedback vertex sets.

The specialised solvers are all parameterised by how far a game is from
acyclic.  The measures live here: an arc is a *cycle arc* when it lies
on some cycle avoiding sinks (equivalently, both endpoints share a
strongly connected component that contains a cycle), and a vertex is a
*fork* when two or more of its arcs are cycle arcs.  The fork counts
k_p (positional) and k_a (average) weigh each fork by its surplus of
cycle arcs beyond the first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .model import Game, VertexKind, as_fraction

ZERO = Fraction(0)


def strongly_connected_components(game: Game) -> list[list[int]]:
    """Tarjan's algorithm, iterative so huge cycles don't hit the
    recursion limit.

    Sinks take no part in cycle structure: their self-loops are ignored
    and each sink comes out as its own singleton component.  Components
    are emitted successors-first: every arc leaving a component points
    into a component that appears earlier in the list.
    """
    n = game.n

    def arcs(v: int) -> tuple[int, ...]:
        return () if game.is_sink(v) else game.succs[v]

    UNSEEN = -1
    index = [UNSEEN] * n
    low = [0] * n
    on_stack = [False] * n
    scc_stack: list[int] = []
    components: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != UNSEEN:
            continue
        work = [(root, 0)]
        while work:
            v, child = work[-1]
            if child == 0:
                index[v] = low[v] = counter
                counter += 1
                scc_stack.append(v)
                on_stack[v] = True
            out = arcs(v)
            advanced = False
            while child < len(out):
                s = out[child]
                child += 1
                if index[s] == UNSEEN:
                    work[-1] = (v, child)
                    work.append((s, 0))
                    advanced = True
                    break
                if on_stack[s]:
                    low[v] = min(low[v], index[s])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    u = scc_stack.pop()
                    on_stack[u] = False
                    comp.append(u)
                    if u == v:
                        break
                comp.sort()
                components.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return components


@dataclass(frozen=True)
class StructureReport:
    """Everything the solver dispatch needs to know about cycles.

    Attributes:
        components: SCCs, successors-first (arcs leave a component only
            into earlier ones); sinks are singletons.
        component_of: component index of each vertex.
        cycle_arcs: set of (x, y) arcs lying on a sink-free cycle.
        fork_positional: positional vertices with >= 2 cycle arcs,
            mapped to their cycle-arc count (distinct targets).
        fork_average: same for AVE vertices.
        k_p / k_a: total surplus cycle arcs at positional / AVE forks.
        is_max_acyclic / is_min_acyclic: no MAX (resp. MIN) fork.
    """

    components: tuple[tuple[int, ...], ...]
    component_of: tuple[int, ...]
    cycle_arcs: frozenset[tuple[int, int]]
    fork_positional: Mapping[int, int]
    fork_average: Mapping[int, int]
    k_p: int
    k_a: int
    is_max_acyclic: bool
    is_min_acyclic: bool

    @property
    def is_acyclic(self) -> bool:
        return not self.cycle_arcs

    @property
    def is_pos_acyclic(self) -> bool:
        return not self.fork_positional

    @property
    def is_almost_acyclic(self) -> bool:
        return self.k_p == 0 and self.k_a == 0


def analyze(game: Game) -> StructureReport:
    """Compute the structure report of a game."""
    comps = strongly_connected_components(game)
    component_of = [0] * game.n
    for i, comp in enumerate(comps):
        for v in comp:
            component_of[v] = i

    cyclic_component = [len(c) > 1 for c in comps]
    for v in range(game.n):
        if not game.is_sink(v) and v in game.succs[v]:
            cyclic_component[component_of[v]] = True

    cycle_arcs = set()
    for v in range(game.n):
        if game.is_sink(v):
            continue
        for s in set(game.succs[v]):
            if (
                not game.is_sink(s)
                and component_of[s] == component_of[v]
                and cyclic_component[component_of[v]]
            ):
                cycle_arcs.add((v, s))

    out_count: dict[int, int] = {}
    for x, _ in cycle_arcs:
        out_count[x] = out_count.get(x, 0) + 1

    fork_positional = {
        v: c for v, c in sorted(out_count.items()) if c >= 2 and game.is_positional(v)
    }
    fork_average = {
        v: c
        for v, c in sorted(out_count.items())
        if c >= 2 and game.kinds[v] is VertexKind.AVE
    }
    return StructureReport(
        components=tuple(tuple(c) for c in comps),
        component_of=tuple(component_of),
        cycle_arcs=frozenset(cycle_arcs),
        fork_positional=fork_positional,
        fork_average=fork_average,
        k_p=sum(c - 1 for c in fork_positional.values()),
        k_a=sum(c - 1 for c in fork_average.values()),
        is_max_acyclic=all(
            game.kinds[v] is not VertexKind.MAX for v in fork_positional
        ),
        is_min_acyclic=all(
            game.kinds[v] is not VertexKind.MIN for v in fork_positional
        ),
    )


def component_game(
    game: Game, component: tuple[int, ...], boundary: Mapping[int, Fraction] | None = None
) -> Game:
    """Game where everything outside the component becomes a sink.

    Boundary values fill in the sinks the component's outgoing arcs now
    point at; vertices absent from the mapping get the placeholder 0.
    Vertex ids are untouched, so values computed on the result read
    back directly into the parent game.
    """
    boundary = boundary or {}
    inside = set(component)
    kinds = list(game.kinds)
    succs = list(game.succs)
    values = list(game.sink_values)
    for v in range(game.n):
        if v in inside:
            continue
        kinds[v] = VertexKind.SINK
        succs[v] = (v,)
        if game.is_sink(v):
            values[v] = boundary.get(v, game.sink_value(v))
        else:
            values[v] = as_fraction(boundary.get(v, ZERO))
    return Game(tuple(kinds), tuple(succs), tuple(values))


def scc_subgames(
    game: Game, boundary: Mapping[int, Fraction] | None = None
) -> list[tuple[tuple[int, ...], Game]]:
    """Induced game per SCC, ordered successors-first.

    Processing the list in order, each component only ever points at
    components already seen, so a solver can fill in real boundary
    values as it goes; without them the frontier sinks hold the
    placeholder 0.
    """
    report = analyze(game)
    return [
        (comp, component_game(game, comp, boundary)) for comp in report.components
    ]


def is_feedback_set(game: Game, vertices) -> bool:
    """Whether deleting the given vertices breaks every sink-free cycle."""
    removed = frozenset(vertices)
    keep = [v for v in range(game.n) if not game.is_sink(v)]
    succs = {
        v: [s for s in set(game.succs[v]) if not game.is_sink(s)] for v in keep
    }
    return _is_acyclic_after_removal(keep, succs, removed)


def _is_acyclic_after_removal(
    vertices: list[int], succs: dict[int, list[int]], removed: frozenset[int]
) -> bool:
    indeg = {v: 0 for v in vertices if v not in removed}
    for v in indeg:
        for s in succs[v]:
            if s in indeg:
                indeg[s] += 1
    queue = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for s in succs[v]:
            if s in indeg:
                indeg[s] -= 1
                if indeg[s] == 0:
                    queue.append(s)
    return seen == len(indeg)


def feedback_vertex_set(game: Game, k_max: int | None = None) -> tuple[int, ...] | None:
    """Smallest vertex set whose removal leaves the sink-free graph acyclic.

    Plain subset enumeration: sizes 0, 1, 2, ... up to k_max, subsets
    of each size in lexicographic id order, first hit wins.  Exact and
    deterministic; exponential in k_max, which is the point of the cap.
    Returns None when no set within the cap works.
    """
    vertices = [v for v in range(game.n) if not game.is_sink(v)]
    succs = {
        v: [s for s in set(game.succs[v]) if not game.is_sink(s)] for v in vertices
    }
    if k_max is None:
        k_max = len(vertices)
    for size in range(min(k_max, len(vertices)) + 1):
        for combo in itertools.combinations(vertices, size):
            if _is_acyclic_after_removal(vertices, succs, frozenset(combo)):
                return combo
    return None
