"""Plain-text game files.

Line 1 is the format header "ssg 1".  Every other non-blank line
describes one vertex: "<id> max|min <succ> <succ> ...",
"<id> ave <succ> <succ>", or "<id> sink <num>/<den>".  A "#" starts a
comment.  Ids must be dense starting at 0 but may appear in any order.
Serialization writes reduced fractions and ascending ids, and
parse(serialize(game)) reproduces the game bit-exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import InvalidGameError
from .model import Game, VertexKind, validate

HEADER = "ssg 1"

_RATIONAL = re.compile(r"^\d+(/\d+)?$")


def parse(text: str) -> Game:
    """Game described by the text; InvalidGameError names the bad line."""
    rows: dict[int, tuple[int, str, list[str]]] = {}
    header_seen = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if line != HEADER:
                raise InvalidGameError(
                    f"line {line_no}: expected header {HEADER!r}, found {line!r}"
                )
            header_seen = True
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise InvalidGameError(f"line {line_no}: expected '<id> <kind> ...'")
        try:
            vid = int(tokens[0])
        except ValueError:
            raise InvalidGameError(
                f"line {line_no}: vertex id {tokens[0]!r} is not an integer"
            ) from None
        if vid < 0:
            raise InvalidGameError(f"line {line_no}: negative vertex id {vid}")
        if vid in rows:
            raise InvalidGameError(
                f"line {line_no}: duplicate vertex id {vid} "
                f"(first defined on line {rows[vid][0]})"
            )
        rows[vid] = (line_no, tokens[1], tokens[2:])
    if not header_seen:
        raise InvalidGameError(f"line 1: missing header {HEADER!r}")
    if not rows:
        raise InvalidGameError("no vertex lines after the header")

    n = len(rows)
    for vid, (line_no, _, _) in sorted(rows.items()):
        if vid >= n:
            raise InvalidGameError(
                f"line {line_no}: vertex id {vid} leaves a gap "
                f"(ids must be 0..{n - 1})"
            )

    kinds: list[VertexKind] = []
    succs: list[tuple[int, ...]] = []
    values: list[Fraction | None] = []
    for vid in range(n):
        line_no, tag, rest = rows[vid]
        try:
            kind = VertexKind(tag)
        except ValueError:
            raise InvalidGameError(
                f"line {line_no}: unknown vertex kind {tag!r}"
            ) from None
        kinds.append(kind)
        if kind is VertexKind.SINK:
            if len(rest) != 1 or not _RATIONAL.match(rest[0]):
                raise InvalidGameError(
                    f"line {line_no}: sink lines are '<id> sink <num>/<den>'"
                )
            try:
                value = Fraction(rest[0])
            except ZeroDivisionError:
                raise InvalidGameError(
                    f"line {line_no}: zero denominator in {rest[0]!r}"
                ) from None
            if not 0 <= value <= 1:
                raise InvalidGameError(
                    f"line {line_no}: sink value {rest[0]} outside [0, 1]"
                )
            succs.append((vid,))
            values.append(value)
            continue
        if kind is VertexKind.AVE and len(rest) != 2:
            raise InvalidGameError(
                f"line {line_no}: average vertices take exactly two successors"
            )
        if not rest:
            raise InvalidGameError(f"line {line_no}: vertex {vid} has no successors")
        out: list[int] = []
        for token in rest:
            try:
                s = int(token)
            except ValueError:
                raise InvalidGameError(
                    f"line {line_no}: successor {token!r} is not an integer"
                ) from None
            if not 0 <= s < n:
                raise InvalidGameError(
                    f"line {line_no}: successor {s} is not a vertex id"
                )
            out.append(s)
        succs.append(tuple(out))
        values.append(None)
    game = Game(tuple(kinds), tuple(succs), tuple(values))
    validate(game)
    return game


def serialize(game: Game) -> str:
    """Canonical text for the game: header, ascending ids, reduced sinks."""
    lines = [HEADER]
    for v in range(game.n):
        kind = game.kinds[v]
        if kind is VertexKind.SINK:
            value = game.sink_value(v)
            lines.append(f"{v} sink {value.numerator}/{value.denominator}")
        else:
            arcs = " ".join(str(s) for s in game.succs[v])
            lines.append(f"{v} {kind.value} {arcs}")
    return "\n".join(lines) + "\n"
