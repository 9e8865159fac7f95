"""Exception hierarchy shared by all ssg modules.

Three failure classes matter to callers: bad input (the game or an
argument violates a documented precondition), a solver refusing an
instance outside its domain (e.g. a non-stopping game handed to an
algorithm whose proof needs the stopping property), and an internal
invariant breaking (always a bug, never the caller's fault).
"""

from __future__ import annotations


class GameError(Exception):
    """Base class for every error raised by this package."""


class InvalidGameError(GameError):
    """The game structure itself is malformed."""


class InvalidStrategyError(GameError):
    """A strategy names a vertex it does not own or an arc that is absent."""


class PreconditionError(GameError):
    """A solver refused an instance outside its documented domain."""


class NotStoppingError(PreconditionError):
    """The game is not stopping and the algorithm requires it."""


class InternalInvariantError(GameError):
    """A property the theory guarantees failed to hold at runtime."""
