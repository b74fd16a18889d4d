"""Generic exact game solving: memoized negamax over a small game contract.

Engines adapt themselves to `GameInterface`; the solver never inspects game
internals, only the contract.  Values are exact: a budget overrun raises, it
never degrades to a guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

WIN = "Win"
LOSS = "Loss"
DRAW = "Draw"

# Mover preference order, best first.  Draws exist only off the reduction
# paths (a structureless full Havannah board) but must not crash.
_ORDER = {WIN: 2, DRAW: 1, LOSS: 0}


class BudgetExceededError(RuntimeError):
    """Node budget exhausted before the value was proven."""


class GameInterface(Protocol):
    def initial_state(self): ...

    def legal_moves(self, state): ...

    def apply(self, state, move): ...

    def terminal_winner(self, state):
        """Winning player id if the game is over, else None.

        A terminal state with no winner (exhausted moves, no structure) is a
        draw; engines must make terminality detectable here, including the
        no-legal-moves case.
        """

    def is_terminal(self, state): ...

    def player_to_move(self, state): ...

    def key(self, state): ...


@dataclass(frozen=True)
class SolveResult:
    value: str
    pv: tuple
    nodes: int
    table_hits: int
    table_size: int


def _invert(value):
    if value == WIN:
        return LOSS
    if value == LOSS:
        return WIN
    return DRAW


def solve(game, state=None, move_filter=None, budget=10_000_000, use_table=True):
    """Exact value for the player to move, with principal variation.

    `move_filter(state, move)` restricts the tree when given; the value is
    then exact for the restricted game.  `budget` caps visited nodes.
    `use_table=False` disables the transposition table, for the memo
    cross-checks in the test suite.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    root = game.initial_state() if state is None else state
    memo = {}
    stats = {"nodes": 0, "hits": 0}

    def moves_of(state):
        ms = list(game.legal_moves(state))
        if move_filter is not None:
            ms = [m for m in ms if move_filter(state, m)]
        return ms

    def rec(state):
        key = game.key(state)
        if use_table:
            hit = memo.get(key)
            if hit is not None:
                stats["hits"] += 1
                return hit
        stats["nodes"] += 1
        if stats["nodes"] > budget:
            raise BudgetExceededError(f"solve exceeded {budget} nodes")
        if game.is_terminal(state):
            w = game.terminal_winner(state)
            if w is None:
                value = DRAW
            else:
                value = WIN if w == game.player_to_move(state) else LOSS
            out = (value, ())
        else:
            best = None
            for m in moves_of(state):
                child_value, child_pv = rec(game.apply(state, m))
                value = _invert(child_value)
                if best is None or _ORDER[value] > _ORDER[best[0]]:
                    best = (value, (m,) + child_pv)
                if value == WIN:
                    break
            out = best if best is not None else (LOSS, ())
        if use_table:
            memo[key] = out
        return out

    value, pv = rec(root)
    return SolveResult(value, tuple(pv), stats["nodes"], stats["hits"], len(memo))


def proven_win(game, state, plies, memo=None):
    """(True, line) iff the player to move forces a win within `plies` plies.

    Conservative at the horizon: running out of depth proves nothing.
    """
    memo = {} if memo is None else memo

    def win(state, k):
        if game.is_terminal(state):
            w = game.terminal_winner(state)
            return (w == game.player_to_move(state), ())
        if k <= 0:
            return (False, ())
        key = (game.key(state), k, True)
        hit = memo.get(key)
        if hit is not None:
            return hit
        out = (False, ())
        for m in game.legal_moves(state):
            ok, line = lose(game.apply(state, m), k - 1)
            if ok:
                out = (True, (m,) + line)
                break
        memo[key] = out
        return out

    def lose(state, k):
        # Proven loss for the player to move: every reply loses, terminality
        # included; an open horizon leaves it unproven.
        if game.is_terminal(state):
            w = game.terminal_winner(state)
            return (w is not None and w != game.player_to_move(state), ())
        if k <= 0:
            return (False, ())
        key = (game.key(state), k, False)
        hit = memo.get(key)
        if hit is not None:
            return hit
        out = (True, ())
        for m in game.legal_moves(state):
            ok, line = win(game.apply(state, m), k - 1)
            if not ok:
                out = (False, ())
                break
            if len(line) + 1 > len(out[1]):
                out = (True, (m,) + line)
        memo[key] = out
        return out

    return win(state, plies)


def refute(game, state, claim, bound):
    """A line proving `claim` loses within `bound` plies, or None.

    The line is the refuter's forced win after `claim` is played; absence
    means no proof within the bound, not that the claim is sound.
    """
    if claim not in set(game.legal_moves(state)):
        raise ValueError(f"claim {claim!r} is not legal here")
    after = game.apply(state, claim)
    ok, line = proven_win(game, after, bound)
    return line if ok else None
