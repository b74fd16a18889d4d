"""Threat-sequence search and deviation refutation for Havannah.

A winning threat sequence is a chain of simple ring threats, each forcing
the unique completion-cell reply and drawing no counter-threat, ended by a
double threat.  `refute` shows a proposed move loses to such play.

Search nodes overlay a shared base stone map (ChainMap) instead of copying
boards, so these walks stay cheap on compiled boards with tens of
thousands of context stones.  All scans are restricted to an explicit
`region` when given; callers pass the action window that provably contains
every fence a new threat could use.

Defender model inside `refute`, documented as a desk-scale approximation:
at a defender turn the considered replies are ring completions, moves with
a defender neighbor that create a threat, moves on the attacker's planned
line, and a pass standing for every other quiet move.  Quiet moves off the
line neither remove an attacker completion nor create a defender threat,
which is why the pass stands for them.
"""

from __future__ import annotations

from collections import ChainMap
from dataclasses import dataclass

from .havannah import (
    Board, Double, Simple, classify_threat, group_at, detect_ring, neighbors,
    opponent, threat_completions,
)


@dataclass(frozen=True)
class Refutation:
    kind: str          # "completion" or "sequence"
    line: tuple        # plies of the punishing side's forced win


class _Walk:
    """Shared overlay over a base board for one search."""

    def __init__(self, board, region):
        self.side = board.side
        self.base = board.stones
        self.overlay = {}
        self.stones = ChainMap(self.overlay, self.base)
        self.region = None if region is None else tuple(region)
        self.failed = set()   # (overlay snapshot, plies) with no sequence

    def board(self, to_move):
        return Board(self.side, self.stones, to_move)

    def put(self, cell, color):
        if cell in self.stones:
            raise ValueError(f"cell {cell} is occupied")
        self.overlay[cell] = color

    def take(self, cell):
        del self.overlay[cell]

    def completions(self, color):
        b = self.board(color)
        return threat_completions(b, color, self.region).completions

    def candidates(self, color):
        """Empty region cells adjacent to a stone of `color`.

        In a quiet position every threat move touches its future fence, so
        cells without a same-color neighbor cannot create a completion.
        """
        cells = self.region
        if cells is None:
            cells = self.board(color).cells()
        out = []
        for c in cells:
            if c in self.stones:
                continue
            for n in neighbors(c, self.side):
                if self.stones.get(n) == color:
                    out.append(c)
                    break
        return out

    def classify(self, color, cell):
        return classify_threat(self.board(color), color, cell, self.region)

    def reply_completes_ring(self, cell, color):
        self.put(cell, color)
        try:
            b = self.board(color)
            return detect_ring(b, group_at(b, cell))
        finally:
            self.take(cell)


def winning_threat_sequence(board, attacker, max_plies=16, region=None):
    """Full ply list of a winning sequence for `attacker`, or None.

    The list alternates attacker move, forced defender reply, ..., and ends
    with the attacker's double-threat move.  Preconditions: attacker is to
    move, neither side has a ring completion available (quiet position).
    """
    defender = opponent(attacker)
    walk = _Walk(board, region)
    if walk.completions(defender):
        raise ValueError("attacker is already threatened; not a quiet position")
    if walk.completions(attacker):
        raise ValueError("attacker already has a completion; play it instead")
    return _sequence(walk, attacker, defender, max_plies)


def _sequence(walk, attacker, defender, plies_left):
    if plies_left < 1:
        return None
    memo_key = (frozenset(walk.overlay.items()), plies_left)
    if memo_key in walk.failed:
        return None
    simples = []
    for m in walk.candidates(attacker):
        cls = walk.classify(attacker, m)
        if isinstance(cls, Double):
            # Prefer ending now over any longer simple-threat line.
            return (m,)
        if isinstance(cls, Simple):
            simples.append((m, cls.answer))
    if plies_left >= 3:
        for m, answer in simples:
            if walk.reply_completes_ring(answer, defender):
                continue
            walk.put(m, attacker)
            walk.put(answer, defender)
            try:
                if walk.completions(defender):
                    # The forced reply made a counter-threat; line broken.
                    continue
                rest = _sequence(walk, attacker, defender, plies_left - 2)
                if rest is not None:
                    return (m, answer) + rest
            finally:
                walk.take(answer)
                walk.take(m)
    walk.failed.add(memo_key)
    return None


def refute(board, mover, move, region=None, max_plies=16):
    """Refutation of `mover` playing `move`, or None.

    Plays the move, then searches for a forced ring win by the opponent
    within `max_plies` plies under the documented defender model.  The move
    itself winning the game on the spot is never refutable.
    """
    walk = _Walk(board, region)
    if move in walk.stones:
        raise ValueError(f"claimed move {move} is occupied")
    walk.put(move, mover)
    try:
        b = walk.board(mover)
        if detect_ring(b, group_at(b, move)):
            return None
        return _forced_win(walk, opponent(mover), mover, max_plies - 1)
    finally:
        walk.take(move)


def _forced_win(walk, attacker, defender, plies_left):
    """Attacker to move: a forced ring win as a Refutation, or None."""
    if plies_left < 1:
        return None
    comps = walk.completions(attacker)
    if comps:
        return Refutation("completion", (min(comps),))
    danger = walk.completions(defender)
    if len(danger) >= 2:
        return None
    if len(danger) == 1:
        block = min(danger)
        walk.put(block, attacker)
        try:
            sub = _defender_turn(walk, attacker, defender, plies_left - 1)
            if sub is None:
                return None
            return Refutation(sub.kind, (block,) + sub.line)
        finally:
            walk.take(block)
    seq = _sequence(walk, attacker, defender, plies_left)
    if seq is not None:
        return Refutation("sequence", seq)
    return None


def _defender_turn(walk, attacker, defender, plies_left):
    """Defender to move: attacker's win against every modeled reply.

    Returns the pass-branch refutation (the principal line) only when all
    modeled defender replies fail too.
    """
    if plies_left < 1:
        return None
    # Pass branch first: it provides the planned line whose cells extend
    # the defender's considered replies.
    pass_branch = _forced_win(walk, attacker, defender, plies_left - 1)
    if pass_branch is None:
        return None
    tried = set()
    replies = []
    for c in walk.completions(defender):
        replies.append(c)
    for c in walk.candidates(defender):
        if c in tried or c in replies:
            continue
        cls = walk.classify(defender, c)
        if cls is not None:
            replies.append(c)
    for c in pass_branch.line:
        if c not in walk.stones and c not in replies:
            replies.append(c)
    for c in replies:
        if walk.reply_completes_ring(c, defender):
            return None
        walk.put(c, defender)
        try:
            if _forced_win(walk, attacker, defender, plies_left - 1) is None:
                return None
        finally:
            walk.take(c)
    return pass_branch
