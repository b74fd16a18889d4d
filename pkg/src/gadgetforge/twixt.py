"""TwixT and TwixT-PP rules: pegs, automatic knight links, crossings.

White connects the top and bottom rows, Black the left and right columns.
Links join same-color pegs a knight's move apart and appear automatically
whenever legal; in Classic no two links may cross, in PP only opposite-color
crossings are forbidden.  Crossing tests are exact integer orientation
predicates; knight segments contain no interior lattice points, so two
distinct links either share an endpoint (never a crossing) or meet properly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

WHITE = "W"
BLACK = "B"

CLASSIC = "classic"
PP = "pp"

# Fixed clockwise knight order, starting up-right (row grows downward).
KNIGHT_OFFSETS = ((-2, 1), (-1, 2), (1, 2), (2, 1),
                  (2, -1), (1, -2), (-1, -2), (-2, -1))


def opponent(color):
    return BLACK if color == WHITE else WHITE


def _is_knight(a, b):
    dr, dc = abs(a[0] - b[0]), abs(a[1] - b[1])
    return (dr, dc) in ((1, 2), (2, 1))


@dataclass(frozen=True)
class Link:
    a: tuple
    b: tuple
    color: str

    def __post_init__(self):
        if not _is_knight(self.a, self.b):
            raise ValueError(f"{self.a}-{self.b} is not a knight pair")
        if self.b < self.a:
            # Canonical endpoint order so equal links compare equal.
            lo, hi = self.b, self.a
            object.__setattr__(self, "a", lo)
            object.__setattr__(self, "b", hi)

    @staticmethod
    def of(a, b, color):
        a, b = tuple(a), tuple(b)
        return Link(min(a, b), max(a, b), color)

    def endpoints(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class TwixtMove:
    placement: tuple
    removals: frozenset = frozenset()
    link_choices: tuple = ()


@dataclass(frozen=True)
class TwixtBoard:
    """Pegs in placement order, links, variant, and the border-rule flag.

    `pegs` is an insertion-ordered mapping; serialization replays it in that
    order, which makes link sets reproducible.  The mapping is treated as
    read-only once the value is built.
    """
    side: int
    pegs: dict = field(default_factory=dict)
    links: frozenset = frozenset()
    to_move: str = WHITE
    variant: str = CLASSIC
    border_rule: bool = True

    @staticmethod
    def empty(side, variant=CLASSIC, border_rule=True):
        return TwixtBoard(side, {}, frozenset(), WHITE, variant, border_rule)


def knight_pairs(cell, side):
    """On-board knight neighbors of `cell` in the fixed clockwise order."""
    r, c = cell
    if not (0 <= r < side and 0 <= c < side):
        raise ValueError(f"cell {cell} off the {side}x{side} board")
    out = []
    for dr, dc in KNIGHT_OFFSETS:
        nr, nc = r + dr, c + dc
        if 0 <= nr < side and 0 <= nc < side:
            out.append((nr, nc))
    return out


def _orient(a, b, c):
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def crosses(l1, l2):
    """True iff the open segments intersect; shared endpoints never cross."""
    a, b = l1.endpoints()
    c, d = l2.endpoints()
    if {a, b} & {c, d}:
        return False
    return (_orient(a, b, c) * _orient(a, b, d) < 0
            and _orient(c, d, a) * _orient(c, d, b) < 0)


def _blocked(candidate, links, variant):
    for l in links:
        if variant == PP and l.color == candidate.color:
            continue
        if crosses(candidate, l):
            return True
    return False


def _link_pass(side, pegs, links, color, variant, new_peg=None, choices=()):
    """Deterministic auto-linking: add every nonblocked unlinked pair.

    Candidates around `new_peg` come first in clockwise order, then any
    other unlinked pairs (relevant only after removals) in sorted order;
    `choices` promotes links to the front, deciding mutual-crossing races.
    """
    links = set(links)
    candidates = []
    if new_peg is not None:
        for nb in knight_pairs(new_peg, side):
            if pegs.get(nb) == color:
                candidates.append(Link.of(new_peg, nb, color))
    for cell in sorted(pegs):
        if pegs[cell] != color:
            continue
        for nb in knight_pairs(cell, side):
            if nb > cell and pegs.get(nb) == color:
                l = Link.of(cell, nb, color)
                if l not in candidates:
                    candidates.append(l)
    candidates = [l for l in candidates if l not in links]
    for choice in choices:
        if choice not in candidates:
            raise ValueError(f"link choice {choice} is not a candidate")
    ordered = list(choices) + [l for l in candidates if l not in choices]
    for l in ordered:
        if l not in links and not _blocked(l, links, variant):
            links.add(l)
    return frozenset(links)


def apply_move(board, move):
    """Removals first, then placement, then the auto-linking pass."""
    cell = tuple(move.placement)
    r, c = cell
    if not (0 <= r < board.side and 0 <= c < board.side):
        raise ValueError(f"cell {cell} off the board")
    if cell in board.pegs:
        raise ValueError(f"cell {cell} is occupied")
    if board.border_rule:
        n = board.side
        if board.to_move == WHITE and (c == 0 or c == n - 1):
            raise ValueError("White may not play on Black's border columns")
        if board.to_move == BLACK and (r == 0 or r == n - 1):
            raise ValueError("Black may not play on White's border rows")
    links = set(board.links)
    for l in move.removals:
        if l not in links:
            raise ValueError(f"cannot remove absent link {l}")
        if l.color != board.to_move:
            raise ValueError("cannot remove the opponent's link")
        links.remove(l)
    pegs = dict(board.pegs)
    pegs[cell] = board.to_move
    new_links = _link_pass(board.side, pegs, links, board.to_move,
                           board.variant, new_peg=cell,
                           choices=tuple(move.link_choices))
    return TwixtBoard(board.side, pegs, new_links, opponent(board.to_move),
                      board.variant, board.border_rule)


def place(board, cell):
    return apply_move(board, TwixtMove(tuple(cell)))


def winner(board):
    """Color whose links join its two sides, if any."""
    n = board.side
    for color in (WHITE, BLACK):
        adj = {}
        for l in board.links:
            if l.color != color:
                continue
            adj.setdefault(l.a, []).append(l.b)
            adj.setdefault(l.b, []).append(l.a)
        if color == WHITE:
            sources = [p for p, col in board.pegs.items() if col == color and p[0] == 0]
            def at_goal(p):
                return p[0] == n - 1
        else:
            sources = [p for p, col in board.pegs.items() if col == color and p[1] == 0]
            def at_goal(p):
                return p[1] == n - 1
        seen = set(sources)
        frontier = deque(sources)
        while frontier:
            p = frontier.popleft()
            if at_goal(p):
                return color
            for q in adj.get(p, []):
                if q not in seen:
                    seen.add(q)
                    frontier.append(q)
        # A single peg on a 1-wide board would have to span both sides;
        # impossible for n >= 2, so reaching here means no win for color.
    return None


def board_from_pegs(side, placements, variant=CLASSIC, to_move=WHITE,
                    removed=(), border_rule=True):
    """Build a position by replaying pre-placed pegs in the given order.

    Runs the auto-linking pass per peg in its own color (the border rule is
    not applied to pre-placed context pegs), then removes the `removed`
    links.  This is the constructor the reduction compiler uses.
    """
    pegs = {}
    links = frozenset()
    for cell, color in placements:
        cell = tuple(cell)
        r, c = cell
        if not (0 <= r < side and 0 <= c < side):
            raise ValueError(f"peg {cell} off the board")
        if cell in pegs:
            raise ValueError(f"duplicate peg at {cell}")
        if color not in (WHITE, BLACK):
            raise ValueError(f"bad color {color!r}")
        pegs[cell] = color
        links = _link_pass(side, pegs, links, color, variant, new_peg=cell)
    links = set(links)
    for l in removed:
        if l not in links:
            raise ValueError(f"removed link {l} was never formed")
        links.remove(l)
    return TwixtBoard(side, pegs, frozenset(links), to_move, variant, border_rule)


def format_board(board):
    """Serialize; pegs appear in placement order so links replay exactly.

    Positions whose links exceed the default replay (a link kept only via a
    link_choices override) are not representable and raise.
    """
    replay = board_from_pegs(board.side, list(board.pegs.items()),
                             board.variant, board.to_move,
                             border_rule=board.border_rule)
    extra = board.links - replay.links
    if extra:
        raise ValueError(f"links not reproducible by replay: {sorted(extra)}")
    removed = sorted(replay.links - board.links)
    lines = [f"n {board.side}", f"variant {board.variant}"]
    for cell, color in board.pegs.items():
        lines.append(f"{color} {cell[0]} {cell[1]}")
    for l in removed:
        lines.append(f"X {l.a[0]} {l.a[1]} {l.b[0]} {l.b[1]}")
    lines.append(f"turn {board.to_move}")
    return "\n".join(lines) + "\n"


def parse_board(text):
    side = None
    variant = CLASSIC
    to_move = None
    placements = []
    removed_specs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "n" and len(parts) == 2:
                side = int(parts[1])
                if side < 1:
                    raise ValueError
            elif parts[0] == "variant" and len(parts) == 2:
                if parts[1] not in (CLASSIC, PP):
                    raise ValueError
                variant = parts[1]
            elif parts[0] in (WHITE, BLACK) and len(parts) == 3:
                placements.append(((int(parts[1]), int(parts[2])), parts[0]))
            elif parts[0] == "X" and len(parts) == 5:
                removed_specs.append(((int(parts[1]), int(parts[2])),
                                      (int(parts[3]), int(parts[4]))))
            elif parts[0] == "turn" and len(parts) == 2:
                if parts[1] not in (WHITE, BLACK):
                    raise ValueError
                to_move = parts[1]
            else:
                raise ValueError
        except ValueError:
            raise ValueError(f"line {lineno}: bad twixt line {raw!r}") from None
    if side is None or to_move is None:
        raise ValueError("missing n or turn line")
    peg_colors = dict((c, col) for c, col in placements)
    removed = []
    for a, b in removed_specs:
        color = peg_colors.get(a)
        if color is None or peg_colors.get(b) != color:
            raise ValueError(f"removed link {a}-{b} endpoints not same-color pegs")
        removed.append(Link.of(a, b, color))
    return board_from_pegs(side, placements, variant, to_move, removed)
