"""Havannah rules engine: board, groups, ring/bridge/fork, threat calculus.

Boards are immutable values and every operation is a pure reader, so
concurrent reads are safe.  Ring detection is the load-bearing piece: it uses
an exterior-reachability test localized to the group's bounding window, which
the test suite proves equal to a brute-force cycle-enclosure oracle.

`Board.stones` may be any read-only Mapping.  Small-board paths use plain
dicts and `place()` copies; large-board callers (the reduction harnesses)
share one base dict and wrap per-node overlays in a ChainMap instead, which
keeps derived positions O(overlay) rather than O(board).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import hexgrid

WHITE = "W"
BLACK = "B"


def opponent(color: str) -> str:
    return BLACK if color == WHITE else WHITE


class IntegrityError(RuntimeError):
    """A state legal play cannot reach (two winners at once)."""


@dataclass(frozen=True)
class Board:
    side: int
    stones: dict = field(default_factory=dict)
    to_move: str = WHITE

    def cells(self):
        return hexgrid.board_cells(self.side)

    def place(self, cell, color=None):
        """Return a new board with `color` (default: side to move) at `cell`.

        Copies the stone map; fine at engine-test scale.  Hot loops on
        compiled boards should overlay instead of calling this per node.
        """
        color = self.to_move if color is None else color
        if not hexgrid.in_board(cell[0], cell[1], self.side):
            raise ValueError(f"cell {cell} is off the side-{self.side} board")
        if cell in self.stones:
            raise ValueError(f"cell {cell} is occupied")
        stones = dict(self.stones)
        stones[cell] = color
        return Board(self.side, stones, opponent(color))

    def key(self):
        return (self.side, self.to_move, frozenset(self.stones.items()))


@dataclass(frozen=True)
class Group:
    color: str
    members: frozenset


@dataclass(frozen=True)
class ThreatReport:
    completions: frozenset


@dataclass(frozen=True)
class Simple:
    answer: tuple


@dataclass(frozen=True)
class Double:
    cells: frozenset


def neighbors(cell, side):
    """On-board neighbors of `cell` in fixed N, NE, SE, S, SW, NW order."""
    q, r = cell
    if not hexgrid.in_board(q, r, side):
        raise ValueError(f"cell {cell} is off the side-{side} board")
    return [n for n in hexgrid.neighbors(q, r) if hexgrid.in_board(n[0], n[1], side)]


def group_at(board, cell):
    """The maximal same-color group containing the stone at `cell`."""
    color = board.stones.get(cell)
    if color is None:
        raise ValueError(f"no stone at {cell}")
    members = {cell}
    frontier = deque([cell])
    while frontier:
        c = frontier.popleft()
        for n in neighbors(c, board.side):
            if n not in members and board.stones.get(n) == color:
                members.add(n)
                frontier.append(n)
    return Group(color, frozenset(members))


def groups(board, color=None):
    """All maximal groups (of one color if given), deterministically ordered."""
    seen = set()
    out = []
    for cell in sorted(board.stones, key=lambda c: (c[1], c[0])):
        if cell in seen:
            continue
        stone = board.stones[cell]
        if color is not None and stone != color:
            continue
        g = group_at(board, cell)
        seen |= g.members
        out.append(g)
    return out


def enclosed_cells(side, members):
    """Cells unable to reach the board exterior through non-member cells.

    A member stone counts as enclosed when the exterior is unreachable even
    using itself as the starting point.  The search is confined to the
    members' bounding window plus one ring of slack: any fence lies within
    the members, so no cell outside the window can be enclosed, and the
    window's complement always reaches the border by a monotone walk.
    """
    if not members:
        return set()
    m = side - 1
    qlo = max(-m - 1, min(q for q, _ in members) - 1)
    qhi = min(m + 1, max(q for q, _ in members) + 1)
    rlo = max(-m - 1, min(r for _, r in members) - 1)
    rhi = min(m + 1, max(r for _, r in members) + 1)

    def in_window(c):
        return qlo <= c[0] <= qhi and rlo <= c[1] <= rhi and hexgrid.in_board(c[0], c[1], side)

    def on_board_border(c):
        return max(abs(c[0]), abs(c[1]), abs(c[0] + c[1])) == m

    # Flood the exterior-connected passable region from the window rim and
    # the board border inwards.
    reach = set()
    frontier = deque()
    for q in range(qlo, qhi + 1):
        for r in range(rlo, rhi + 1):
            c = (q, r)
            if not in_window(c) or c in members:
                continue
            if q in (qlo, qhi) or r in (rlo, rhi) or on_board_border(c):
                reach.add(c)
                frontier.append(c)
    while frontier:
        c = frontier.popleft()
        for n in hexgrid.neighbors(*c):
            if n not in reach and in_window(n) and n not in members:
                reach.add(n)
                frontier.append(n)

    out = set()
    for q in range(qlo, qhi + 1):
        for r in range(rlo, rhi + 1):
            c = (q, r)
            if not in_window(c) or on_board_border(c):
                continue
            if c in members:
                if all(not hexgrid.in_board(n[0], n[1], side) or n not in reach
                       for n in hexgrid.neighbors(q, r)):
                    out.add(c)
            elif c not in reach:
                out.add(c)
    return out


def detect_ring(board, group, own_stones_count=True):
    """True iff the group encloses at least one cell.

    With `own_stones_count` (official rules, the default) a cell occupied by
    the group's own color counts as enclosed content; with False at least one
    enclosed cell must be empty or enemy-held.
    """
    enc = enclosed_cells(board.side, group.members)
    if own_stones_count:
        return bool(enc)
    return any(board.stones.get(c) != group.color for c in enc)


def detect_bridge(board, group):
    """True iff the group contains at least two of the six corner cells."""
    corners = sum(1 for c in group.members if hexgrid.is_corner(c[0], c[1], board.side))
    return corners >= 2


def detect_fork(board, group):
    """True iff the group touches at least three edges; corners join no edge."""
    edges = {hexgrid.edge_index(c[0], c[1], board.side) for c in group.members}
    edges.discard(None)
    return len(edges) >= 3


def winning_groups(board, own_stones_count=True):
    out = []
    for g in groups(board):
        if (detect_ring(board, g, own_stones_count) or detect_bridge(board, g)
                or detect_fork(board, g)):
            out.append(g)
    return out


def winner(board, own_stones_count=True):
    """Winning color if any group holds a ring, bridge, or fork.

    Raises IntegrityError when both colors hold one, which legal move-at-a-
    time play cannot produce.  A full board without structure is a draw and
    returns None.
    """
    colors = {g.color for g in winning_groups(board, own_stones_count)}
    if len(colors) == 2:
        raise IntegrityError("both colors hold a winning structure")
    return colors.pop() if colors else None


def _merged_members(board, cell, color):
    """Stones of `color` connected to `cell` were it filled with `color`."""
    members = {cell}
    frontier = deque([cell])
    while frontier:
        c = frontier.popleft()
        for n in neighbors(c, board.side):
            if n not in members and board.stones.get(n) == color:
                members.add(n)
                frontier.append(n)
    return members


def threat_completions(board, color, region=None, own_stones_count=True):
    """Empty cells whose occupation by `color` immediately creates a ring.

    With `region` the scan covers only those cells and assumes no group of
    `color` adjacent to the region already holds a ring (true whenever play
    stops at the first ring, as every harness here does); the unrestricted
    scan handles pre-existing rings exactly.  A completing move needs two
    same-color neighbors on the new fence, so other empties are skipped
    without a trial placement.
    """
    stones = board.stones
    side = board.side
    ringed = frozenset()
    if region is None:
        candidates = [c for c in board.cells() if c not in stones]
        pre = set()
        for g in groups(board, color):
            if detect_ring(board, g, own_stones_count):
                pre |= g.members
        ringed = frozenset(pre)
    else:
        candidates = [c for c in region
                      if hexgrid.in_board(c[0], c[1], side) and c not in stones]

    out = set()
    for x in candidates:
        same = [n for n in neighbors(x, side) if stones.get(n) == color]
        if ringed and any(n in ringed for n in same):
            out.add(x)
            continue
        if len(same) < 2:
            continue
        merged = _merged_members(board, x, color)
        enc = enclosed_cells(side, merged)
        if not enc:
            continue
        if own_stones_count:
            out.add(x)
        elif any((color if c == x else stones.get(c)) != color for c in enc):
            out.add(x)
    return ThreatReport(frozenset(out))


def classify_threat(board, color, cell, region=None, own_stones_count=True):
    """Classify playing `cell`: None, Simple(forced answer), or Double(cells).

    Counts ring completions available to `color` after hypothetically playing
    `cell`.  `region` restricts the completion scan exactly as in
    threat_completions; it must contain every cell a new fence through `cell`
    could use, i.e. the action window.
    """
    if cell in board.stones:
        raise ValueError(f"cell {cell} is occupied")
    after = board.place(cell, color)
    report = threat_completions(after, color, region, own_stones_count)
    n = len(report.completions)
    if n == 0:
        return None
    if n == 1:
        return Simple(next(iter(report.completions)))
    return Double(report.completions)


def format_board(board):
    """Serialize: `side <s>`, stone lines sorted by (r, q), `turn W|B`."""
    lines = [f"side {board.side}"]
    for (q, r) in sorted(board.stones, key=lambda c: (c[1], c[0])):
        lines.append(f"{board.stones[(q, r)]} {q} {r}")
    lines.append(f"turn {board.to_move}")
    return "\n".join(lines) + "\n"


def parse_board(text):
    """Inverse of format_board; raises ValueError on malformed input."""
    side = None
    stones = {}
    to_move = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "side":
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ValueError(f"line {lineno}: bad side line {line!r}")
            side = int(parts[1])
        elif parts[0] == "turn":
            if len(parts) != 2 or parts[1] not in (WHITE, BLACK):
                raise ValueError(f"line {lineno}: bad turn line {line!r}")
            to_move = parts[1]
        elif parts[0] in (WHITE, BLACK):
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: bad stone line {line!r}")
            try:
                q, r = int(parts[1]), int(parts[2])
            except ValueError:
                raise ValueError(f"line {lineno}: bad stone line {line!r}") from None
            if side is None:
                raise ValueError(f"line {lineno}: stone before side line")
            if not hexgrid.in_board(q, r, side):
                raise ValueError(f"line {lineno}: stone {q} {r} off the board")
            if (q, r) in stones:
                raise ValueError(f"line {lineno}: duplicate stone at {q} {r}")
            stones[(q, r)] = parts[0]
        else:
            raise ValueError(f"line {lineno}: unrecognized line {line!r}")
    if side is None:
        raise ValueError("missing side line")
    if to_move is None:
        raise ValueError("missing turn line")
    return Board(side, stones, to_move)


def ascii_board(board):
    """Shear-corrected ASCII picture; '.' empty, W/B stones."""
    m = board.side - 1
    lines = []
    for r in range(-m, m + 1):
        qlo = max(-m, -m - r)
        qhi = min(m, m - r)
        offset = 2 * qlo + r + 3 * m
        row = [" "] * offset
        for q in range(qlo, qhi + 1):
            row.append(board.stones.get((q, r), "."))
            row.append(" ")
        lines.append("".join(row).rstrip())
    return "\n".join(lines) + "\n"
