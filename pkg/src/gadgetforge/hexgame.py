"""Minimal exact Hex engine: rules, winner detection, desk-scale solves.

White connects the top and bottom rows, Black the left and right columns.
Cell (r, c) is adjacent to (r-1, c), (r+1, c), (r, c-1), (r, c+1),
(r-1, c+1), (r+1, c-1).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import solver

WHITE = "W"
BLACK = "B"
EMPTY = "."

_DIRS = ((-1, 0), (1, 0), (0, -1), (0, 1), (-1, 1), (1, -1))


def opponent(color):
    return BLACK if color == WHITE else WHITE


@dataclass(frozen=True)
class HexBoard:
    """side, row-major cell tuple of '.', 'W', 'B', and side to move.

    Play paths keep |#White - #Black| <= 1; direct construction (used to
    enumerate arbitrary fillings for the reduction equivalence sweeps) may
    break that balance on purpose.
    """
    side: int
    cells: tuple
    to_move: str = WHITE

    @staticmethod
    def empty(side):
        return HexBoard(side, (EMPTY,) * (side * side), WHITE)

    def at(self, r, c):
        return self.cells[r * self.side + c]

    def stone_counts(self):
        return self.cells.count(WHITE), self.cells.count(BLACK)


def neighbors(cell, side):
    r, c = cell
    out = []
    for dr, dc in _DIRS:
        nr, nc = r + dr, c + dc
        if 0 <= nr < side and 0 <= nc < side:
            out.append((nr, nc))
    return out


def place(board, cell):
    """Play the side to move at `cell`; errors on occupied or finished."""
    r, c = cell
    if not (0 <= r < board.side and 0 <= c < board.side):
        raise ValueError(f"cell {cell} off the {board.side}x{board.side} board")
    if board.at(r, c) != EMPTY:
        raise ValueError(f"cell {cell} is occupied")
    if winner(board) is not None:
        raise ValueError("game is already decided")
    cells = list(board.cells)
    cells[r * board.side + c] = board.to_move
    return HexBoard(board.side, tuple(cells), opponent(board.to_move))


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def winner(board):
    """White iff a White chain joins top and bottom; Black symmetric.

    Union-find with one virtual node per side of each color.
    """
    n = board.side
    # Node ids: cells 0..n*n-1, then W-top, W-bottom, B-left, B-right.
    wt, wb, bl, br = n * n, n * n + 1, n * n + 2, n * n + 3
    uf = _UnionFind(n * n + 4)
    for r in range(n):
        for c in range(n):
            color = board.at(r, c)
            if color == EMPTY:
                continue
            idx = r * n + c
            if color == WHITE:
                if r == 0:
                    uf.union(idx, wt)
                if r == n - 1:
                    uf.union(idx, wb)
            else:
                if c == 0:
                    uf.union(idx, bl)
                if c == n - 1:
                    uf.union(idx, br)
            for nr, nc in neighbors((r, c), n):
                if board.at(nr, nc) == color:
                    uf.union(idx, nr * n + nc)
    if uf.find(wt) == uf.find(wb):
        return WHITE
    if uf.find(bl) == uf.find(br):
        return BLACK
    return None


class HexGame:
    """GameInterface adapter; states are HexBoard values."""

    def __init__(self, board):
        self.root = board

    def initial_state(self):
        return self.root

    def legal_moves(self, state):
        if winner(state) is not None:
            return []
        n = state.side
        return [(r, c) for r in range(n) for c in range(n)
                if state.at(r, c) == EMPTY]

    def apply(self, state, move):
        return place(state, move)

    def is_terminal(self, state):
        return winner(state) is not None or EMPTY not in state.cells

    def terminal_winner(self, state):
        return winner(state)

    def player_to_move(self, state):
        return state.to_move

    def key(self, state):
        return (state.cells, state.to_move)


def solve(board, budget=20_000_000):
    """Exact value for the player to move; resource error past the budget."""
    return solver.solve(HexGame(board), budget=budget)


def format_board(board):
    lines = [str(board.side)]
    for r in range(board.side):
        lines.append("".join(board.at(r, c) for c in range(board.side)))
    lines.append(f"turn {board.to_move}")
    return "\n".join(lines) + "\n"


def parse_board(text):
    lines = [l for l in (raw.strip() for raw in text.splitlines())
             if l and not l.startswith("#")]
    if not lines or not lines[0].isdigit():
        raise ValueError("first line must be the board size")
    n = int(lines[0])
    if n < 1:
        raise ValueError("size must be positive")
    if len(lines) != n + 2:
        raise ValueError(f"expected {n} rows plus a turn line")
    rows = lines[1:1 + n]
    cells = []
    for r, row in enumerate(rows):
        if len(row) != n or any(ch not in ".WB" for ch in row):
            raise ValueError(f"bad row {r}: {row!r}")
        cells.extend(row)
    turn = lines[1 + n].split()
    if len(turn) != 2 or turn[0] != "turn" or turn[1] not in (WHITE, BLACK):
        raise ValueError("bad turn line")
    return HexBoard(n, tuple(cells), turn[1])
