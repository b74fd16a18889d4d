"""Hex engine tests: rules, union-find winner vs flood oracle, solves."""

import itertools
import random

import pytest

from gadgetforge import solver
from gadgetforge.hexgame import (
    BLACK, EMPTY, WHITE, HexBoard, HexGame, format_board, neighbors,
    parse_board, place, solve, winner,
)
from gadgetforge.solver import LOSS, WIN


def board_of(rows, to_move=WHITE):
    cells = tuple(ch for row in rows for ch in row)
    return HexBoard(len(rows), cells, to_move)


def flood_winner(board):
    """Independent reachability oracle, no union-find."""
    n = board.side
    for color, starts, done in (
            (WHITE, [(0, c) for c in range(n)], lambda r, c: r == n - 1),
            (BLACK, [(r, 0) for r in range(n)], lambda r, c: c == n - 1)):
        seen = set()
        frontier = [s for s in starts if board.at(*s) == color]
        seen.update(frontier)
        while frontier:
            cell = frontier.pop()
            if done(*cell):
                return color
            for nb in neighbors(cell, n):
                if nb not in seen and board.at(*nb) == color:
                    seen.add(nb)
                    frontier.append(nb)
    return None


class TestRules:
    def test_place_on_1x1(self):
        b = place(HexBoard.empty(1), (0, 0))
        assert b.at(0, 0) == WHITE

    def test_occupied_cell_rejected(self):
        b = place(HexBoard.empty(2), (0, 0))
        with pytest.raises(ValueError):
            place(b, (0, 0))

    def test_place_flips_turn(self):
        b = HexBoard.empty(3)
        assert place(b, (1, 1)).to_move == BLACK

    def test_place_after_win_rejected(self):
        b = board_of(["WW", "W."], to_move=BLACK)
        assert winner(b) == WHITE
        with pytest.raises(ValueError):
            place(b, (1, 1))

    def test_off_board_rejected(self):
        with pytest.raises(ValueError):
            place(HexBoard.empty(2), (5, 0))


class TestWinner:
    def test_single_stone_1x1(self):
        assert winner(board_of(["B"])) == BLACK
        assert winner(board_of(["W"])) == WHITE

    def test_full_white_row_spans(self):
        b = board_of([".W.", ".W.", ".W."])
        assert winner(b) == WHITE

    def test_full_black_column_spans(self):
        b = board_of(["...", "BBB", "..."])
        assert winner(b) == BLACK

    def test_diagonal_adjacency_counts(self):
        # (r+1, c-1) adjacency: a staircase chain still connects.
        b = board_of([".W", "W."])
        assert winner(b) == WHITE

    def test_anti_diagonal_is_not_adjacent(self):
        b = board_of(["W.", ".W"])
        assert winner(b) is None

    def test_empty_board(self):
        assert winner(HexBoard.empty(3)) is None

    def test_matches_flood_oracle_on_random_fillings(self):
        rng = random.Random(1905)
        for _ in range(400):
            n = 4
            cells = [rng.choice([EMPTY, WHITE, BLACK]) for _ in range(n * n)]
            b = HexBoard(n, tuple(cells), WHITE)
            assert winner(b) == flood_winner(b)

    def test_no_draw_on_filled_boards_balanced(self):
        for n in (2, 3):
            cells_n = n * n
            for wcount in ((cells_n + 1) // 2, cells_n // 2):
                for w_positions in itertools.combinations(range(cells_n), wcount):
                    cells = [BLACK] * cells_n
                    for i in w_positions:
                        cells[i] = WHITE
                    b = HexBoard(n, tuple(cells), WHITE)
                    assert winner(b) is not None

    def test_win_is_monotone_under_own_stones(self):
        rng = random.Random(77)
        for _ in range(200):
            n = 4
            cells = [rng.choice([EMPTY, WHITE, BLACK]) for _ in range(n * n)]
            b = HexBoard(n, tuple(cells), WHITE)
            w = winner(b)
            if w is None:
                continue
            empties = [i for i, ch in enumerate(cells) if ch == EMPTY]
            if not empties:
                continue
            i = rng.choice(empties)
            cells2 = list(cells)
            cells2[i] = w
            assert winner(HexBoard(n, tuple(cells2), WHITE)) == w


class TestSolve:
    def test_empty_1x1_first_player_wins(self):
        r = solve(HexBoard.empty(1))
        assert r.value == WIN and r.pv == ((0, 0),)

    def test_empty_2x2_regression(self):
        # Frozen after full enumeration: first player wins 2x2.
        assert solve(HexBoard.empty(2)).value == WIN

    def test_lost_position_reports_loss(self):
        b = board_of(["WW", "W."], to_move=BLACK)
        game = HexGame(b)
        assert solver.solve(game).value == LOSS

    def test_budget_error(self):
        with pytest.raises(solver.BudgetExceededError):
            solve(HexBoard.empty(3), budget=5)

    def test_brute_force_2x2_all_lines(self):
        """Enumerate every legal 2x2 line with no pruning or memo."""
        def value(board):
            w = winner(board)
            if w is not None:
                return WIN if w == board.to_move else LOSS
            moves = [(r, c) for r in range(2) for c in range(2)
                     if board.at(r, c) == EMPTY]
            if not moves:
                return LOSS
            vals = [value(place(board, m)) for m in moves]
            return WIN if LOSS in vals else LOSS
        assert value(HexBoard.empty(2)) == solve(HexBoard.empty(2)).value


class TestText:
    def test_roundtrip(self):
        b = board_of([".W.", "B..", ".BW"], to_move=BLACK)
        assert parse_board(format_board(b)) == b

    @pytest.mark.parametrize("text", [
        "",
        "x\n",
        "2\n.W\nturn W\n",
        "2\n.W\n.Q\nturn W\n",
        "2\n.W\n.B\nturn X\n",
        "2\n.W\n.B.\nturn W\n",
    ])
    def test_malformed_rejected(self, text):
        with pytest.raises(ValueError):
            parse_board(text)
