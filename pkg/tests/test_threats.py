"""Threat-sequence search and refutation walks."""

import random

import pytest

from gadgetforge.havannah import (
    BLACK, WHITE, Board, Double, Simple, classify_threat, neighbors, opponent,
    threat_completions,
)
from gadgetforge.threats import Refutation, refute, winning_threat_sequence


def loop6(center, side):
    return list(neighbors(center, side))


def board_of(side, white=(), black=(), to_move=WHITE):
    stones = {}
    for c in white:
        stones[c] = WHITE
    for c in black:
        stones[c] = BLACK
    assert len(stones) == len(white) + len(black), "fixture cells overlap"
    return Board(side, stones, to_move)


def drop(cells, *gaps):
    out = [c for c in cells if c not in gaps]
    assert len(out) == len(cells) - len(gaps)
    return out


def double_complex(side):
    """One-color material where (1, 0) creates completions (0, 1), (3, -1)."""
    a = drop(loop6((0, 0), side), (1, 0), (0, 1))
    b = drop(loop6((2, -1), side), (1, 0), (3, -1))
    return sorted(set(a) | set(b))


def chain_complex(side):
    """Material with no immediate double.

    (1, 0) threatens (0, 1); after that exchange both (3, -1) and (2, 0)
    turn the interlocked fences around (2, -1) and (2, 1) into doubles.
    """
    a = drop(loop6((0, 0), side), (1, 0), (0, 1))
    b = drop(loop6((2, -1), side), (1, 0), (3, -1), (2, 0))
    c = drop(loop6((2, 1), side), (2, 0), (3, 0))
    return sorted(set(a) | set(b) | set(c))


def replay_check(board, attacker, seq):
    """Assert `seq` satisfies the sequence contract ply by ply."""
    defender = opponent(attacker)
    assert len(seq) % 2 == 1
    b = Board(board.side, dict(board.stones), attacker)
    for i in range(0, len(seq) - 1, 2):
        cls = classify_threat(b, attacker, seq[i])
        assert isinstance(cls, Simple)
        assert cls.answer == seq[i + 1]
        b = Board(b.side, {**b.stones, seq[i]: attacker}, defender)
        b = Board(b.side, {**b.stones, seq[i + 1]: defender}, attacker)
        assert not threat_completions(b, defender).completions
    assert isinstance(classify_threat(b, attacker, seq[-1]), Double)


class TestSequence:
    def test_immediate_double_is_length_one(self):
        b = board_of(5, white=double_complex(5))
        seq = winning_threat_sequence(b, WHITE)
        assert seq == ((1, 0),)
        replay_check(b, WHITE, seq)

    def test_no_material_means_no_sequence(self):
        assert winning_threat_sequence(board_of(4), WHITE) is None
        scatter = [(0, 0), (2, -2), (-2, 2)]
        assert winning_threat_sequence(board_of(4, white=scatter), WHITE) is None

    def test_threats_without_a_double_fail(self):
        # Two near-rings with adjacent gaps chain simple threats forever but
        # never produce a double, so no sequence exists.
        white = drop(loop6((-3, 1), 6), (-3, 0), (-2, 0))
        white += drop(loop6((2, 0), 6), (2, -1), (3, -1))
        b = board_of(6, white=white)
        assert winning_threat_sequence(b, WHITE, max_plies=10) is None

    def test_simple_then_double_chain(self):
        b = board_of(5, white=chain_complex(5))
        seq = winning_threat_sequence(b, WHITE)
        assert seq == ((1, 0), (0, 1), (3, -1))
        replay_check(b, WHITE, seq)

    def test_ply_budget_bounds_the_chain(self):
        b = board_of(5, white=chain_complex(5))
        assert winning_threat_sequence(b, WHITE, max_plies=1) is None
        assert winning_threat_sequence(b, WHITE, max_plies=3) is not None

    def test_counter_threatening_reply_is_rejected(self):
        # Black's near-ring turns White's forced reply cell into a black
        # threat builder: once Black answers at (1, -1), the cell (3, -3)
        # completes a black ring, so the simple-threat line is discarded.
        # No other line exists and the search reports none.  The branch
        # decision itself is pinned again by the gadget harnesses.
        white = drop(loop6((0, 0), 4), (0, -1), (1, -1))
        black = drop(loop6((2, -2), 4), (1, -1), (3, -3))
        b = board_of(4, white=white, black=black)
        assert winning_threat_sequence(b, WHITE, max_plies=9) is None

    def test_region_restriction_hides_material(self):
        b = board_of(5, white=double_complex(5))
        far = [(q, r) for q in range(-4, 0) for r in range(0, 4)
               if abs(q) <= 4 and abs(r) <= 4 and abs(q + r) <= 4]
        assert winning_threat_sequence(b, WHITE, region=far) is None

    def test_attacker_threatened_raises(self):
        black = drop(loop6((0, 0), 4), (1, 0))
        b = board_of(4, black=black)
        with pytest.raises(ValueError):
            winning_threat_sequence(b, WHITE)

    def test_attacker_completion_raises(self):
        white = drop(loop6((0, 0), 4), (1, 0))
        b = board_of(4, white=white)
        with pytest.raises(ValueError):
            winning_threat_sequence(b, WHITE)

    def test_random_quiet_boards_return_none(self):
        rng = random.Random(7)
        cells = Board(4, {}, WHITE).cells()
        for _ in range(40):
            picks = rng.sample(cells, 5)
            b = board_of(4, white=picks[:3], black=picks[3:])
            if threat_completions(b, WHITE).completions:
                continue
            if threat_completions(b, BLACK).completions:
                continue
            # 3 scattered stones can never ring by move 16.
            assert winning_threat_sequence(b, WHITE, max_plies=5) is None


class TestRefute:
    def test_ignoring_a_simple_threat_loses(self):
        white = drop(loop6((-3, 1), 5), (-2, 0))
        b = board_of(5, white=white, to_move=BLACK)
        out = refute(b, BLACK, (2, 2))
        assert out == Refutation("completion", ((-2, 0),))

    def test_blocking_reply_survives(self):
        white = drop(loop6((-3, 1), 5), (-2, 0))
        b = board_of(5, white=white, to_move=BLACK)
        assert refute(b, BLACK, (-2, 0)) is None

    def test_completing_own_ring_is_unrefutable(self):
        black = drop(loop6((0, 0), 4), (1, 0))
        b = board_of(4, black=black, to_move=BLACK)
        assert refute(b, BLACK, (1, 0)) is None

    def test_occupied_claim_raises(self):
        b = board_of(4, white=[(0, 0)])
        with pytest.raises(ValueError):
            refute(b, WHITE, (0, 0))

    def test_stealable_double_is_no_refutation(self):
        # Black's lone double complex dies when White's forced-block tempo
        # is answered by White taking the key cell, so the quiet White move
        # is not actually refutable.
        white = drop(loop6((-4, 2), 6), (-4, 1))
        black = double_complex(6)
        b = board_of(6, white=white, black=black)
        assert refute(b, WHITE, (5, 0), max_plies=8) is None

    def test_block_then_duplicated_double_refutes(self):
        # With a second independent double, stealing one key cell leaves
        # the other, so Black refutes by blocking then threatening.
        white = drop(loop6((-4, 2), 6), (-4, 1))
        black = double_complex(6)
        black += [(q + 0, r + 3) for q, r in double_complex(6)]
        b = board_of(6, white=white, black=sorted(set(black)))
        out = refute(b, WHITE, (5, 0), max_plies=8)
        assert out is not None
        assert out.kind == "sequence"
        assert out.line[0] == (-4, 1)

    def test_wasting_the_won_tempo_is_refuted(self):
        # Same material, but White abandons the completion entirely by
        # playing far away twice over; Black just blocks and wins.
        black = double_complex(6)
        black += [(q, r + 3) for q, r in double_complex(6)]
        b = board_of(6, black=sorted(set(black)), to_move=WHITE)
        out = refute(b, WHITE, (5, 0), max_plies=8)
        assert out is not None and out.kind == "sequence"
