from __future__ import annotations

import pytest

from mbgames.board import Player, new_abstract_board, new_complete_board
from mbgames.breaker import NullBreaker
from mbgames.engine import Claim, GameConfig, Reveal, replay
from mbgames.exceptions import IllegalMoveError
from mbgames.human import human_play, parse_human_move, render_board
from mbgames.maker import ScriptedMaker

PAIRS_OF_FOUR = "explicit:4:[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]"


def _scripted(lines):
    feed = iter(lines)

    def read(prompt):
        return next(feed)

    return read


def _collect():
    out = []
    return out, out.append


def test_parse_pairs_on_graph_boards():
    board = new_complete_board(4)
    assert parse_human_move(board, "0 1, 2-3") == Claim([board.encode(0, 1), board.encode(2, 3)])
    assert parse_human_move(board, "reveal 1 0") == Reveal([board.encode(0, 1)])
    assert parse_human_move(board, " PASS ") == Claim(())


def test_parse_ids_on_abstract_boards():
    assert parse_human_move(new_abstract_board(6), "3; 5") == Claim([3, 5])


@pytest.mark.parametrize(
    "line,match",
    [
        ("zero one", "could not read"),
        ("   ", "nothing entered"),
        ("0 1 2", "pairs"),
        ("0 9", "9"),
    ],
)
def test_parse_rejects_bad_input(line, match):
    with pytest.raises(IllegalMoveError, match=match):
        parse_human_move(new_complete_board(4), line)


def test_render_board_lists_both_sides():
    board = new_complete_board(4, dynamic=True)
    board.reveal([0, 1, 2])
    board.claim(0, Player.MAKER)
    board.claim(1, Player.BREAKER)
    text = render_board(board)
    assert text.splitlines()[0] == repr(board)
    assert "maker   : 0-1" in text
    assert "breaker : 0-2" in text
    assert "hidden  : 3" in text
    assert "maker degrees: 0:1 1:1" in text


def test_human_maker_wins_the_pairs_game():
    out, write = _collect()
    config = GameConfig.from_spec(PAIRS_OF_FOUR, seed=0)
    transcript = human_play(config, Player.MAKER, NullBreaker(), input_fn=_scripted(["0", "1"]), output_fn=write)
    assert transcript.result.winner is Player.MAKER
    assert out[-1] == "Game over after 2 rounds: maker wins."


def test_illegal_moves_are_reprompted():
    out, write = _collect()
    config = GameConfig.from_spec(PAIRS_OF_FOUR, seed=0)
    lines = ["9", "0", "0", "1"]
    transcript = human_play(config, Player.MAKER, NullBreaker(), input_fn=_scripted(lines), output_fn=write)
    assert transcript.result.fault is None
    assert transcript.result.strategies["maker"]["rejected"] == 2
    assert sum(1 for line in out if line.startswith("Illegal move:")) == 2


def test_quit_returns_a_resumable_partial_game():
    out, write = _collect()
    config = GameConfig.from_spec(PAIRS_OF_FOUR, seed=0)
    partial = human_play(config, Player.MAKER, NullBreaker(), input_fn=_scripted(["0", "quit"]), output_fn=write)
    assert partial.result is None
    assert len(partial.moves) == 2
    assert out[-1] == "Stopped after 2 moves; resume with --resume."
    final = human_play(config, Player.MAKER, NullBreaker(), input_fn=_scripted(["1"]), output_fn=write, resume=partial)
    assert final.result.winner is Player.MAKER
    assert replay(final).consistent


def test_closed_input_stops_the_game():
    def closed(prompt):
        raise EOFError

    out, write = _collect()
    config = GameConfig.from_spec(PAIRS_OF_FOUR, seed=0)
    partial = human_play(config, Player.MAKER, NullBreaker(), input_fn=closed, output_fn=write)
    assert partial.result is None
    assert partial.moves == []


def test_human_can_play_breaker():
    out, write = _collect()
    config = GameConfig.from_spec(PAIRS_OF_FOUR, seed=0)
    maker = ScriptedMaker([Claim([0]), Claim([2])])
    transcript = human_play(config, Player.BREAKER, maker, input_fn=_scripted(["1"]), output_fn=write)
    assert transcript.result.breaker_elements == (1,)
    assert transcript.result.winner is Player.MAKER
    assert any(line.startswith("Round 1: you play breaker") for line in out)
