from __future__ import annotations

import json

import pytest

from mbgames.board import Player
from mbgames.breaker import NullBreaker, RandomBreaker, potential_breaker
from mbgames.engine import (
    Claim,
    GameConfig,
    GameView,
    KFactorWin,
    KVertexWin,
    MoveRecord,
    Reveal,
    Strategy,
    Transcript,
    load_transcript,
    parallel_multiplex,
    parse_win,
    replay,
    run_game,
)
from mbgames.exceptions import ConfigError, InvariantViolation, TranscriptFormatError
from mbgames.maker import ScriptedMaker, greedy_clique_maker, random_maker
from mbgames.rng import make_rng
from mbgames.winsets import PatternGraph, enumerate_h_copies

PAIRS_OF_FOUR = "explicit:4:[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]"


class ListMaker(Strategy):
    name = "list"

    def __init__(self, moves):
        self.moves = list(moves)

    def move(self, view):
        if self.moves:
            return self.moves.pop(0)
        return Claim([view.board.open_elements()[0]])


class RevealingBreaker(Strategy):
    name = "cheat"

    def move(self, view):
        return Reveal([0])


@pytest.mark.parametrize("b,winner", [(1, Player.MAKER), (2, Player.MAKER), (3, Player.BREAKER)])
def test_pairs_game_threshold(b, winner):
    for seed in range(5):
        config = GameConfig.from_spec(PAIRS_OF_FOUR, breaker_bias=b, seed=seed)
        transcript = run_game(config, random_maker(), RandomBreaker())
        assert transcript.result.winner is winner
        assert transcript.result.fault is None

def test_same_seed_gives_identical_transcripts():
    config = GameConfig.from_spec("copies:K3", 7, breaker_bias=2, seed=1234)
    first = run_game(config, random_maker(), RandomBreaker()).to_json()
    second = run_game(config, random_maker(), RandomBreaker()).to_json()
    assert first == second
    other = GameConfig.from_spec("copies:K3", 7, breaker_bias=2, seed=1235)
    assert run_game(other, random_maker(), RandomBreaker()).to_json() != first

def test_moves_alternate_and_respect_bias():
    config = GameConfig.from_spec("copies:K4", 7, maker_bias=2, breaker_bias=3, seed=5)
    transcript = run_game(config, random_maker(), RandomBreaker())
    expected = Player.MAKER
    for rec in transcript.moves:
        assert rec.player is expected
        assert len(rec.elements) <= config.bias(rec.player)
        expected = expected.opponent
    result = transcript.result
    assert not set(result.maker_elements) & set(result.breaker_elements)

def test_maker_fault_is_recorded_and_replays():
    config = GameConfig.from_spec("explicit:4:[[0,1,2,3]]", seed=0)
    maker = ScriptedMaker([Claim([0]), Claim([0])])
    transcript = run_game(config, maker, NullBreaker())
    result = transcript.result
    assert result.fault is not None
    assert result.fault.player is Player.MAKER
    assert result.fault.round == 2
    assert result.winner is Player.BREAKER
    assert replay(transcript).consistent

def test_breaker_fault_hands_maker_the_win():
    config = GameConfig.from_spec("copies:K3", 5, seed=0)
    transcript = run_game(config, random_maker(), RevealingBreaker())
    assert transcript.result.fault.player is Player.BREAKER
    assert transcript.result.winner is Player.MAKER
    assert "enlarge" in transcript.result.fault.message

def test_bias_overrun_is_a_fault():
    config = GameConfig.from_spec(PAIRS_OF_FOUR, seed=0)
    transcript = run_game(config, ScriptedMaker([Claim([0, 1])]), NullBreaker())
    assert transcript.result.fault.player is Player.MAKER
    assert "bias" in transcript.result.fault.message

def test_dynamic_board_requires_reveal_first():
    config = GameConfig.from_spec(PAIRS_OF_FOUR, dynamic=True, seed=0)
    transcript = run_game(config, ScriptedMaker([Claim(())]), NullBreaker())
    assert transcript.result.fault.player is Player.MAKER
    assert "reveal" in transcript.result.fault.message

def test_reveal_on_static_board_is_a_fault():
    config = GameConfig.from_spec(PAIRS_OF_FOUR, seed=0)
    transcript = run_game(config, ScriptedMaker([Reveal([0])]), NullBreaker())
    assert transcript.result.fault.player is Player.MAKER

def test_dynamic_game_reaches_a_result():
    config = GameConfig.from_spec("copies:K3", 6, dynamic=True, breaker_bias=2, seed=3)
    transcript = run_game(config, random_maker(), RandomBreaker())
    assert transcript.result.fault is None
    kinds = [rec.kind for rec in transcript.moves if rec.player is Player.MAKER]
    assert kinds[0] == "reveal"
    assert replay(transcript).consistent

def test_kfactor_win_condition():
    config = GameConfig.from_spec("kfactor:2", 4, maker_bias=2, seed=0)
    script = ScriptedMaker([Claim([config.new_board().encode(0, 1), config.new_board().encode(2, 3)])])
    transcript = run_game(config, script, NullBreaker())
    assert transcript.result.winner is Player.MAKER
    assert transcript.result.maker_won_round == 1
    assert transcript.result.fully_claimed == 1

def test_kfactor_never_holds_without_divisibility():
    win = KFactorWin(5, 2)
    board = win.new_board(False)
    for e in range(board.universe_size):
        board.claim(e, Player.MAKER)
    assert not win.holds(board)

def test_kvertex_win_condition():
    win = KVertexWin(5, 0, 3)
    board = win.new_board(False)
    board.claim(board.encode(0, 1), Player.MAKER)
    board.claim(board.encode(1, 2), Player.MAKER)
    assert not win.satisfied_after(board, [board.encode(1, 2)])
    closing = board.encode(0, 2)
    board.claim(closing, Player.MAKER)
    assert win.satisfied_after(board, [closing])
    with pytest.raises(ConfigError):
        KVertexWin(5, 5, 3)

def test_play_out_continues_after_maker_wins():
    quick = run_game(GameConfig.from_spec(PAIRS_OF_FOUR, seed=2), random_maker(), RandomBreaker())
    full = run_game(GameConfig.from_spec(PAIRS_OF_FOUR, seed=2, play_out=True), random_maker(), RandomBreaker())
    assert quick.result.maker_won_round == 2
    assert full.result.maker_won_round == 2
    assert len(quick.moves) == 3
    assert len(full.moves) == 4
    assert full.result.fully_claimed == 1
    assert replay(full).consistent

def test_round_cap_stops_the_game():
    config = GameConfig.from_spec("copies:K3", 5, max_rounds=1, seed=0)
    transcript = run_game(config, random_maker(), NullBreaker())
    assert transcript.result.rounds == 1
    assert transcript.result.winner is Player.BREAKER
    assert any("round cap" in note for note in transcript.result.notes)

def test_transcript_json_roundtrip_and_replay(tmp_path):
    config = GameConfig.from_spec("copies:K3", 6, breaker_bias=2, seed=99)
    transcript = run_game(config, greedy_clique_maker(3), potential_breaker(enumerate_h_copies(6, PatternGraph.complete(3)), 1, 2))
    path = tmp_path / "t.json"
    path.write_text(transcript.to_json())
    loaded = load_transcript(str(path))
    assert loaded.to_json() == transcript.to_json()
    assert loaded.seed == 99
    report = replay(loaded)
    assert report.consistent
    assert report.summary() == "consistent"
    assert report.winner is transcript.result.winner

def test_replay_detects_tampering():
    config = GameConfig.from_spec("copies:K3", 6, breaker_bias=1, seed=4)
    transcript = run_game(config, random_maker(), RandomBreaker())
    data = json.loads(transcript.to_json())
    data["result"]["winner"] = "breaker" if data["result"]["winner"] == "maker" else "maker"
    report = replay(Transcript.from_json(json.dumps(data)))
    assert not report.consistent
    assert "winner" in report.message

def test_replay_detects_out_of_turn_moves():
    config = GameConfig.from_spec(PAIRS_OF_FOUR, seed=0)
    moves = [MoveRecord(1, Player.BREAKER, "claim", (0,))]
    report = replay(Transcript(config, moves, None))
    assert not report.consistent
    assert report.divergence_round == 1

def test_malformed_transcripts():
    with pytest.raises(TranscriptFormatError):
        Transcript.from_json("not json")
    with pytest.raises(TranscriptFormatError):
        Transcript.from_json("{}")
    good = json.loads(run_game(GameConfig.from_spec(PAIRS_OF_FOUR), random_maker(), RandomBreaker()).to_json())
    good["moves"][0]["kind"] = "teleport"
    with pytest.raises(TranscriptFormatError) as info:
        Transcript.from_json(json.dumps(good))
    assert info.value.round_index == 1

def test_resume_from_a_prefix_reaches_the_same_end():
    config = GameConfig.from_spec("copies:K3", 7, breaker_bias=2, seed=8)
    family = enumerate_h_copies(7, PatternGraph.complete(3))
    full = run_game(config, greedy_clique_maker(3), potential_breaker(family, 1, 2))
    assert len(full.moves) >= 3
    prefix = Transcript(config, full.moves[:3], None)
    resumed = run_game(config, greedy_clique_maker(3), potential_breaker(family, 1, 2), resume=prefix)
    assert [m.to_dict() for m in resumed.moves] == [m.to_dict() for m in full.moves]
    assert resumed.result.winner is full.result.winner

def test_resume_rejects_illegal_prefix():
    config = GameConfig.from_spec(PAIRS_OF_FOUR)
    bad = Transcript(config, [MoveRecord(1, Player.MAKER, "claim", (9,))], None)
    with pytest.raises(TranscriptFormatError):
        run_game(config, random_maker(), RandomBreaker(), resume=bad)

def test_multiplex_interleaves_sub_strategies():
    config = GameConfig.from_spec("copies:K3", 6, breaker_bias=1, seed=11)
    multiplex = parallel_multiplex([random_maker(), greedy_clique_maker(3)])
    transcript = run_game(config, multiplex, RandomBreaker())
    assert transcript.result.fault is None
    report = transcript.result.strategies["maker"]
    assert report["name"] == "multiplex"
    assert len(report["parts"]) == 2
    assert replay(transcript).consistent

SIX_SET = "explicit:6:[[0,1,2,3,4,5]]"

def test_multiplex_retries_a_stale_claim():
    config = GameConfig.from_spec(SIX_SET, seed=0)
    multiplex = parallel_multiplex([ListMaker([Claim([0]), Claim([0])]), ListMaker([])])
    transcript = run_game(config, multiplex, NullBreaker())
    assert transcript.result.fault is None
    assert transcript.result.winner is Player.MAKER
    assert multiplex.retries == [1, 0]
    claims = [rec.elements for rec in transcript.moves if rec.player is Player.MAKER]
    assert claims == [(0,), (1,), (2,), (3,), (4,), (5,)]

def test_multiplex_faults_after_one_retry():
    config = GameConfig.from_spec(SIX_SET, seed=0)
    multiplex = parallel_multiplex([ListMaker([Claim([0]), Claim([0]), Claim([0])]), ListMaker([])])
    transcript = run_game(config, multiplex, NullBreaker())
    fault = transcript.result.fault
    assert fault.player is Player.MAKER
    assert fault.round == 3
    assert "retried and still" in fault.message
    assert transcript.result.winner is Player.BREAKER
    assert replay(transcript).consistent

@pytest.mark.parametrize("seed", range(3))
def test_multiplex_batches_stay_within_k_times_b(seed):
    config = GameConfig.from_spec("copies:K3", 8, breaker_bias=2, seed=seed)
    multiplex = parallel_multiplex([random_maker(), random_maker()])
    transcript = run_game(config, multiplex, RandomBreaker())
    assert transcript.result.fault is None
    sizes = [size for per_part in multiplex.batch_sizes for size in per_part]
    assert sizes
    assert max(sizes) <= 2 * 2

def test_multiplex_audit_rejects_oversized_batch():
    config = GameConfig.from_spec(SIX_SET, seed=0)
    multiplex = parallel_multiplex([ListMaker([]), ListMaker([])])
    history = [
        MoveRecord(1, Player.MAKER, "claim", (0,)),
        MoveRecord(1, Player.BREAKER, "claim", (1, 2, 3)),
    ]
    view = GameView(config, config.new_board(), 2, Player.MAKER, 1, history, make_rng(0, 1))
    with pytest.raises(InvariantViolation, match="3 Breaker claims over 2 rounds"):
        multiplex.move(view)

def test_parse_win_errors():
    with pytest.raises(ConfigError):
        parse_win("copies:K3")
    with pytest.raises(ConfigError):
        parse_win("mystery:3", 5)
    with pytest.raises(ConfigError):
        parse_win("clusters:K3", 5)
    assert parse_win("kvertex:1:4", 6).spec == "kvertex:1:4"
    assert parse_win("copies:K3", 5).labels() == (3, "K3")

def test_config_validation():
    with pytest.raises(ConfigError):
        GameConfig.from_spec(PAIRS_OF_FOUR, breaker_bias=0)
    with pytest.raises(ConfigError):
        GameConfig.from_spec(PAIRS_OF_FOUR, max_rounds=0)
    with pytest.raises(ConfigError):
        GameConfig.from_spec(PAIRS_OF_FOUR, seed=-1)
    config = GameConfig.from_spec("copies:K3", 5, dynamic=True)
    assert config.round_cap == 20
    assert GameConfig.from_dict(config.to_dict()).to_dict() == config.to_dict()
