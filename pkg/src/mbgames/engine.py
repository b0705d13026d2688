from __future__ import annotations

import json
import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Callable, ClassVar, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .board import Board, Player, decode_pair, new_abstract_board, new_complete_board
from .constants import TRANSCRIPT_FORMAT_VERSION
from .exceptions import (
    ConfigError,
    IllegalMoveError,
    InvariantViolation,
    TranscriptFormatError,
)
from .factors import factor_in_adjacency
from .graphsearch import find_clique
from .rng import BREAKER_STREAM, MAKER_STREAM, make_rng
from .utils import canonical_json
from .winsets import (
    ExplicitFamily,
    HCopiesFamily,
    WinningFamily,
    enumerate_clusters,
    enumerate_h_copies,
    enumerate_simple_fans,
    load_pattern,
)

__all__ = [
    "Claim",
    "Reveal",
    "Move",
    "MoveRecord",
    "WinCondition",
    "FamilyWin",
    "KFactorWin",
    "KVertexWin",
    "parse_win",
    "GameConfig",
    "GameView",
    "Strategy",
    "Fault",
    "GameResult",
    "Transcript",
    "ReplayReport",
    "run_game",
    "replay",
    "load_transcript",
    "ParallelMultiplex",
    "parallel_multiplex",
]

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class Claim:
    elements: Tuple[int, ...] = ()
    kind: ClassVar[str] = "claim"

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(int(e) for e in self.elements))

@dataclass(frozen=True)
class Reveal:
    elements: Tuple[int, ...] = ()
    kind: ClassVar[str] = "reveal"

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(int(e) for e in self.elements))

Move = Union[Claim, Reveal]

@dataclass(frozen=True)
class MoveRecord:
    round: int
    player: Player
    kind: str
    elements: Tuple[int, ...]

    def move(self) -> Move:
        return Claim(self.elements) if self.kind == "claim" else Reveal(self.elements)

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "player": self.player.value,
            "kind": self.kind,
            "elements": list(self.elements),
        }

    @classmethod
    def from_dict(cls, data: dict, position: int) -> "MoveRecord":
        round_index = data.get("round") if isinstance(data, dict) else None
        try:
            round_no = int(data["round"])
            player = Player(data["player"])
            kind = data["kind"]
            elements = tuple(int(e) for e in data["elements"])
        except (KeyError, TypeError, ValueError) as e:
            raise TranscriptFormatError(f"malformed move #{position}: {e}", round_index) from e
        if kind not in ("claim", "reveal"):
            raise TranscriptFormatError(f"unknown move kind {kind!r}", round_no)
        return cls(round_no, player, kind, elements)


class WinCondition(ABC):
    spec: str
    n: Optional[int]
    universe_size: int

    @abstractmethod
    def satisfied_after(self, board: Board, claimed: Sequence[int]) -> bool:
        ...

    @abstractmethod
    def final_count(self, board: Board, maker_won: bool) -> int:
        ...

    def labels(self) -> Tuple[Optional[int], str]:
        return None, self.spec

    def new_board(self, dynamic: bool) -> Board:
        if self.n is not None:
            return new_complete_board(self.n, dynamic)
        return new_abstract_board(self.universe_size, dynamic)


class FamilyWin(WinCondition):
    def __init__(self, family: WinningFamily, spec: Optional[str] = None):
        self.family = family
        self.n = getattr(family, "n", None)
        self.universe_size = family.universe_size
        self.spec = spec or _family_spec(family)

    def satisfied_after(self, board: Board, claimed: Sequence[int]) -> bool:
        if not isinstance(self.family, HCopiesFamily):
            self.family.index()
        return any(self.family.completed_by(board, e) for e in claimed)

    def final_count(self, board: Board, maker_won: bool) -> int:
        return self.family.count_fully_claimed(board)

    def labels(self) -> Tuple[Optional[int], str]:
        pattern = getattr(self.family, "pattern", None)
        if pattern is None:
            return None, "explicit"
        return pattern.k, pattern.label

class KFactorWin(WinCondition):
    def __init__(self, n: int, r: int):
        if r < 2:
            raise ConfigError(f"K_r-factor games need r >= 2, got {r}.")
        self.n = n
        self.r = r
        self.universe_size = n * (n - 1) // 2
        self.spec = f"kfactor:{r}"
        self._edges_needed = (n // r) * r * (r - 1) // 2

    def holds(self, board: Board) -> bool:
        n, r = self.n, self.r
        if n % r:
            return False
        if len(board.maker_elements()) < self._edges_needed:
            return False
        adj = board.maker_adjacency()
        if any(a.bit_count() < r - 1 for a in adj):
            return False
        for v in range(n):
            if find_clique(adj, adj[v], r - 1) is None:
                return False
        blocks, _ = factor_in_adjacency(adj, r)
        return blocks is not None

    def satisfied_after(self, board: Board, claimed: Sequence[int]) -> bool:
        return bool(claimed) and self.holds(board)

    def final_count(self, board: Board, maker_won: bool) -> int:
        return int(maker_won)

    def labels(self) -> Tuple[Optional[int], str]:
        return self.r, f"K{self.r}"

class KVertexWin(WinCondition):
    def __init__(self, n: int, v: int, r: int):
        if not 0 <= v < n:
            raise ConfigError(f"Vertex {v} is not in K_{n}.")
        if r < 2:
            raise ConfigError(f"K_r-at-vertex games need r >= 2, got {r}.")
        self.n = n
        self.v = v
        self.r = r
        self.universe_size = n * (n - 1) // 2
        self.spec = f"kvertex:{v}:{r}"

    def holds(self, board: Board) -> bool:
        adj = board.maker_adjacency()
        return find_clique(adj, adj[self.v], self.r - 1) is not None

    def satisfied_after(self, board: Board, claimed: Sequence[int]) -> bool:
        adj = board.maker_adjacency()
        star = adj[self.v] | (1 << self.v)
        for e in claimed:
            x, y = decode_pair(e, self.n)
            if star >> x & 1 and star >> y & 1:
                return self.holds(board)
        return False

    def final_count(self, board: Board, maker_won: bool) -> int:
        return int(maker_won)

    def labels(self) -> Tuple[Optional[int], str]:
        return self.r, f"K{self.r}"


def _family_spec(family: WinningFamily) -> str:
    kind = family.describe()["kind"]
    if isinstance(family, ExplicitFamily):
        return f"explicit:{family.universe_size}:{json.dumps(family.as_lists(), separators=(',', ':'))}"
    pattern = family.pattern.label
    if kind == "copies":
        return f"copies:{pattern}"
    if kind == "clusters":
        return f"clusters:{pattern}:{family.t}"
    return f"fans:{pattern}:{family.t}"

def parse_win(spec: str, n: Optional[int] = None) -> WinCondition:
    text = spec.strip()
    head, _, rest = text.partition(":")
    try:
        if head == "explicit":
            size, _, body = rest.partition(":")
            return FamilyWin(ExplicitFamily(int(size), json.loads(body)), text)
        if n is None:
            raise ConfigError(f"Win condition {spec!r} needs a vertex count n.")
        if head == "kfactor":
            return KFactorWin(n, int(rest))
        if head == "kvertex":
            v, _, r = rest.partition(":")
            return KVertexWin(n, int(v), int(r))
        if head == "copies":
            return FamilyWin(enumerate_h_copies(n, load_pattern(rest)))
        if head in ("clusters", "fans"):
            m = re.fullmatch(r"(.+):(\d+)", rest)
            if not m:
                raise ConfigError(f"{head} win conditions look like '{head}:K4:2', got {spec!r}.")
            factory = enumerate_clusters if head == "clusters" else enumerate_simple_fans
            return FamilyWin(factory(n, load_pattern(m.group(1)), int(m.group(2))))
    except (ValueError, json.JSONDecodeError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"Bad win condition {spec!r}: {e}") from e
    raise ConfigError(f"Unknown win condition {spec!r} (kfactor:r, kvertex:v:r, copies:H, explicit:size:[...]).")


@dataclass(frozen=True)
class GameConfig:
    win: WinCondition
    maker_bias: int = 1
    breaker_bias: int = 1
    dynamic: bool = False
    max_rounds: Optional[int] = None
    seed: int = 0
    play_out: bool = False

    def __post_init__(self):
        if self.maker_bias < 1 or self.breaker_bias < 1:
            raise ConfigError(f"Biases must be >= 1, got m={self.maker_bias}, b={self.breaker_bias}.")
        if self.max_rounds is not None and self.max_rounds < 1:
            raise ConfigError(f"max_rounds must be positive, got {self.max_rounds}.")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError(f"Seeds are unsigned 64-bit integers, got {self.seed}.")

    @classmethod
    def from_spec(cls, win: str, n: Optional[int] = None, **kwargs) -> "GameConfig":
        return cls(parse_win(win, n), **kwargs)

    @property
    def n(self) -> Optional[int]:
        return self.win.n

    @property
    def universe_size(self) -> int:
        return self.win.universe_size

    @property
    def round_cap(self) -> int:
        if self.max_rounds is not None:
            return self.max_rounds
        return self.universe_size * (2 if self.dynamic else 1)

    def new_board(self) -> Board:
        return self.win.new_board(self.dynamic)

    def bias(self, player: Player) -> int:
        return self.maker_bias if player is Player.MAKER else self.breaker_bias

    def to_dict(self) -> dict:
        return {
            "win": self.win.spec,
            "n": self.n,
            "universe_size": self.universe_size,
            "maker_bias": self.maker_bias,
            "breaker_bias": self.breaker_bias,
            "dynamic": self.dynamic,
            "max_rounds": self.max_rounds,
            "seed": self.seed,
            "play_out": self.play_out,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GameConfig":
        try:
            return cls(
                parse_win(data["win"], data.get("n")),
                maker_bias=int(data["maker_bias"]),
                breaker_bias=int(data["breaker_bias"]),
                dynamic=bool(data["dynamic"]),
                max_rounds=data.get("max_rounds"),
                seed=int(data["seed"]),
                play_out=bool(data.get("play_out", False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise TranscriptFormatError(f"bad config: {e}") from e
            raise TranscriptFormatError(f"bad config: {e!r}") from e


@dataclass(frozen=True)
class GameView:
    config: GameConfig
    board: Board
    round: int
    player: Player
    budget: int
    history: Sequence[MoveRecord]
    rng: np.random.Generator


class Strategy(ABC):
    name: str = "strategy"
    spec: Optional[str] = None

    @abstractmethod
    def move(self, view: GameView) -> Move:
        ...

    def observe(self, view: GameView) -> None:
        pass

    def report(self) -> dict:
        return {"name": self.name, "spec": self.spec or self.name}


@dataclass(frozen=True)
class Fault:
    round: int
    player: Player
    message: str
    kind: Optional[str] = None
    elements: Tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "player": self.player.value,
            "message": self.message,
            "kind": self.kind,
            "elements": list(self.elements),
        }

    @classmethod
    def from_dict(cls, data: Optional[dict]) -> Optional["Fault"]:
        if data is None:
            return None
        return cls(
            int(data["round"]),
            Player(data["player"]),
            str(data["message"]),
            data.get("kind"),
            tuple(int(e) for e in data.get("elements", ())),
        )

@dataclass
class GameResult:
    winner: Player
    fully_claimed: int
    rounds: int
    maker_elements: Tuple[int, ...]
    breaker_elements: Tuple[int, ...]
    fault: Optional[Fault] = None
    maker_won_round: Optional[int] = None
    strategies: Dict[str, dict] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def potential(self) -> Optional[dict]:
        return self.strategies.get("breaker", {}).get("potential")

    def to_dict(self) -> dict:
        return {
            "winner": self.winner.value,
            "fully_claimed": self.fully_claimed,
            "rounds": self.rounds,
            "partition": {
                "maker": sorted(self.maker_elements),
                "breaker": sorted(self.breaker_elements),
            },
            "fault": self.fault.to_dict() if self.fault else None,
            "maker_won_round": self.maker_won_round,
            "strategies": self.strategies,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GameResult":
        return cls(
            winner=Player(data["winner"]),
            fully_claimed=int(data["fully_claimed"]),
            rounds=int(data["rounds"]),
            maker_elements=tuple(data["partition"]["maker"]),
            breaker_elements=tuple(data["partition"]["breaker"]),
            fault=Fault.from_dict(data.get("fault")),
            maker_won_round=data.get("maker_won_round"),
            strategies=dict(data.get("strategies", {})),
            notes=list(data.get("notes", [])),
        )

@dataclass
class Transcript:
    config: GameConfig
    moves: List[MoveRecord]
    result: Optional[GameResult]

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def winner(self) -> Optional[Player]:
        return self.result.winner if self.result else None

    def to_dict(self) -> dict:
        return {
            "format": TRANSCRIPT_FORMAT_VERSION,
            "config": self.config.to_dict(),
            "moves": [m.to_dict() for m in self.moves],
            "result": self.result.to_dict() if self.result else None,
            "seed": self.config.seed,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise TranscriptFormatError(f"not JSON: {e}") from e
        if not isinstance(data, dict) or "config" not in data or "moves" not in data:
            raise TranscriptFormatError("transcript needs 'config' and 'moves' fields")
        config = GameConfig.from_dict(data["config"])
        if not isinstance(data["moves"], list):
            raise TranscriptFormatError("'moves' must be a list")
        moves = [MoveRecord.from_dict(m, i) for i, m in enumerate(data["moves"])]
        raw_result = data.get("result")
        try:
            result = GameResult.from_dict(raw_result) if raw_result else None
        except (KeyError, TypeError, ValueError) as e:
            last = moves[-1].round if moves else None
            raise TranscriptFormatError(f"bad result block: {e!r}", last) from e
        return cls(config, moves, result)

def load_transcript(path: str) -> Transcript:
    from .utils import read_text

    return Transcript.from_json(read_text(path, "transcript"))


def apply_move(board: Board, config: GameConfig, player: Player, move: Move) -> None:
    if isinstance(move, Reveal):
        if player is Player.BREAKER:
            raise IllegalMoveError("Breaker cannot enlarge the board.")
        if not config.dynamic:
            raise IllegalMoveError("Reveals are only legal on dynamic boards.")
        board.reveal(move.elements)
        return
    if not isinstance(move, Claim):
        raise IllegalMoveError(f"Unknown move {move!r}.")
    elements = move.elements
    limit = config.bias(player)
    if len(set(elements)) != len(elements):
        raise IllegalMoveError(f"{player.value} lists an element twice: {list(elements)}.")
    if len(elements) > limit:
        raise IllegalMoveError(f"{player.value} claims {len(elements)} elements with bias {limit}.")
    if (
        player is Player.MAKER
        and config.dynamic
        and not elements
        and board.open_count == 0
        and board.hidden_count > 0
    ):
        raise IllegalMoveError("Nothing is claimable, so Maker must reveal elements this round.")
    for e in elements:
        board.check_claimable(e)
    for e in elements:
        board.claim(e, player)


def _winner(fault: Optional[Fault], maker_won: bool, fully_claimed: int) -> Player:
    if fault is not None and not (maker_won and fault.player is Player.BREAKER):
        return fault.player.opponent
    return Player.MAKER if maker_won or fully_claimed >= 1 else Player.BREAKER

def run_game(
    config: GameConfig,
    maker: Strategy,
    breaker: Strategy,
    *,
    resume: Optional[Transcript] = None,
) -> Transcript:
    board = config.new_board()
    history: List[MoveRecord] = []
    rngs = {
        Player.MAKER: make_rng(config.seed, MAKER_STREAM),
        Player.BREAKER: make_rng(config.seed, BREAKER_STREAM),
    }
    round_no = 0
    turn = Player.MAKER
    maker_won = False
    won_round: Optional[int] = None
    fault: Optional[Fault] = None

    if resume is not None:
        for rec in resume.moves:
            try:
                apply_move(board, config, rec.player, rec.move())
            except IllegalMoveError as e:
                raise TranscriptFormatError(f"cannot resume: {e}", rec.round) from e
            history.append(rec)
            round_no = rec.round
            turn = rec.player.opponent
            if rec.player is Player.MAKER and rec.kind == "claim" and not maker_won:
                if config.win.satisfied_after(board, rec.elements):
                    maker_won, won_round = True, rec.round
        _LOG.info("resumed game at round %d with %d moves", round_no, len(history))

    def view_for(player: Player, budget: int) -> GameView:
        return GameView(config, board, round_no, player, budget, history, rngs[player])

    while not (maker_won and not config.play_out):
        if turn is Player.MAKER:
            if board.is_exhausted() or round_no >= config.round_cap:
                break
            round_no += 1
            view = view_for(Player.MAKER, config.maker_bias)
            move = None
            try:
                move = maker.move(view)
                apply_move(board, config, Player.MAKER, move)
            except (IllegalMoveError, InvariantViolation) as e:
                fault = Fault(round_no, Player.MAKER, str(e), getattr(move, "kind", None), getattr(move, "elements", ()))
                _LOG.warning("maker fault in round %d: %s", round_no, e)
                break
            history.append(MoveRecord(round_no, Player.MAKER, move.kind, move.elements))
            if move.kind == "claim" and not maker_won and config.win.satisfied_after(board, move.elements):
                maker_won, won_round = True, round_no
                _LOG.debug("maker completed a winning set in round %d", round_no)
                if not config.play_out:
                    break
            breaker.observe(view_for(Player.BREAKER, 0))
            turn = Player.BREAKER
        else:
            turn = Player.MAKER
            if board.open_count == 0:
                continue
            view = view_for(Player.BREAKER, min(config.breaker_bias, board.open_count))
            move = None
            try:
                move = breaker.move(view)
                apply_move(board, config, Player.BREAKER, move)
            except (IllegalMoveError, InvariantViolation) as e:
                fault = Fault(round_no, Player.BREAKER, str(e), getattr(move, "kind", None), getattr(move, "elements", ()))
                _LOG.warning("breaker fault in round %d: %s", round_no, e)
                break
            history.append(MoveRecord(round_no, Player.BREAKER, move.kind, move.elements))
            maker.observe(view_for(Player.MAKER, 0))

    fully = config.win.final_count(board, maker_won)
    winner = _winner(fault, maker_won, fully)
    notes: List[str] = []
    if round_no >= config.round_cap and not board.is_exhausted() and not maker_won and fault is None:
        notes.append(f"stopped at the round cap ({config.round_cap})")
    result = GameResult(
        winner=winner,
        fully_claimed=fully,
        rounds=round_no,
        maker_elements=board.maker_elements(),
        breaker_elements=board.breaker_elements(),
        fault=fault,
        maker_won_round=won_round,
        strategies={"maker": maker.report(), "breaker": breaker.report()},
        notes=notes,
    )
    _LOG.info("game over after %d rounds: %s wins (seed=%d)", round_no, winner.value, config.seed)
    return Transcript(config, history, result)


@dataclass(frozen=True)
class ReplayReport:
    consistent: bool
    divergence_round: Optional[int] = None
    message: str = ""
    winner: Optional[Player] = None
    fully_claimed: Optional[int] = None

    def summary(self) -> str:
        if self.consistent:
            return "consistent"
        where = f" at round {self.divergence_round}" if self.divergence_round is not None else ""
        return f"divergence{where}: {self.message}"

def replay(transcript: Transcript) -> ReplayReport:
    config = transcript.config
    board = config.new_board()
    maker_won = False
    prev_round, prev_player = 0, Player.BREAKER
    for rec in transcript.moves:
        in_order = rec.round > prev_round and rec.player is Player.MAKER
        in_order = in_order or (rec.round == prev_round and prev_player is Player.MAKER and rec.player is Player.BREAKER)
        if not in_order:
            return ReplayReport(False, rec.round, f"{rec.player.value} moves out of turn")
        if maker_won and not config.play_out:
            return ReplayReport(False, rec.round, "moves recorded after Maker already won")
        try:
            apply_move(board, config, rec.player, rec.move())
        except IllegalMoveError as e:
            return ReplayReport(False, rec.round, str(e))
        if rec.player is Player.MAKER and rec.kind == "claim" and not maker_won:
            maker_won = config.win.satisfied_after(board, rec.elements)
        prev_round, prev_player = rec.round, rec.player
    fully = config.win.final_count(board, maker_won)
    result = transcript.result
    if result is None:
        return ReplayReport(True, None, "partial transcript", None, fully)
    if result.fault is not None and result.fault.kind is not None:
        probe = board.copy()
        move = Claim(result.fault.elements) if result.fault.kind == "claim" else Reveal(result.fault.elements)
        try:
            apply_move(probe, config, result.fault.player, move)
        except IllegalMoveError:
            pass
        else:
            return ReplayReport(False, result.fault.round, "recorded fault is a legal move")
    winner = _winner(result.fault, maker_won, fully)
    last = prev_round if transcript.moves else None
    if sorted(board.maker_elements()) != sorted(result.maker_elements) or sorted(
        board.breaker_elements()
    ) != sorted(result.breaker_elements):
        return ReplayReport(False, last, "final partition differs from the recorded one")
    if fully != result.fully_claimed:
        return ReplayReport(False, last, f"recomputed {fully} fully claimed sets, transcript says {result.fully_claimed}")
    if winner is not result.winner:
        return ReplayReport(False, last, f"recomputed winner {winner.value}, transcript says {result.winner.value}")
    return ReplayReport(True, None, "", winner, fully)


class ParallelMultiplex(Strategy):
    """Maker strategy that interleaves several sub-strategies round by round.

    Each sub-strategy plays on a private board where everything it did not
    claim itself shows up as Breaker's, so it faces one batched Breaker move
    per turn.
    """

    name = "multiplex"

    def __init__(self, strategies: Sequence[Strategy], schedule: Optional[Callable[[int], int]] = None):
        if not strategies:
            raise ConfigError("multiplex needs at least one strategy.")
        self.strategies = list(strategies)
        k = len(self.strategies)
        self.schedule = schedule or (lambda round_no: (round_no - 1) % k)
        self._boards: List[Optional[Board]] = [None] * k
        self._histories: List[List[MoveRecord]] = [[] for _ in range(k)]
        self._synced = [0] * k
        self._turns = [0] * k
        self._rngs: List[Optional[np.random.Generator]] = [None] * k
        self._owner: Dict[int, int] = {}
        self.batch_sizes: List[List[int]] = [[] for _ in range(k)]
        self.retries = [0] * k
        self._last_round = [0] * k

    def move(self, view: GameView) -> Move:
        if len(self.strategies) == 1:
            return self.strategies[0].move(view)
        i = self.schedule(view.round)
        if not 0 <= i < len(self.strategies):
            raise InvariantViolation(f"schedule picked sub-strategy {i} of {len(self.strategies)}")
        sub_view = self._sync(i, view)
        move = self.strategies[i].move(sub_view)
        problem = self._check(view.board, move)
        if problem is not None:
            _LOG.debug("multiplex: sub-strategy %d %s; retrying once on the live board", i, problem)
            self.retries[i] += 1
            self._refresh(i, view.board)
            move = self.strategies[i].move(sub_view)
            problem = self._check(view.board, move)
            if problem is not None:
                raise IllegalMoveError(f"sub-strategy {i} retried and still {problem}")
        if isinstance(move, Claim):
            for e in move.elements:
                self._owner[e] = i
        return move

    def _check(self, board: Board, move: Move) -> Optional[str]:
        if isinstance(move, Claim):
            for e in move.elements:
                if not 0 <= e < board.universe_size or board.state(e) != 0 or not board.is_visible(e):
                    return f"claims unavailable element {e}"
        return None

    def _refresh(self, i: int, live: Board) -> None:
        board = self._boards[i]
        hidden_here = [e for e in live.visible_elements() if not board.is_visible(e)]
        if hidden_here:
            board.reveal(hidden_here)
        for player in (Player.MAKER, Player.BREAKER):
            for e in live.elements_of(player):
                if board.state(e) == 0:
                    mine = player is Player.MAKER and self._owner.get(e) == i
                    board.claim(e, Player.MAKER if mine else Player.BREAKER)

    def _sync(self, i: int, view: GameView) -> GameView:
        config = view.config
        if self._boards[i] is None:
            self._boards[i] = config.new_board()
            self._rngs[i] = make_rng(config.seed, MAKER_STREAM, i + 1)
        board = self._boards[i]
        batch: List[int] = []
        real_breaker = 0
        for rec in view.history[self._synced[i]:]:
            if rec.kind == "reveal":
                board.reveal(rec.elements)
                continue
            for e in rec.elements:
                if rec.player is Player.MAKER and self._owner.get(e) == i:
                    board.claim(e, Player.MAKER)
                else:
                    board.claim(e, Player.BREAKER)
                    batch.append(e)
                    if rec.player is Player.BREAKER:
                        real_breaker += 1
        self._synced[i] = len(view.history)
        gap = view.round - self._last_round[i]
        if real_breaker > gap * config.breaker_bias:
            raise InvariantViolation(
                f"sub-strategy {i} saw {real_breaker} Breaker claims over {gap} rounds at bias {config.breaker_bias}"
            )
        self._last_round[i] = view.round
        if self._turns[i] > 0 or batch:
            self._histories[i].append(MoveRecord(self._turns[i], Player.BREAKER, "claim", tuple(batch)))
            if self._turns[i] > 0:
                self.batch_sizes[i].append(real_breaker)
        self._turns[i] += 1
        sub_config = replace(config, breaker_bias=config.breaker_bias * len(self.strategies))
        return GameView(
            sub_config,
            board,
            self._turns[i],
            Player.MAKER,
            view.budget,
            self._histories[i],
            self._rngs[i],
        )

    def report(self) -> dict:
        return {
            "name": self.name,
            "spec": self.spec or self.name,
            "parts": [s.report() for s in self.strategies],
            "batch_sizes": self.batch_sizes,
            "retries": self.retries,
        }

def parallel_multiplex(strategies: Sequence[Strategy], schedule: Optional[Callable[[int], int]] = None) -> ParallelMultiplex:
    return ParallelMultiplex(strategies, schedule)
