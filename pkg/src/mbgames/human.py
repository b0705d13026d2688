from __future__ import annotations

import logging
import re
from typing import Callable, List, Optional, Sequence

from .board import Board, Player
from .engine import Claim, GameConfig, GameView, Move, MoveRecord, Reveal, Strategy, Transcript, apply_move, run_game
from .exceptions import IllegalMoveError, InvalidBoardError, MBGamesError

__all__ = ["HumanQuit", "HumanPlayer", "render_board", "parse_human_move", "human_play"]

_LOG = logging.getLogger(__name__)

_LIST_LIMIT = 60


class HumanQuit(MBGamesError):
    pass


def _edges(board: Board, elements: Sequence[int]) -> str:
    if not elements:
        return "-"
    if board.is_graph:
        return " ".join("{}-{}".format(*board.decode(e)) for e in sorted(elements))
    return " ".join(str(e) for e in sorted(elements))

def _clip(text: str, count: int) -> str:
    return text if count <= _LIST_LIMIT else f"{count} elements"

def render_board(board: Board) -> str:
    maker, breaker = board.maker_elements(), board.breaker_elements()
    lines = [repr(board)]
    lines.append(f"  maker   : {_clip(_edges(board, maker), len(maker))}")
    lines.append(f"  breaker : {_clip(_edges(board, breaker), len(breaker))}")
    if board.is_graph:
        adj = board.maker_adjacency()
        degrees = " ".join(f"{v}:{a.bit_count()}" for v, a in enumerate(adj) if a)
        lines.append(f"  maker degrees: {degrees or '-'}")
    open_elements = board.open_elements()
    lines.append(f"  open    : {_clip(_edges(board, open_elements), len(open_elements))}")
    if board.dynamic:
        lines.append(f"  hidden  : {board.hidden_count}")
    return "\n".join(lines)

def parse_human_move(board: Board, line: str) -> Move:
    """Read 'u v[, u v...]' on graph boards, element ids otherwise; 'reveal ...' and 'pass' work on both."""
    text = line.strip()
    kind = "claim"
    lowered = text.lower()
    if lowered == "pass":
        return Claim(())
    if lowered.startswith("reveal"):
        kind = "reveal"
        text = text[len("reveal"):]
    tokens = [tok for tok in re.split(r"[\s,;-]+", text) if tok]
    try:
        numbers = [int(tok) for tok in tokens]
    except ValueError:
        raise IllegalMoveError(f"could not read {line.strip()!r}; type 'u v' pairs, 'reveal ...', 'pass' or 'quit'")
    if not numbers:
        raise IllegalMoveError("nothing entered")
    if board.is_graph:
        if len(numbers) % 2:
            raise IllegalMoveError("edges are entered as pairs of vertices 'u v'")
        try:
            elements = [board.encode(u, v) for u, v in zip(numbers[::2], numbers[1::2])]
        except InvalidBoardError as e:
            raise IllegalMoveError(str(e)) from e
    else:
        elements = numbers
    return Reveal(elements) if kind == "reveal" else Claim(elements)


class HumanPlayer(Strategy):
    name = "human"

    def __init__(self, input_fn: Callable[[str], str] = input, output_fn: Callable[[str], None] = print):
        self.input_fn = input_fn
        self.output_fn = output_fn
        self.history: Optional[Sequence[MoveRecord]] = None
        self.rejected = 0

    def move(self, view: GameView) -> Move:
        self.history = view.history
        self.output_fn("")
        self.output_fn(f"Round {view.round}: you play {view.player.value}, up to {view.budget} element(s).")
        self.output_fn(render_board(view.board))
        while True:
            try:
                line = self.input_fn(f"{view.player.value}> ")
            except EOFError:
                raise HumanQuit("input closed")
            if line.strip().lower() in ("q", "quit", "exit"):
                raise HumanQuit("player quit")
            try:
                move = parse_human_move(view.board, line)
                apply_move(view.board.copy(), view.config, view.player, move)
            except IllegalMoveError as e:
                self.rejected += 1
                self.output_fn(f"Illegal move: {e}")
                continue
            return move

    def observe(self, view: GameView) -> None:
        self.history = view.history

    def report(self) -> dict:
        return {"name": self.name, "spec": self.spec or self.name, "rejected": self.rejected}


def human_play(
    config: GameConfig,
    human_side: Player,
    opponent: Strategy,
    *,
    input_fn: Callable[[str], str] = input,
    output_fn: Callable[[str], None] = print,
    resume: Optional[Transcript] = None,
) -> Transcript:
    """Play one side at the terminal; quitting returns the partial transcript (result None)."""
    human = HumanPlayer(input_fn, output_fn)
    maker, breaker = (human, opponent) if human_side is Player.MAKER else (opponent, human)
    try:
        transcript = run_game(config, maker, breaker, resume=resume)
    except HumanQuit as e:
        moves: List[MoveRecord] = list(human.history if human.history is not None else (resume.moves if resume else []))
        _LOG.info("human session stopped after %d moves: %s", len(moves), e)
        output_fn(f"Stopped after {len(moves)} moves; resume with --resume.")
        return Transcript(config, moves, None)
    result = transcript.result
    output_fn(f"Game over after {result.rounds} rounds: {result.winner.value} wins.")
    return transcript
