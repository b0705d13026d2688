from __future__ import annotations

import json
import logging
from typing import List, Optional, Sequence, Set, Tuple

from .board import Board
from .engine import Claim, GameView, Move, Reveal, Strategy
from .exceptions import ConfigError, StrategySpecError
from .graphsearch import count_cliques

__all__ = [
    "RandomMaker",
    "GreedyCliqueMaker",
    "GreedyAtVertexMaker",
    "ScriptedMaker",
    "random_maker",
    "greedy_clique_maker",
    "greedy_at_vertex_maker",
]

_LOG = logging.getLogger(__name__)

RANDOM_MODES = ("resample", "forfeit")


def _reveal_batch(view: GameView) -> int:
    return min(view.board.hidden_count, view.config.breaker_bias + view.config.maker_bias)

def _must_reveal(board: Board) -> bool:
    return board.dynamic and board.open_count == 0 and board.hidden_count > 0


class RandomMaker(Strategy):
    name = "random"

    def __init__(self, mode: str = "resample"):
        if mode not in RANDOM_MODES:
            raise ConfigError(f"random Maker mode must be one of {RANDOM_MODES}, got {mode!r}.")
        self.mode = mode
        self.passes = 0

    def move(self, view: GameView) -> Move:
        board, rng = view.board, view.rng
        if _must_reveal(board):
            hidden = board.hidden_elements()
            picks = rng.choice(len(hidden), size=_reveal_batch(view), replace=False)
            return Reveal(sorted(hidden[i] for i in picks.tolist()))
        if self.mode == "forfeit":
            chosen: List[int] = []
            for _ in range(view.budget):
                e = int(rng.integers(board.universe_size))
                if board.is_open(e) and e not in chosen:
                    chosen.append(e)
                else:
                    self.passes += 1
            return Claim(chosen)
        free = board.open_elements()
        k = min(view.budget, len(free))
        picks = rng.choice(len(free), size=k, replace=False)
        return Claim(sorted(free[i] for i in picks.tolist()))

    def report(self) -> dict:
        return {"name": self.name, "spec": self.spec or f"random({self.mode})", "mode": self.mode, "passes": self.passes}

def random_maker(mode: str = "resample") -> RandomMaker:
    return RandomMaker(mode)


def _edge_score(adj: Sequence[int], u: int, v: int, r: int, within: Optional[int] = None) -> Tuple[int, int, int]:
    common = adj[u] & adj[v]
    if within is not None:
        common &= within
    cliques = count_cliques(adj, common, r - 2) if r >= 2 else 0
    return cliques, common.bit_count(), adj[u].bit_count() + adj[v].bit_count()

def _greedy_pick(board: Board, adj: List[int], candidates: Sequence[int], r: int, within: Optional[int] = None) -> Optional[int]:
    best, best_key = None, None
    for e in candidates:
        u, v = board.decode(e)
        key = _edge_score(adj, u, v, r, within)
        if best_key is None or key > best_key:
            best, best_key = e, key
    return best

def _lowest_hidden(view: GameView) -> Reveal:
    return Reveal(view.board.hidden_elements()[: _reveal_batch(view)])


class GreedyCliqueMaker(Strategy):
    """Claims the edge closing the most K_r copies; ties go to more common
    neighbours, then higher degree sum, then the lowest element id."""

    name = "greedy"

    def __init__(self, r: int):
        if r < 2:
            raise ConfigError(f"greedy Maker needs r >= 2, got {r}.")
        self.r = r

    def move(self, view: GameView) -> Move:
        board = view.board
        if _must_reveal(board):
            return _lowest_hidden(view)
        adj = list(board.maker_adjacency())
        free = board.open_elements()
        picks: List[int] = []
        for _ in range(min(view.budget, len(free))):
            e = _greedy_pick(board, adj, [f for f in free if f not in picks], self.r)
            u, v = board.decode(e)
            adj[u] |= 1 << v
            adj[v] |= 1 << u
            picks.append(e)
        return Claim(picks)

    def report(self) -> dict:
        return {"name": self.name, "spec": self.spec or f"greedy(r={self.r})", "r": self.r}

def greedy_clique_maker(r: int) -> GreedyCliqueMaker:
    return GreedyCliqueMaker(r)


class GreedyAtVertexMaker(Strategy):
    name = "atvertex"

    def __init__(self, v: int, r: int):
        if r < 3:
            raise ConfigError(f"at-vertex Maker needs r >= 3, got {r}.")
        self.v = v
        self.r = r
        self.phase = 1

    def _pick(self, board: Board, adj: List[int], taken: Set[int]) -> Optional[int]:
        v = self.v
        neighbourhood = adj[v]
        star = []
        for w in range(board.n):
            if w == v:
                continue
            e = board.encode(v, w)
            if board.is_open(e) and e not in taken:
                star.append(((adj[w] & neighbourhood).bit_count(), -e))
        if star:
            return -max(star)[1]
        if self.phase == 1:
            self.phase = 2
            _LOG.debug("star at %d exhausted; building K_%d inside the neighbourhood", v, self.r - 1)
        inside = []
        for e in board.open_elements():
            if e in taken:
                continue
            x, y = board.decode(e)
            if neighbourhood >> x & 1 and neighbourhood >> y & 1:
                inside.append(e)
        if inside:
            return _greedy_pick(board, adj, inside, self.r - 1, within=neighbourhood)
        if self.phase == 2:
            self.phase = 3
        rest = [e for e in board.open_elements() if e not in taken]
        return _greedy_pick(board, adj, rest, self.r) if rest else None

    def move(self, view: GameView) -> Move:
        board = view.board
        if _must_reveal(board):
            return _lowest_hidden(view)
        adj = list(board.maker_adjacency())
        picks: List[int] = []
        taken: Set[int] = set()
        for _ in range(view.budget):
            e = self._pick(board, adj, taken)
            if e is None:
                break
            u, w = board.decode(e)
            adj[u] |= 1 << w
            adj[w] |= 1 << u
            taken.add(e)
            picks.append(e)
        return Claim(picks)

    def report(self) -> dict:
        return {"name": self.name, "spec": self.spec or f"atvertex(v={self.v},r={self.r})", "v": self.v, "r": self.r, "phase": self.phase}

def greedy_at_vertex_maker(v: int, r: int) -> GreedyAtVertexMaker:
    return GreedyAtVertexMaker(v, r)


class ScriptedMaker(Strategy):
    name = "script"

    def __init__(self, moves: Sequence[Move]):
        self.moves = list(moves)
        self.played = 0

    @classmethod
    def from_json(cls, text: str) -> "ScriptedMaker":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise StrategySpecError(f"Maker script is not JSON: {e}") from e
        if isinstance(raw, dict):
            raw = raw.get("moves", [])
        moves: List[Move] = []
        for i, item in enumerate(raw):
            if isinstance(item, dict):
                kind = item.get("kind", "claim")
                elements = item.get("elements", [])
            elif isinstance(item, list):
                kind, elements = "claim", item
            else:
                kind, elements = "claim", [item]
            if kind not in ("claim", "reveal"):
                raise StrategySpecError(f"Maker script move {i} has unknown kind {kind!r}.")
            try:
                moves.append(Claim(elements) if kind == "claim" else Reveal(elements))
            except (TypeError, ValueError) as e:
                raise StrategySpecError(f"Maker script move {i}: {e}") from e
        return cls(moves)

    def move(self, view: GameView) -> Move:
        if self.played < len(self.moves):
            move = self.moves[self.played]
            self.played += 1
            return move
        if _must_reveal(view.board):
            return _lowest_hidden(view)
        return Claim(view.board.open_elements()[: view.budget])

    def report(self) -> dict:
        return {"name": self.name, "spec": self.spec or self.name, "scripted": len(self.moves), "played": self.played}
