from __future__ import annotations

import bisect
import logging
from enum import Enum, IntEnum
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .exceptions import IllegalMoveError, InvalidBoardError, UnsupportedBoardError

__all__ = [
    "ClaimState",
    "Player",
    "Board",
    "encode_pair",
    "decode_pair",
    "new_complete_board",
    "new_abstract_board",
]

_LOG = logging.getLogger(__name__)


class ClaimState(IntEnum):
    UNCLAIMED = 0
    MAKER = 1
    BREAKER = 2

class Player(str, Enum):
    MAKER = "maker"
    BREAKER = "breaker"

    @property
    def state(self) -> ClaimState:
        return ClaimState.MAKER if self is Player.MAKER else ClaimState.BREAKER

    @property
    def opponent(self) -> "Player":
        return Player.BREAKER if self is Player.MAKER else Player.MAKER


def encode_pair(u: int, v: int, n: int) -> int:
    if u == v:
        raise InvalidBoardError(f"Loop ({u}, {v}) is not an element of K_{n}.")
    if u > v:
        u, v = v, u
    if u < 0 or v >= n:
        raise InvalidBoardError(f"Pair ({u}, {v}) out of range for n={n}.")
    return u * n - u * (u + 1) // 2 + (v - u - 1)

@lru_cache(maxsize=32)
def _pair_table(n: int) -> Tuple[Tuple[int, int], ...]:
    return tuple((u, v) for u in range(n) for v in range(u + 1, n))

def decode_pair(e: int, n: int) -> Tuple[int, int]:
    table = _pair_table(n)
    if not 0 <= e < len(table):
        raise InvalidBoardError(f"Element {e} out of range for n={n}.")
    return table[e]


class Board:
    def __init__(self, universe_size: int, *, n: Optional[int] = None, dynamic: bool = False):
        if universe_size < 1:
            raise InvalidBoardError(f"Universe must be nonempty, got size {universe_size}.")
        if n is not None and universe_size != n * (n - 1) // 2:
            raise InvalidBoardError(f"Graph board on {n} vertices needs {n * (n - 1) // 2} elements.")
        self.universe_size = universe_size
        self.n = n
        self.dynamic = dynamic
        self._claims = bytearray(universe_size)
        self._visible = bytearray(universe_size) if dynamic else bytearray(b"\x01") * universe_size
        self._visible_count = 0 if dynamic else universe_size
        self._open: List[int] = [] if dynamic else list(range(universe_size))
        self._maker: List[int] = []
        self._breaker: List[int] = []
        if n is not None:
            self._maker_adj = [0] * n
            self._breaker_adj = [0] * n

    @property
    def is_graph(self) -> bool:
        return self.n is not None

    def state(self, e: int) -> ClaimState:
        return ClaimState(self._claims[e])

    def is_visible(self, e: int) -> bool:
        return bool(self._visible[e])

    def is_open(self, e: int) -> bool:
        return bool(self._visible[e]) and self._claims[e] == ClaimState.UNCLAIMED

    @property
    def visible_count(self) -> int:
        return self._visible_count

    @property
    def open_count(self) -> int:
        return len(self._open)

    @property
    def hidden_count(self) -> int:
        return self.universe_size - self._visible_count

    def open_elements(self) -> List[int]:
        return list(self._open)

    def visible_elements(self) -> List[int]:
        return [e for e in range(self.universe_size) if self._visible[e]]

    def hidden_elements(self) -> List[int]:
        return [e for e in range(self.universe_size) if not self._visible[e]]

    def maker_elements(self) -> Tuple[int, ...]:
        return tuple(self._maker)

    def breaker_elements(self) -> Tuple[int, ...]:
        return tuple(self._breaker)

    def elements_of(self, player: Player) -> Tuple[int, ...]:
        return self.maker_elements() if player is Player.MAKER else self.breaker_elements()

    def is_exhausted(self) -> bool:
        return not self._open and self._visible_count == self.universe_size

    def check_claimable(self, e: int) -> None:
        if not isinstance(e, int) or not 0 <= e < self.universe_size:
            raise IllegalMoveError(f"Element {e!r} is outside the board (size {self.universe_size}).")
        if self._claims[e] != ClaimState.UNCLAIMED:
            raise IllegalMoveError(f"Element {e} is already claimed by {self.state(e).name.lower()}.")
        if not self._visible[e]:
            raise IllegalMoveError(f"Element {e} is not on the visible board.")

    def check_revealable(self, e: int) -> None:
        if not isinstance(e, int) or not 0 <= e < self.universe_size:
            raise IllegalMoveError(f"Element {e!r} is outside the board (size {self.universe_size}).")
        if self._visible[e]:
            raise IllegalMoveError(f"Element {e} is already visible.")

    def claim(self, e: int, player: Player) -> None:
        self.check_claimable(e)
        self._claims[e] = player.state
        i = bisect.bisect_left(self._open, e)
        del self._open[i]
        if player is Player.MAKER:
            self._maker.append(e)
        else:
            self._breaker.append(e)
        if self.n is not None:
            u, v = decode_pair(e, self.n)
            adj = self._maker_adj if player is Player.MAKER else self._breaker_adj
            adj[u] |= 1 << v
            adj[v] |= 1 << u

    def reveal(self, elements: Iterable[int]) -> None:
        batch = list(elements)
        if not batch:
            raise IllegalMoveError("A reveal must add at least one element.")
        if len(set(batch)) != len(batch):
            raise IllegalMoveError("A reveal lists the same element twice.")
        for e in batch:
            self.check_revealable(e)
        for e in batch:
            self._visible[e] = 1
            bisect.insort(self._open, e)
        self._visible_count += len(batch)

    def encode(self, u: int, v: int) -> int:
        return encode_pair(u, v, self._require_n())

    def decode(self, e: int) -> Tuple[int, int]:
        return decode_pair(e, self._require_n())

    def maker_adjacency(self) -> Sequence[int]:
        self._require_n()
        return self._maker_adj

    def breaker_adjacency(self) -> Sequence[int]:
        self._require_n()
        return self._breaker_adj

    def maker_graph(self) -> nx.Graph:
        n = self._require_n()
        graph = nx.Graph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from(decode_pair(e, n) for e in self._maker)
        return graph

    def check_partition(self) -> None:
        maker = set(self._maker)
        breaker = set(self._breaker)
        if maker & breaker:
            raise InvalidBoardError("An element is owned by both players.")
        for e in range(self.universe_size):
            state = self._claims[e]
            if (state == ClaimState.MAKER) != (e in maker) or (state == ClaimState.BREAKER) != (e in breaker):
                raise InvalidBoardError(f"Claim bookkeeping disagrees at element {e}.")
            if state != ClaimState.UNCLAIMED and not self._visible[e]:
                raise InvalidBoardError(f"Element {e} is claimed but invisible.")
        expected_open = [e for e in range(self.universe_size) if self.is_open(e)]
        if expected_open != self._open:
            raise InvalidBoardError("Open-element list is out of sync.")

    def copy(self) -> "Board":
        clone = Board.__new__(Board)
        clone.universe_size = self.universe_size
        clone.n = self.n
        clone.dynamic = self.dynamic
        clone._claims = bytearray(self._claims)
        clone._visible = bytearray(self._visible)
        clone._visible_count = self._visible_count
        clone._open = list(self._open)
        clone._maker = list(self._maker)
        clone._breaker = list(self._breaker)
        if self.n is not None:
            clone._maker_adj = list(self._maker_adj)
            clone._breaker_adj = list(self._breaker_adj)
        return clone

    def _require_n(self) -> int:
        if self.n is None:
            raise UnsupportedBoardError("This operation needs a graph board (edges of K_n).")
        return self.n

    def __repr__(self) -> str:
        kind = f"K_{self.n}" if self.n is not None else f"abstract[{self.universe_size}]"
        return (
            f"Board({kind}, dynamic={self.dynamic}, visible={self._visible_count}, "
            f"maker={len(self._maker)}, breaker={len(self._breaker)})"
        )


def new_complete_board(n: int, dynamic: bool = False) -> Board:
    if n < 2:
        raise InvalidBoardError(f"A complete-graph board needs n >= 2, got {n}.")
    _LOG.debug("new K_%d board (dynamic=%s)", n, dynamic)
    return Board(n * (n - 1) // 2, n=n, dynamic=dynamic)

def new_abstract_board(size: int, dynamic: bool = False) -> Board:
    return Board(size, dynamic=dynamic)
