from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Set

from .board import Board, Player, new_complete_board
from .constants import DEFAULT_DELTA, DEFAULT_T_CLUSTER, FAMILY_INDEX_CAPACITY
from .dangerous import DangerousTracker
from .engine import Claim, FamilyWin, GameConfig, GameView, MoveRecord, Strategy
from .exceptions import CapacityExceeded, ConfigError, InvariantViolation, PreconditionError
from .potential import PotentialState, f_value
from .winsets import (
    PatternGraph,
    WinningFamily,
    enumerate_clusters,
    enumerate_h_copies,
    enumerate_simple_fans,
    m2_maximal_subgraph,
)

__all__ = [
    "NullBreaker",
    "RandomBreaker",
    "PotentialBreaker",
    "ForestBreaker",
    "FanPreventionConfig",
    "DynamicHBreaker",
    "IsolationBreaker",
    "potential_breaker",
    "dynamic_h_breaker",
    "isolation_breaker",
]

_LOG = logging.getLogger(__name__)


def _lowest_open(board: Board, k: int, taken: Set[int]) -> List[int]:
    picks = []
    if k <= 0:
        return picks
    for e in board.open_elements():
        if e not in taken:
            picks.append(e)
            if len(picks) == k:
                break
    return picks


class NullBreaker(Strategy):
    name = "null"

    def move(self, view: GameView) -> Claim:
        return Claim(())

class RandomBreaker(Strategy):
    name = "random"

    def move(self, view: GameView) -> Claim:
        free = view.board.open_elements()
        k = min(view.budget, len(free))
        if k == 0:
            return Claim(())
        picks = view.rng.choice(len(free), size=k, replace=False)
        return Claim(sorted(free[i] for i in picks.tolist()))


class PotentialBreaker(Strategy):
    name = "potential"

    def __init__(self, family: WinningFamily, p: int = 1, q: int = 1, capacity: int = FAMILY_INDEX_CAPACITY):
        self.family = family
        self.p = p
        self.q = q
        self.state = PotentialState(family.index(capacity), p, q)
        self.f = f_value(family, p, q, capacity)
        self.phi: List[float] = []
        self._synced = 0
        self._applied: Set[int] = set()

    def sync(self, history: Sequence[MoveRecord]) -> None:
        for rec in history[self._synced:]:
            if rec.kind != "claim":
                continue
            for e in rec.elements:
                if rec.player is Player.MAKER:
                    self.state.maker_claim(e)
                elif e in self._applied:
                    self._applied.discard(e)
                else:
                    self.state.breaker_claim(e)
        self._synced = len(history)

    def choose(self, board: Board, k: int, taken: Optional[Set[int]] = None) -> List[int]:
        taken = taken if taken is not None else set()
        picks: List[int] = []
        for _ in range(k):
            free = [e for e in board.open_elements() if e not in taken]
            if not free:
                break
            e = self.state.argmax(free)
            self.state.breaker_claim(e)
            self._applied.add(e)
            taken.add(e)
            picks.append(e)
        return picks

    def move(self, view: GameView) -> Claim:
        self.sync(view.history)
        return Claim(self.choose(view.board, view.budget))

    def observe(self, view: GameView) -> None:
        self.sync(view.history)
        self.phi.append(self.state.total)

    def report(self) -> dict:
        return {
            "name": self.name,
            "spec": self.spec or self.name,
            "family": self.family.describe(),
            "potential": {"phi": list(self.phi), **self.f.to_dict()},
        }

def potential_breaker(family: WinningFamily, p: int = 1, q: int = 1, capacity: int = FAMILY_INDEX_CAPACITY) -> PotentialBreaker:
    return PotentialBreaker(family, p, q, capacity)


class ForestBreaker(Strategy):
    """Blocks every free pair at both endpoints of Maker's edges, newest edge first."""

    name = "forest"

    def __init__(self, pattern: PatternGraph):
        self.pattern = pattern
        core = pattern.without_isolated()
        self.has_cherry = any(core.degree(u) >= 2 for u in range(core.k))
        self._maker_edges: List[int] = []
        self._synced = 0

    def sync(self, history: Sequence[MoveRecord]) -> None:
        for rec in history[self._synced:]:
            if rec.player is Player.MAKER and rec.kind == "claim":
                self._maker_edges.extend(rec.elements)
        self._synced = len(history)

    def choose(self, board: Board, k: int, taken: Set[int]) -> List[int]:
        picks: List[int] = []
        if self.has_cherry:
            n = board.n
            done: Set[int] = set()
            for e in reversed(self._maker_edges):
                for x in board.decode(e):
                    if x in done:
                        continue
                    done.add(x)
                    for w in range(n):
                        if len(picks) >= k:
                            return picks
                        if w == x:
                            continue
                        f = board.encode(x, w)
                        if board.is_open(f) and f not in taken:
                            taken.add(f)
                            picks.append(f)
        rest = _lowest_open(board, k - len(picks), taken)
        taken.update(rest)
        return picks + rest

    def move(self, view: GameView) -> Claim:
        self.sync(view.history)
        return Claim(self.choose(view.board, view.budget, set()))

    def report(self) -> dict:
        return {"name": self.name, "spec": self.spec or self.name, "pattern": self.pattern.label, "cherry": self.has_cherry}


@dataclass(frozen=True)
class FanPreventionConfig:
    delta: float = DEFAULT_DELTA
    t_cluster: int = DEFAULT_T_CLUSTER
    s: int = 1
    t_fan: int = 1

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}.")
        if self.t_cluster < 1 or self.t_fan < 1:
            raise ConfigError("cluster and fan multiplicities must be >= 1.")

    @classmethod
    def from_bias(cls, q: int, delta: float = DEFAULT_DELTA, t_cluster: int = DEFAULT_T_CLUSTER) -> "FanPreventionConfig":
        half = max(q, 1) / 2.0
        s = max(1, math.floor(half ** (1.0 - delta)))
        t_fan = max(1, math.floor(half ** (delta / 3.0)))
        return cls(delta, t_cluster, s, t_fan)

    def to_dict(self) -> dict:
        return asdict(self)


class DynamicHBreaker(Strategy):
    """Breaker for the (dynamic) b-biased H-game on K_n.

    Half of the bias blocks the free pairs of dangerous H-bar graphs in
    Maker's graph. The other half runs two potential strategies, one over
    clusters of copies of H and one over simple fans of H-bar graphs.
    """

    name = "dynamicH"

    def __init__(
        self,
        pattern: PatternGraph,
        b: int,
        n: int,
        *,
        delta: float = DEFAULT_DELTA,
        t_cluster: int = DEFAULT_T_CLUSTER,
        capacity: int = FAMILY_INDEX_CAPACITY,
    ):
        if b < 1:
            raise ConfigError(f"Breaker bias must be >= 1, got {b}.")
        self.pattern = pattern
        self.b = b
        self.n = n
        self.degraded: Optional[str] = None
        self._synced = 0
        self.forest: Optional[ForestBreaker] = None
        self.open_flowers = 0
        self.s1: Optional[PotentialBreaker] = None
        self.s2: Optional[PotentialBreaker] = None
        self.tracker: Optional[DangerousTracker] = None
        self.block = b - b // 2
        self.q = b // 2
        self.q1 = self.q // 2
        self.q2 = self.q - self.q1
        self.fans = FanPreventionConfig.from_bias(max(self.q, 1), delta, t_cluster)
        core = pattern.without_isolated()
        if core.e < 2 or core.is_forest():
            self.target = core
            self.forest = ForestBreaker(core)
            return
        self.target = m2_maximal_subgraph(core)
        self.tracker = DangerousTracker(n, self.target)
        if b < 4:
            self._degrade(f"bias {b} is too small to split")
            return
        try:
            clusters = enumerate_clusters(n, self.target, self.fans.t_cluster)
            fans = enumerate_simple_fans(n, self.target, self.fans.t_fan)
            if self.q1:
                self.s1 = self._potential(clusters, self.q1, capacity)
            self.s2 = self._potential(fans, self.q2, capacity)
        except CapacityExceeded as e:
            self.s1 = self.s2 = None
            self._degrade(str(e))

    def _potential(self, family: WinningFamily, q: int, capacity: int) -> Optional[PotentialBreaker]:
        if family.is_empty():
            return None
        return PotentialBreaker(family, 1, q, capacity)

    def _degrade(self, reason: str) -> None:
        self.degraded = reason
        self.block = self.b
        self.q = self.q1 = self.q2 = 0
        _LOG.warning("dynamic H-Breaker for %s falls back to blocking only: %s", self.target.label, reason)

    def sync(self, history: Sequence[MoveRecord], board: Board) -> None:
        if self.forest is not None:
            self.forest.sync(history)
            return
        for rec in history[self._synced:]:
            if rec.player is Player.MAKER and rec.kind == "claim":
                adj = board.maker_adjacency()
                for e in rec.elements:
                    x, y = board.decode(e)
                    self.tracker.add_maker_edge(adj, x, y)
        self._synced = len(history)
        for sub in (self.s1, self.s2):
            if sub is not None:
                sub.sync(history)

    def choose(self, board: Board, k: int, taken: Optional[Set[int]] = None) -> List[int]:
        taken = taken if taken is not None else set()
        if self.forest is not None:
            return self.forest.choose(board, k, taken)
        block = min(k, self.block + (self.q1 if self.s1 is None else 0) + (self.q2 if self.s2 is None else 0))
        dangerous = self.tracker.priorities(board)
        picks: List[int] = []
        for e in dangerous:
            if len(picks) >= block:
                break
            if e not in taken:
                taken.add(e)
                picks.append(e)
        if self.s1 is not None:
            picks += self.s1.choose(board, min(self.q1, k - len(picks)), taken)
        if self.s2 is not None:
            picks += self.s2.choose(board, k - len(picks), taken)
        rest = _lowest_open(board, k - len(picks), taken)
        taken.update(rest)
        flowers = sum(1 for e in dangerous if e not in taken and self.tracker.pair_counts[e] >= self.fans.s)
        if flowers:
            _LOG.debug("%d pairs with at least %d petals left open", flowers, self.fans.s)
        self.open_flowers = max(self.open_flowers, flowers)
        return picks + rest

    def move(self, view: GameView) -> Claim:
        self.sync(view.history, view.board)
        return Claim(self.choose(view.board, view.budget))

    def observe(self, view: GameView) -> None:
        for sub in (self.s1, self.s2):
            if sub is not None:
                sub.observe(view)

    def describe(self) -> dict:
        return {
            "pattern": self.pattern.label,
            "target": self.target.label,
            "b": self.b,
            "split": {"block": self.block, "clusters": self.q1 if self.s1 else 0, "fans": self.q2 if self.s2 else 0},
            "fan_prevention": self.fans.to_dict(),
            "forest": self.forest is not None,
            "degraded": self.degraded,
            "open_flowers": self.open_flowers,
        }

    def report(self) -> dict:
        out = {"name": self.name, "spec": self.spec or self.name, **self.describe()}
        if self.tracker is not None and self.tracker.truncated:
            out["tracker_truncated"] = True
        return out

def dynamic_h_breaker(pattern: PatternGraph, b: int, n: int, **kwargs) -> DynamicHBreaker:
    return DynamicHBreaker(pattern, b, n, **kwargs)


class IsolationBreaker(Strategy):
    """Keeps a fixed vertex v out of every Maker K_r in the standard game.

    One share of the bias claims edges at v so that Maker's neighbourhood of v
    stays small. The other share plays a dynamic K_{r-1}-game on an auxiliary
    vertex set T, which is revealed as Maker's neighbourhood of v grows, and
    mirrors the auxiliary Breaker's picks back into that neighbourhood.
    """

    name = "isolate"

    def __init__(self, v: int, r: int, b: int, n: int, *, audit: bool = False, delta: float = DEFAULT_DELTA):
        if r < 3:
            raise PreconditionError(f"Isolation needs r >= 3, got {r}.")
        if b < 2:
            raise PreconditionError(f"Isolation splits the bias in two; b must be >= 2, got {b}.")
        if not 0 <= v < n:
            raise PreconditionError(f"Vertex {v} is not in K_{n}.")
        self.v = v
        self.r = r
        self.b = b
        self.n = n
        self.audit_enabled = audit
        self.star_budget = b - b // 2
        self.aux_budget = b // 2
        self.t_size = max(2, math.ceil(2 * n / b))
        aux_pattern = PatternGraph.complete(r - 1)
        self.aux_board = new_complete_board(self.t_size, dynamic=True)
        self.aux_config = GameConfig(
            FamilyWin(enumerate_h_copies(self.t_size, aux_pattern)),
            breaker_bias=self.aux_budget,
            dynamic=True,
        )
        self.aux_breaker = DynamicHBreaker(aux_pattern, self.aux_budget, self.t_size, delta=delta)
        self.aux_history: List[MoveRecord] = []
        self.aux_round = 0
        self.t_of: Dict[int, int] = {}
        self.w_of: Dict[int, int] = {}
        self.cases: Dict[str, int] = {"1": 0, "2.1": 0, "2.2": 0, "pass": 0}
        self.audits = 0
        self.max_neighbourhood = 0
        self._synced = 0

    def _check_config(self, config: GameConfig) -> None:
        if config.maker_bias != 1 or config.dynamic:
            raise PreconditionError("Isolation plays the standard game: static board, Maker bias 1.")
        if config.n != self.n:
            raise PreconditionError(f"Isolation was set up for K_{self.n}, the game is on n={config.n}.")

    def _aux_pair(self, u: int, w: int) -> int:
        return self.aux_board.encode(self.t_of[u], self.t_of[w])

    def _aux_record(self, player: Player, kind: str, elements) -> None:
        self.aux_history.append(MoveRecord(self.aux_round, player, kind, tuple(elements)))

    def _maker_edge(self, board: Board, e: int) -> bool:
        x, y = board.decode(e)
        v = self.v
        if y == v:
            x, y = y, x
        if x == v:
            self.cases["2.1"] += 1
            return self._add_neighbour(board, y)
        if x in self.t_of and y in self.t_of:
            self.cases["2.2"] += 1
            self.aux_round += 1
            pair = self._aux_pair(x, y)
            self.aux_board.claim(pair, Player.MAKER)
            self._aux_record(Player.MAKER, "claim", (pair,))
            return True
        self.cases["1"] += 1
        return False

    def _add_neighbour(self, board: Board, y: int) -> bool:
        used = set(self.w_of)
        free = next((t for t in range(self.t_size) if t not in used), None)
        if free is None:
            raise InvariantViolation(
                f"auxiliary set T of size {self.t_size} is exhausted at |N_M(v)| = {len(self.t_of) + 1}"
            )
        prior = sorted(self.t_of)
        self.t_of[y] = free
        self.w_of[free] = y
        self.max_neighbourhood = max(self.max_neighbourhood, len(self.t_of))
        if not prior:
            return False
        self.aux_round += 1
        pairs = [self._aux_pair(y, w) for w in prior]
        self.aux_board.reveal(pairs)
        self._aux_record(Player.MAKER, "reveal", pairs)
        for owner in (Player.MAKER, Player.BREAKER):
            synced = [self._aux_pair(y, w) for w in prior if board.state(board.encode(y, w)) == owner.state]
            for pair in synced:
                self.aux_board.claim(pair, owner)
            if synced:
                self._aux_record(owner, "claim", synced)
        return True

    def move(self, view: GameView) -> Claim:
        self._check_config(view.config)
        board = view.board
        aux_turn = False
        maker_moved = False
        for rec in view.history[self._synced:]:
            if rec.player is Player.MAKER and rec.kind == "claim":
                maker_moved = maker_moved or bool(rec.elements)
                for e in rec.elements:
                    aux_turn = self._maker_edge(board, e) or aux_turn
        self._synced = len(view.history)
        if not maker_moved:
            self.cases["pass"] += 1

        budget = view.budget
        taken: Set[int] = set()
        picks: List[int] = []
        last = view.history[-1] if view.history and view.history[-1].player is Player.MAKER else None
        ends = set(board.decode(last.elements[0])) - {self.v} if last and last.elements else set()
        star = [board.encode(self.v, x) for x in sorted(ends)]
        star += [board.encode(self.v, w) for w in range(self.n) if w != self.v]
        for e in star:
            if len(picks) >= min(self.star_budget, budget):
                break
            if board.is_open(e) and e not in taken:
                taken.add(e)
                picks.append(e)

        aux_claims: List[int] = []
        if aux_turn and self.aux_board.open_count and len(picks) < budget:
            aux_view = GameView(
                self.aux_config,
                self.aux_board,
                self.aux_round,
                Player.BREAKER,
                min(self.aux_budget, self.aux_board.open_count, budget - len(picks)),
                self.aux_history,
                view.rng,
            )
            self.aux_breaker.observe(aux_view)
            aux_move = self.aux_breaker.move(aux_view)
            for pair in aux_move.elements:
                ta, tb = self.aux_board.decode(pair)
                f = board.encode(self.w_of[ta], self.w_of[tb])
                if not board.is_open(f) or f in taken:
                    raise InvariantViolation(f"auxiliary pick {pair} mirrors to unavailable real edge {f}")
                taken.add(f)
                picks.append(f)
                aux_claims.append(pair)

        picks += _lowest_open(board, budget - len(picks), taken)
        for f in picks:
            x, y = board.decode(f)
            if x in self.t_of and y in self.t_of:
                pair = self._aux_pair(x, y)
                if pair not in aux_claims:
                    aux_claims.append(pair)
        for pair in aux_claims:
            self.aux_board.claim(pair, Player.BREAKER)
        if aux_claims:
            self._aux_record(Player.BREAKER, "claim", aux_claims)
        if self.audit_enabled:
            self.audit(board, picks)
        return Claim(picks)

    def audit(self, board: Board, pending: Sequence[int] = ()) -> None:
        self.audits += 1
        neighbourhood = [w for w in range(self.n) if board.maker_adjacency()[self.v] >> w & 1]
        if sorted(self.t_of) != neighbourhood:
            raise InvariantViolation("the map w -> t_w does not cover exactly Maker's neighbourhood of v")
        if len(set(self.t_of.values())) != len(self.t_of):
            raise InvariantViolation("the map w -> t_w is not injective")
        if len(self.t_of) > self.t_size:
            raise InvariantViolation(f"|N_M(v)| = {len(self.t_of)} exceeds |T| = {self.t_size}")
        pending_set = set(pending)
        for i, u in enumerate(neighbourhood):
            for w in neighbourhood[i + 1:]:
                e = board.encode(u, w)
                real = Player.BREAKER.state if e in pending_set else board.state(e)
                pair = self._aux_pair(u, w)
                if not self.aux_board.is_visible(pair) or self.aux_board.state(pair) != real:
                    raise InvariantViolation(f"mirror broken between real edge {u}-{w} and auxiliary pair {pair}")

    def report(self) -> dict:
        return {
            "name": self.name,
            "spec": self.spec or self.name,
            "v": self.v,
            "r": self.r,
            "split": {"star": self.star_budget, "auxiliary": self.aux_budget},
            "t_size": self.t_size,
            "max_neighbourhood": self.max_neighbourhood,
            "cases": dict(self.cases),
            "audits": self.audits,
            "auxiliary": self.aux_breaker.report(),
        }

def isolation_breaker(v: int, r: int, b: int, n: int, **kwargs) -> IsolationBreaker:
    return IsolationBreaker(v, r, b, n, **kwargs)
