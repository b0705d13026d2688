from __future__ import annotations

import logging
import os
import re
from abc import ABC, abstractmethod
from array import array
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from math import comb
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from .board import Board, decode_pair
from .constants import CANONICAL_MAX_VERTICES, FAMILY_INDEX_CAPACITY
from .exceptions import CapacityExceeded, ConfigError, InvalidBoardError, UndefinedDensityError
from .graphsearch import adjacency_from_edges, iter_bits, iter_embeddings, mask_of
from .utils import format_edge_list, parse_edge_list, read_text

__all__ = [
    "PatternGraph",
    "HbarGraph",
    "FamilyIndex",
    "WinningFamily",
    "ExplicitFamily",
    "HCopiesFamily",
    "ClusterFamily",
    "SimpleFanFamily",
    "load_pattern",
    "canonical_form",
    "automorphism_count",
    "m2_density",
    "is_m2_maximal",
    "m2_maximal_subgraph",
    "hbar_graphs",
    "enumerate_h_copies",
    "enumerate_clusters",
    "enumerate_simple_fans",
]

_LOG = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class PatternGraph:
    k: int
    edges: Tuple[Edge, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise InvalidBoardError(f"A pattern needs at least one vertex, got k={self.k}.")
        normalized = set()
        for u, v in self.edges:
            if u == v or not (0 <= u < self.k and 0 <= v < self.k):
                raise InvalidBoardError(f"Bad pattern edge ({u}, {v}) for k={self.k}.")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def label(self) -> str:
        return self.name or f"G{self.k}[{';'.join(f'{u}-{v}' for u, v in self.edges)}]"

    @property
    def adjacency(self) -> Tuple[int, ...]:
        return tuple(adjacency_from_edges(self.k, self.edges))

    def degree(self, u: int) -> int:
        return self.adjacency[u].bit_count()

    def is_forest(self) -> bool:
        return nx.is_forest(self.to_networkx())

    def induced(self, vertices: Iterable[int], name: str = "") -> "PatternGraph":
        chosen = sorted(set(vertices))
        relabel = {v: i for i, v in enumerate(chosen)}
        edges = tuple((relabel[u], relabel[v]) for u, v in self.edges if u in relabel and v in relabel)
        return PatternGraph(len(chosen), edges, name)

    def without_isolated(self) -> "PatternGraph":
        touched = {v for edge in self.edges for v in edge}
        if len(touched) == self.k:
            return self
        return self.induced(touched, self.name)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.k))
        graph.add_edges_from(self.edges)
        return graph

    def to_text(self) -> str:
        return format_edge_list(self.k, self.edges)

    @classmethod
    def complete(cls, r: int) -> "PatternGraph":
        return cls(r, tuple(combinations(range(r), 2)), f"K{r}")

    @classmethod
    def complete_minus(cls, k: int) -> "PatternGraph":
        if k < 2:
            raise InvalidBoardError("K_k minus an edge needs k >= 2.")
        edges = tuple(e for e in combinations(range(k), 2) if e != (0, k - 1))
        return cls(k, edges, f"K{k}minus")

    @classmethod
    def path(cls, k: int) -> "PatternGraph":
        return cls(k, tuple((i, i + 1) for i in range(k - 1)), f"P{k}")

    @classmethod
    def cycle(cls, k: int) -> "PatternGraph":
        if k < 3:
            raise InvalidBoardError("A cycle needs at least 3 vertices.")
        return cls(k, tuple((i, (i + 1) % k) for i in range(k)), f"C{k}")

    @classmethod
    def from_text(cls, text: str, name: str = "") -> "PatternGraph":
        k, edges = parse_edge_list(text)
        return cls(k, tuple(edges), name)

    @classmethod
    def from_name(cls, name: str) -> "PatternGraph":
        spec = name.strip()
        m = re.fullmatch(r"Kr-minus\((\d+)\)", spec)
        if m:
            return cls.complete_minus(int(m.group(1)) + 1)
        m = re.fullmatch(r"K(\d+)minus", spec)
        if m:
            return cls.complete_minus(int(m.group(1)))
        m = re.fullmatch(r"K(\d+)", spec)
        if m:
            return cls.complete(int(m.group(1)))
        m = re.fullmatch(r"P(\d+)", spec)
        if m:
            return cls.path(int(m.group(1)))
        m = re.fullmatch(r"C(\d+)", spec)
        if m:
            return cls.cycle(int(m.group(1)))
        m = re.fullmatch(r"G(\d+)\[([0-9;\-]*)\]", spec)
        if m:
            pairs = [tok.split("-") for tok in m.group(2).split(";") if tok]
            return cls(int(m.group(1)), tuple((int(u), int(v)) for u, v in pairs))
        raise ConfigError(f"Unknown pattern name {name!r} (try K3..K7, K5minus, Kr-minus(4), P3, C4).")


def load_pattern(spec: str) -> PatternGraph:
    if os.path.isfile(spec):
        return PatternGraph.from_text(read_text(spec, "pattern file"), os.path.splitext(os.path.basename(spec))[0])
    return PatternGraph.from_name(spec)


@dataclass(frozen=True)
class HbarGraph:
    k: int
    edges: Tuple[Edge, ...]
    pair: Tuple[int, int]

    def completed(self) -> PatternGraph:
        return PatternGraph(self.k, self.edges + (self.pair,))


@lru_cache(maxsize=4096)
def canonical_form(k: int, edges: Tuple[Edge, ...], pair: Optional[Tuple[int, int]] = None) -> tuple:
    if k > CANONICAL_MAX_VERTICES:
        raise CapacityExceeded(f"Canonical labelling is limited to {CANONICAL_MAX_VERTICES} vertices, got {k}.")
    best = None
    for perm in permutations(range(k)):
        mapped = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in edges))
        key = (mapped, (perm[pair[0]], perm[pair[1]]) if pair is not None else ())
        if best is None or key < best:
            best = key
    return (k,) + best

@lru_cache(maxsize=256)
def automorphism_count(pattern: PatternGraph) -> int:
    edge_set = set(pattern.edges)
    count = 0
    for perm in permutations(range(pattern.k)):
        if all(tuple(sorted((perm[u], perm[v]))) in edge_set for u, v in pattern.edges):
            count += 1
    return count

@lru_cache(maxsize=256)
def _labelled_patterns(pattern: PatternGraph) -> Tuple[Tuple[Edge, ...], ...]:
    seen = set()
    for perm in permutations(range(pattern.k)):
        seen.add(tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in pattern.edges)))
    return tuple(sorted(seen))


@lru_cache(maxsize=256)
def _m2_search(pattern: PatternGraph) -> Tuple[Fraction, Tuple[int, ...]]:
    if pattern.k < 3:
        raise UndefinedDensityError(f"m2 needs a pattern with at least 3 vertices, got {pattern.label}.")
    adj = pattern.adjacency
    best: Optional[Fraction] = None
    best_set: Tuple[int, ...] = ()
    for size in range(pattern.k, 2, -1):
        for subset in combinations(range(pattern.k), size):
            mask = mask_of(subset)
            e = sum((adj[v] & mask).bit_count() for v in subset) // 2
            if e < 2:
                continue
            value = Fraction(e - 1, size - 2)
            if best is None or value > best:
                best, best_set = value, subset
    if best is None:
        raise UndefinedDensityError(f"m2 is undefined for {pattern.label}: no subgraph with 3 vertices and 2 edges.")
    return best, best_set

def m2_density(pattern: PatternGraph) -> Tuple[Fraction, PatternGraph]:
    value, subset = _m2_search(pattern)
    return value, pattern.induced(subset, pattern.name if len(subset) == pattern.k else "")

def is_m2_maximal(pattern: PatternGraph) -> bool:
    if pattern.k < 3 or pattern.e < 2:
        return False
    value, _ = _m2_search(pattern)
    return Fraction(pattern.e - 1, pattern.k - 2) == value

def m2_maximal_subgraph(pattern: PatternGraph) -> PatternGraph:
    if is_m2_maximal(pattern):
        return pattern
    return m2_density(pattern)[1]


def hbar_graphs(pattern: PatternGraph) -> List[HbarGraph]:
    classes: Dict[tuple, HbarGraph] = {}
    for u, v in pattern.edges:
        rest = tuple(e for e in pattern.edges if e != (u, v))
        for pair in ((u, v), (v, u)):
            key = canonical_form(pattern.k, rest, pair)
            classes.setdefault(key, HbarGraph(pattern.k, rest, pair))
    return [classes[key] for key in sorted(classes)]


@dataclass(frozen=True)
class FamilyIndex:
    universe_size: int
    members: np.ndarray
    offsets: np.ndarray
    incidence: np.ndarray
    incidence_offsets: np.ndarray

    def __len__(self) -> int:
        return len(self.offsets) - 1

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def incidences(self) -> int:
        return int(self.offsets[-1])

    def hyperedge(self, h: int) -> np.ndarray:
        return self.members[self.offsets[h]:self.offsets[h + 1]]

    def containing(self, e: int) -> np.ndarray:
        return self.incidence[self.incidence_offsets[e]:self.incidence_offsets[e + 1]]


class WinningFamily(ABC):
    universe_size: int

    def __init__(self, universe_size: int):
        self.universe_size = universe_size
        self._index: Optional[FamilyIndex] = None

    @abstractmethod
    def __iter__(self) -> Iterator[FrozenSet[int]]:
        ...

    @abstractmethod
    def describe(self) -> dict:
        ...

    def exact_incidences(self) -> Optional[int]:
        return None

    def is_empty(self) -> bool:
        return next(iter(self), None) is None

    def count(self) -> int:
        return sum(1 for _ in self)

    def index(self, capacity: int = FAMILY_INDEX_CAPACITY) -> FamilyIndex:
        if self._index is not None:
            if self._index.incidences > capacity:
                raise CapacityExceeded(
                    f"{self.describe()} has {self._index.incidences} incidences, above capacity {capacity}."
                )
            return self._index
        expected = self.exact_incidences()
        if expected is not None and expected > capacity:
            raise CapacityExceeded(f"{self.describe()} needs {expected} incidences, above capacity {capacity}.")
        members = array("q")
        offsets = array("q", [0])
        total = 0
        for h in self:
            total += len(h)
            if total > capacity:
                raise CapacityExceeded(f"{self.describe()} exceeds the index capacity of {capacity} incidences.")
            members.extend(sorted(h))
            offsets.append(total)
        members_np = np.asarray(members, dtype=np.int64)
        offsets_np = np.asarray(offsets, dtype=np.int64)
        owners = np.repeat(np.arange(len(offsets_np) - 1, dtype=np.int64), np.diff(offsets_np))
        order = np.argsort(members_np, kind="stable")
        counts = np.bincount(members_np, minlength=self.universe_size)
        incidence_offsets = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        self._index = FamilyIndex(
            self.universe_size, members_np, offsets_np, owners[order], incidence_offsets
        )
        _LOG.debug("indexed %s: %d hyperedges, %d incidences", self.describe(), len(self._index), total)
        return self._index

    def containing(self, e: int) -> List[FrozenSet[int]]:
        if self._index is not None:
            return [frozenset(int(x) for x in self._index.hyperedge(int(h))) for h in self._index.containing(e)]
        return [h for h in self if e in h]

    def count_fully_claimed(self, board: Board) -> int:
        maker = set(board.maker_elements())
        return sum(1 for h in self if h <= maker)

    def completed_by(self, board: Board, e: int) -> bool:
        maker = set(board.maker_elements())
        return any(h <= maker for h in self.containing(e))


class ExplicitFamily(WinningFamily):
    def __init__(self, universe_size: int, hyperedges: Iterable[Iterable[int]]):
        super().__init__(universe_size)
        seen = set()
        ordered: List[FrozenSet[int]] = []
        for raw in hyperedges:
            h = frozenset(int(x) for x in raw)
            if not h:
                raise ConfigError("Winning sets must be nonempty.")
            if min(h) < 0 or max(h) >= universe_size:
                raise ConfigError(f"Winning set {sorted(h)} is not inside a universe of size {universe_size}.")
            if h not in seen:
                seen.add(h)
                ordered.append(h)
        self._hyperedges = tuple(ordered)

    def __iter__(self) -> Iterator[FrozenSet[int]]:
        return iter(self._hyperedges)

    def count(self) -> int:
        return len(self._hyperedges)

    def exact_incidences(self) -> Optional[int]:
        return sum(len(h) for h in self._hyperedges)

    def describe(self) -> dict:
        return {"kind": "explicit", "universe_size": self.universe_size, "hyperedges": len(self._hyperedges)}

    def as_lists(self) -> List[List[int]]:
        return [sorted(h) for h in self._hyperedges]


class _GraphFamily(WinningFamily):
    def __init__(self, n: int, pattern: PatternGraph):
        if n < 2:
            raise InvalidBoardError(f"Graph families need n >= 2, got {n}.")
        super().__init__(n * (n - 1) // 2)
        self.n = n
        self.pattern = pattern
        self.core = pattern.without_isolated()
        self._pid = [[-1] * n for _ in range(n)]
        e = 0
        for u in range(n):
            for v in range(u + 1, n):
                self._pid[u][v] = self._pid[v][u] = e
                e += 1

    def _image(self, vertices: Sequence[int], slot_edges: Sequence[Edge]) -> FrozenSet[int]:
        pid = self._pid
        return frozenset(pid[vertices[a]][vertices[b]] for a, b in slot_edges)

    def _copies_on(self, vertices: Sequence[int]) -> Iterator[FrozenSet[int]]:
        for slots in _labelled_patterns(self.core):
            yield self._image(vertices, slots)

    def _check_board(self, board: Board) -> None:
        if board.n != self.n:
            raise InvalidBoardError(f"Family is over K_{self.n} but the board is {board!r}.")


class HCopiesFamily(_GraphFamily):
    def __iter__(self) -> Iterator[FrozenSet[int]]:
        k = self.core.k
        if self.core.e == 0 or k > self.n:
            return
        for subset in combinations(range(self.n), k):
            yield from self._copies_on(subset)

    def count(self) -> int:
        if self.core.e == 0 or self.core.k > self.n:
            return 0
        return comb(self.n, self.core.k) * len(_labelled_patterns(self.core))

    def exact_incidences(self) -> Optional[int]:
        return self.count() * self.core.e

    def describe(self) -> dict:
        return {"kind": "copies", "n": self.n, "pattern": self.pattern.label}

    def _embeddings(self, board: Board, fixed=None) -> Iterator[Tuple[int, ...]]:
        return iter_embeddings(self.core.k, self.core.adjacency, board.maker_adjacency(), fixed)

    def count_fully_claimed(self, board: Board) -> int:
        self._check_board(board)
        if self.core.e == 0 or self.core.k > self.n:
            return 0
        return sum(1 for _ in self._embeddings(board)) // automorphism_count(self.core)

    def completed_by(self, board: Board, e: int) -> bool:
        self._check_board(board)
        if self.core.e == 0 or self.core.k > self.n:
            return False
        x, y = decode_pair(e, self.n)
        for a, b in self.core.edges:
            for fixed in ({a: x, b: y}, {a: y, b: x}):
                if next(self._embeddings(board, fixed), None) is not None:
                    return True
        return False


class ClusterFamily(_GraphFamily):
    def __init__(self, n: int, pattern: PatternGraph, t: int):
        if t < 1:
            raise ConfigError(f"Cluster multiplicity must be >= 1, got {t}.")
        super().__init__(n, pattern)
        self.t = t

    def _per_triple(self) -> int:
        k = self.core.k
        return comb(self.n - 3, k - 3) * len(_labelled_patterns(self.core))

    def __iter__(self) -> Iterator[FrozenSet[int]]:
        k = self.core.k
        if k < 3 or k > self.n or self.core.e == 0 or self._per_triple() < self.t:
            return
        seen: Set[FrozenSet[int]] = set()
        for triple in combinations(range(self.n), 3):
            triple_mask = mask_of(triple)
            others = [v for v in range(self.n) if not triple_mask >> v & 1]
            copies = []
            for rest in combinations(others, k - 3):
                vertices = sorted(triple + rest)
                mask = mask_of(vertices)
                for copy in self._copies_on(vertices):
                    copies.append((mask, copy))
            for group in combinations(copies, self.t):
                common = group[0][0]
                for mask, _ in group[1:]:
                    common &= mask
                low = 0
                rest_bits = common
                for _ in range(3):
                    bit = rest_bits & -rest_bits
                    low |= bit
                    rest_bits ^= bit
                if low != triple_mask:
                    continue
                union = frozenset().union(*(copy for _, copy in group))
                if union not in seen:
                    seen.add(union)
                    yield union

    def describe(self) -> dict:
        return {"kind": "clusters", "n": self.n, "pattern": self.pattern.label, "t": self.t}


class SimpleFanFamily(_GraphFamily):
    def __init__(self, n: int, pattern: PatternGraph, t: int):
        if t < 1:
            raise ConfigError(f"Fan size must be >= 1, got {t}.")
        super().__init__(n, pattern)
        if self.core.e < 2:
            raise ConfigError(f"Fans of {pattern.label} would be empty: the pattern needs two edges.")
        self.t = t

    def _members_at(self, u: int, v: int) -> List[Tuple[int, FrozenSet[int]]]:
        k = self.core.k
        pair = self._pid[u][v]
        others = [w for w in range(self.n) if w != u and w != v]
        members = []
        for rest in combinations(others, k - 2):
            vertices = sorted((u, v) + rest)
            mask = mask_of(vertices)
            for copy in self._copies_on(vertices):
                if pair in copy:
                    members.append((mask, copy - {pair}))
        return members

    def __iter__(self) -> Iterator[FrozenSet[int]]:
        k = self.core.k
        if k > self.n:
            return
        seen: Set[FrozenSet[int]] = set()
        if self.t == 1:
            for subset in combinations(range(self.n), k):
                for copy in self._copies_on(subset):
                    for e in sorted(copy):
                        fan = copy - {e}
                        if fan not in seen:
                            seen.add(fan)
                            yield fan
            return
        for u in range(self.n):
            for v in range(u + 1, self.n):
                target = (1 << u) | (1 << v)
                members = self._members_at(u, v)
                for group in combinations(members, self.t):
                    common = group[0][0]
                    for mask, _ in group[1:]:
                        common &= mask
                    if common != target:
                        continue
                    fan = frozenset().union(*(f for _, f in group))
                    if fan not in seen:
                        seen.add(fan)
                        yield fan

    def exact_incidences(self) -> Optional[int]:
        if self.t != 1:
            return None
        k = self.core.k
        if k > self.n:
            return 0
        if min(self.core.degree(u) for u in range(k)) < 2:
            return None
        # every fan spans all k vertices, so fans on different vertex sets are distinct
        on_one = {
            frozenset(edge for edge in slots if edge != removed)
            for slots in _labelled_patterns(self.core)
            for removed in slots
        }
        return comb(self.n, k) * len(on_one) * (self.core.e - 1)

    def describe(self) -> dict:
        return {"kind": "simple_fans", "n": self.n, "pattern": self.pattern.label, "t": self.t}


@lru_cache(maxsize=64)
def enumerate_h_copies(n: int, pattern: PatternGraph) -> HCopiesFamily:
    return HCopiesFamily(n, pattern)

@lru_cache(maxsize=64)
def enumerate_clusters(n: int, pattern: PatternGraph, t: int) -> ClusterFamily:
    return ClusterFamily(n, pattern, t)

@lru_cache(maxsize=64)
def enumerate_simple_fans(n: int, pattern: PatternGraph, t: int) -> SimpleFanFamily:
    return SimpleFanFamily(n, pattern, t)
