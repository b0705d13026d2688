from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .board import Board, ClaimState, encode_pair
from .graphsearch import adjacency_from_edges, graph_to_adjacency, iter_embeddings
from .winsets import PatternGraph, hbar_graphs

__all__ = [
    "DangerousStructure",
    "DangerousGroup",
    "DangerousReport",
    "dangerous_structures",
    "DangerousTracker",
]

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class DangerousStructure:
    edges: FrozenSet[Tuple]
    pair: Tuple
    vertices: FrozenSet

    def to_dict(self) -> dict:
        return {
            "edges": sorted(list(e) for e in self.edges),
            "pair": list(self.pair),
            "vertices": sorted(self.vertices),
        }

@dataclass(frozen=True)
class DangerousGroup:
    shared: Tuple
    members: Tuple[int, ...]
    simple: bool
    truncated: bool = False

    @property
    def t(self) -> int:
        return len(self.members)

@dataclass
class DangerousReport:
    structures: List[DangerousStructure] = field(default_factory=list)
    fans: List[DangerousGroup] = field(default_factory=list)
    flowers: List[DangerousGroup] = field(default_factory=list)

    @property
    def pairs(self) -> Set[Tuple]:
        return {s.pair for s in self.structures}

    def is_empty(self) -> bool:
        return not self.structures

    def to_dict(self) -> dict:
        def group(g: DangerousGroup) -> dict:
            return {"shared": list(g.shared), "members": list(g.members), "simple": g.simple, "truncated": g.truncated}

        return {
            "structures": [s.to_dict() for s in self.structures],
            "fans": [group(g) for g in self.fans],
            "flowers": [group(g) for g in self.flowers],
        }


def _hbar_adjacencies(pattern: PatternGraph):
    core = pattern.without_isolated()
    out = []
    for hbar in hbar_graphs(core):
        out.append((hbar, adjacency_from_edges(hbar.k, hbar.edges)))
    return out

def _group(structures: Sequence[DangerousStructure], shared_size: int, t_max: Optional[int]) -> List[DangerousGroup]:
    by_subset: Dict[Tuple, List[int]] = {}
    for i, s in enumerate(structures):
        for subset in combinations(sorted(s.vertices), shared_size):
            by_subset.setdefault(subset, []).append(i)
    seen: Dict[FrozenSet[int], Tuple] = {}
    for subset in sorted(by_subset):
        members = frozenset(by_subset[subset])
        seen.setdefault(members, subset)
    maximal = [m for m in seen if not any(m < other for other in seen)]
    groups = []
    for members in sorted(maximal, key=lambda m: seen[m]):
        ordered = tuple(sorted(members))
        common = frozenset.intersection(*(structures[i].vertices for i in ordered))
        truncated = t_max is not None and len(ordered) > t_max
        if truncated:
            ordered = ordered[:t_max]
        groups.append(DangerousGroup(seen[members], ordered, len(common) == shared_size, truncated))
    return groups

def dangerous_structures(
    maker_graph: nx.Graph,
    breaker_claims: Iterable[Tuple],
    pattern: PatternGraph,
    t_max: Optional[int] = None,
) -> DangerousReport:
    """Every H-bar subgraph of Maker's graph whose missing pair Breaker does not own."""
    nodes, adj = graph_to_adjacency(maker_graph)
    blocked = {frozenset(pair) for pair in breaker_claims}
    found: Dict[Tuple[FrozenSet, FrozenSet], DangerousStructure] = {}
    for hbar, hbar_adj in _hbar_adjacencies(pattern):
        a, b = hbar.pair
        for image in iter_embeddings(hbar.k, hbar_adj, adj):
            labels = [nodes[i] for i in image]
            pair = tuple(sorted((labels[a], labels[b])))
            if frozenset(pair) in blocked:
                continue
            edges = frozenset(tuple(sorted((labels[u], labels[w]))) for u, w in hbar.edges)
            key = (edges, frozenset(pair))
            if key not in found:
                found[key] = DangerousStructure(edges, pair, frozenset(labels))
    structures = sorted(found.values(), key=lambda s: (s.pair, sorted(s.edges)))
    report = DangerousReport(structures)
    if structures:
        report.fans = _group(structures, 2, t_max)
        report.flowers = _group(structures, 3, t_max)
    _LOG.debug("found %d dangerous structures for %s", len(structures), pattern.label)
    return report


class DangerousTracker:
    """Incremental count of dangerous pairs as Maker's graph grows one edge at a time."""

    def __init__(self, n: int, pattern: PatternGraph, embedding_cap: int = 100_000):
        self.n = n
        self.pattern = pattern
        self.embedding_cap = embedding_cap
        self._classes = _hbar_adjacencies(pattern)
        self.pair_counts: Counter = Counter()
        self.truncated = False

    def add_maker_edge(self, maker_adj: Sequence[int], x: int, y: int) -> int:
        found = 0
        for hbar, hbar_adj in self._classes:
            a, b = hbar.pair
            for u, w in hbar.edges:
                for fixed in ({u: x, w: y}, {u: y, w: x}):
                    for image in iter_embeddings(hbar.k, hbar_adj, maker_adj, fixed):
                        self.pair_counts[encode_pair(image[a], image[b], self.n)] += 1
                        found += 1
                        if found >= self.embedding_cap:
                            self.truncated = True
                            return found
        return found

    def priorities(self, board: Board) -> List[int]:
        for e in [e for e in self.pair_counts if board.state(e) != ClaimState.UNCLAIMED]:
            del self.pair_counts[e]
        live = [(-count, e) for e, count in self.pair_counts.items() if board.is_open(e)]
        live.sort()
        return [e for _, e in live]
