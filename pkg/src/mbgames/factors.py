from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .exceptions import InvariantViolation, PreconditionError
from .graphsearch import count_cliques, find_clique, graph_to_adjacency, iter_bits, iter_cliques, mask_of
from .utils import canonical_json

__all__ = [
    "FactorCertificate",
    "FactorResult",
    "GreedyCover",
    "verify_factor",
    "has_kr_factor",
    "factor_in_adjacency",
    "kr_at_vertex",
    "greedy_kr_cover",
]

_LOG = logging.getLogger(__name__)

_DEGREE_CAP = 64


@dataclass(frozen=True)
class FactorCertificate:
    r: int
    blocks: Tuple[Tuple, ...]

    def vertices(self) -> Set:
        return {v for block in self.blocks for v in block}

    def to_dict(self) -> dict:
        return {"r": self.r, "blocks": [sorted(block) for block in self.blocks]}

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "FactorCertificate":
        data = json.loads(text)
        blocks = tuple(tuple(block) for block in data["blocks"])
        r = data.get("r", len(blocks[0]) if blocks else 0)
        return cls(r, blocks)

@dataclass(frozen=True)
class FactorResult:
    found: bool
    certificate: Optional[FactorCertificate] = None
    reason: str = ""
    nodes: int = 0

    def __bool__(self) -> bool:
        return self.found

@dataclass
class GreedyCover:
    blocks: List[Tuple] = field(default_factory=list)
    uncovered: List = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.uncovered


def verify_factor(graph: nx.Graph, blocks: Iterable[Sequence], r: int, vertices: Optional[Iterable] = None) -> bool:
    expected = set(graph.nodes()) if vertices is None else set(vertices)
    seen: Set = set()
    for block in blocks:
        block = tuple(block)
        if len(block) != r or len(set(block)) != r:
            return False
        for i, u in enumerate(block):
            if u in seen or u not in expected:
                return False
            seen.add(u)
            for w in block[i + 1:]:
                if not graph.has_edge(u, w):
                    return False
    return seen == expected


def _pick_vertex(adj: Sequence[int], uncovered: int, r: int) -> Tuple[Optional[int], int]:
    order = sorted(iter_bits(uncovered), key=lambda v: ((adj[v] & uncovered).bit_count(), v))
    best_v, best_count = None, _DEGREE_CAP + 1
    for v in order:
        neighbourhood = adj[v] & uncovered
        if neighbourhood.bit_count() < r - 1:
            return v, 0
        count = count_cliques(adj, neighbourhood, r - 1, cap=min(best_count, _DEGREE_CAP))
        if count == 0:
            return v, 0
        if count < best_count:
            best_v, best_count = v, count
            if count == 1:
                break
    return best_v, best_count

def factor_in_adjacency(adj: Sequence[int], r: int, vertices: Optional[int] = None) -> Tuple[Optional[List[Tuple[int, ...]]], int]:
    uncovered_all = (1 << len(adj)) - 1 if vertices is None else vertices
    failed: Set[int] = set()
    nodes = 0

    def search(uncovered: int) -> Optional[List[Tuple[int, ...]]]:
        nonlocal nodes
        nodes += 1
        if uncovered == 0:
            return []
        if uncovered in failed:
            return None
        v, count = _pick_vertex(adj, uncovered, r)
        if count == 0:
            failed.add(uncovered)
            return None
        for clique in iter_cliques(adj, adj[v] & uncovered, r - 1):
            block = (v,) + clique
            rest = search(uncovered & ~mask_of(block))
            if rest is not None:
                return [block] + rest
        failed.add(uncovered)
        return None

    if uncovered_all.bit_count() % r:
        return None, 0
    return search(uncovered_all), nodes

def has_kr_factor(graph: nx.Graph, r: int) -> FactorResult:
    if r < 1:
        raise PreconditionError(f"r must be positive, got {r}.")
    nodes, adj = graph_to_adjacency(graph)
    n = len(nodes)
    if n % r:
        return FactorResult(False, None, f"impossible: divisibility ({n} vertices, r={r})")
    blocks, explored = factor_in_adjacency(adj, r)
    if blocks is None:
        _LOG.debug("no K_%d-factor on %d vertices (%d search nodes)", r, n, explored)
        return FactorResult(False, None, "no factor", explored)
    labelled = tuple(tuple(sorted(nodes[i] for i in block)) for block in blocks)
    labelled = tuple(sorted(labelled))
    if not verify_factor(graph, labelled, r):
        raise InvariantViolation(f"K_{r}-factor certificate failed verification.")
    return FactorResult(True, FactorCertificate(r, labelled), "", explored)

def kr_at_vertex(graph: nx.Graph, v, r: int) -> Tuple[bool, Optional[Tuple]]:
    if v not in graph:
        return False, None
    if r <= 1:
        return True, (v,)
    nodes, adj = graph_to_adjacency(graph)
    index = nodes.index(v)
    clique = find_clique(adj, adj[index], r - 1)
    if clique is None:
        return False, None
    witness = (v,) + tuple(nodes[i] for i in clique)
    for i, a in enumerate(witness):
        for b in witness[i + 1:]:
            if not graph.has_edge(a, b):
                raise InvariantViolation(f"K_{r} witness at {v!r} is not a clique.")
    return True, witness

def greedy_kr_cover(graph: nx.Graph, r: int, targets: Sequence, pool: Iterable) -> GreedyCover:
    nodes, adj = graph_to_adjacency(graph)
    index = {node: i for i, node in enumerate(nodes)}
    target_set = set(targets)
    available = mask_of(index[v] for v in pool if v in index and v not in target_set)
    cover = GreedyCover()
    for v in targets:
        if v not in index:
            cover.uncovered.append(v)
            continue
        clique = find_clique(adj, adj[index[v]] & available, r - 1)
        if clique is None:
            cover.uncovered.append(v)
            continue
        available &= ~mask_of(clique)
        cover.blocks.append((v,) + tuple(nodes[i] for i in clique))
    return cover
