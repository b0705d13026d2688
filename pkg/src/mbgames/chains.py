from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import networkx as nx

from .constants import CHAIN_SEARCH_BUDGET
from .exceptions import InvariantViolation, PreconditionError
from .factors import FactorCertificate, verify_factor
from .graphsearch import graph_to_adjacency, iter_bits, iter_cliques

__all__ = ["Chain", "ChainSearch", "build_chain", "find_chain_in", "canonical_factor"]

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class Chain:
    """Copies of K_{r+1} minus an edge glued in a row at their link vertices.

    Block ``i`` lists its link ``links[i]`` first and ``links[i+1]`` last; those
    two are the only non-adjacent pair inside the block.
    """

    r: int
    length: int
    blocks: Tuple[Tuple[Hashable, ...], ...]
    links: Tuple[Hashable, ...]

    @property
    def removable(self) -> Tuple[Hashable, ...]:
        return self.links

    @property
    def vertices(self) -> List[Hashable]:
        if not self.blocks:
            return list(self.links)
        out = [self.blocks[0][0]]
        for block in self.blocks:
            out.extend(block[1:])
        return out

    def edges(self) -> List[Tuple[Hashable, Hashable]]:
        out = []
        for block in self.blocks:
            for i, u in enumerate(block):
                for j in range(i + 1, len(block)):
                    if i == 0 and j == len(block) - 1:
                        continue
                    out.append((u, block[j]))
        return out

    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges())
        return graph

    def factor_after_removal(self, u: Hashable) -> FactorCertificate:
        if u not in self.links:
            raise PreconditionError(f"{u!r} is not a removable vertex of this chain.")
        j = self.links.index(u)
        blocks = []
        for i, block in enumerate(self.blocks):
            blocks.append(tuple(block[:-1]) if i < j else tuple(block[1:]))
        return FactorCertificate(self.r, tuple(blocks))

    def relabel(self, mapping: Dict[Hashable, Hashable]) -> "Chain":
        return Chain(
            self.r,
            self.length,
            tuple(tuple(mapping[x] for x in block) for block in self.blocks),
            tuple(mapping[x] for x in self.links),
        )

    def shifted(self, offset: int) -> "Chain":
        return self.relabel({x: x + offset for x in self.vertices})

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "length": self.length,
            "blocks": [list(block) for block in self.blocks],
            "removable": list(self.links),
        }


def _verify_chain(graph: nx.Graph, chain: Chain) -> None:
    vertices = chain.vertices
    if len(set(vertices)) != len(vertices):
        raise InvariantViolation("chain blocks overlap outside their link vertices")
    expected = 1 if chain.length == 0 else chain.r * chain.length + 1
    if len(vertices) != expected:
        raise InvariantViolation(f"({chain.r},{chain.length})-chain has {len(vertices)} vertices, expected {expected}")
    for u, w in chain.edges():
        if not graph.has_edge(u, w):
            raise InvariantViolation(f"chain edge {u!r}-{w!r} is missing from the host graph")
    sub = graph.subgraph(vertices)
    for u in chain.links:
        rest = [x for x in vertices if x != u]
        if not verify_factor(sub, chain.factor_after_removal(u).blocks, chain.r, rest):
            raise InvariantViolation(f"removing {u!r} from the chain leaves no K_{chain.r}-factor")

def build_chain(r: int, length: int) -> Chain:
    if r < 3:
        raise PreconditionError(f"chains need r >= 3, got {r}.")
    if length < 0:
        raise PreconditionError(f"chain length must be >= 0, got {length}.")
    links = tuple(i * r for i in range(length + 1))
    blocks = tuple(tuple(range(i * r, (i + 1) * r + 1)) for i in range(length))
    chain = Chain(r, length, blocks, links)
    _verify_chain(chain.graph(), chain)
    return chain


@dataclass(frozen=True)
class ChainSearch:
    chain: Optional[Chain]
    nodes: int
    budget_exhausted: bool = False

    @property
    def found(self) -> bool:
        return self.chain is not None

    @property
    def reason(self) -> str:
        if self.chain is not None:
            return "found"
        return "not found (budget)" if self.budget_exhausted else "not found"

class _BudgetExhausted(Exception):
    pass

def find_chain_in(graph: nx.Graph, r: int, length: int, budget: int = CHAIN_SEARCH_BUDGET) -> ChainSearch:
    if r < 3 or length < 0:
        raise PreconditionError(f"need r >= 3 and length >= 0, got r={r}, length={length}.")
    nodes, adj = graph_to_adjacency(graph)
    n = len(nodes)
    if n == 0 or (length > 0 and n < r * length + 1):
        return ChainSearch(None, 0)
    if length == 0:
        return ChainSearch(Chain(r, 0, (), (nodes[0],)), 1)
    everything = (1 << n) - 1
    explored = 0
    blocks: List[Tuple[int, ...]] = []

    def extend(link: int, used: int) -> bool:
        nonlocal explored
        if len(blocks) == length:
            return True
        for nxt in iter_bits(everything & ~used):
            common = adj[link] & adj[nxt] & ~used
            if common.bit_count() < r - 1:
                continue
            for clique in iter_cliques(adj, common, r - 1):
                explored += 1
                if explored > budget:
                    raise _BudgetExhausted
                blocks.append((link,) + clique + (nxt,))
                if extend(nxt, used | (1 << nxt) | sum(1 << x for x in clique)):
                    return True
                blocks.pop()
        return False

    try:
        for start in range(n):
            if adj[start].bit_count() >= r - 1 and extend(start, 1 << start):
                break
            blocks.clear()
    except _BudgetExhausted:
        _LOG.debug("chain search for (%d,%d) stopped after %d nodes", r, length, explored)
        return ChainSearch(None, explored, True)
    if not blocks:
        return ChainSearch(None, explored)
    labelled = tuple(tuple(nodes[x] for x in block) for block in blocks)
    links = (labelled[0][0],) + tuple(block[-1] for block in labelled)
    chain = Chain(r, length, labelled, links)
    _verify_chain(graph, chain)
    return ChainSearch(chain, explored)


def canonical_factor(graph: nx.Graph, chains: Sequence[Chain], clique: Sequence[Hashable]) -> FactorCertificate:
    if not chains:
        raise PreconditionError("canonical_factor needs at least one chain.")
    r = chains[0].r
    clique = tuple(clique)
    if len(chains) != r or len(clique) != r or any(c.r != r for c in chains):
        raise PreconditionError(f"need exactly r={r} chains of the same r and a clique on r vertices.")
    seen = set()
    for chain in chains:
        vs = set(chain.vertices)
        if vs & seen:
            raise PreconditionError("chains must be vertex-disjoint.")
        seen |= vs
    for i, u in enumerate(clique):
        for w in clique[i + 1:]:
            if not graph.has_edge(u, w):
                raise PreconditionError(f"{list(clique)} is not a clique: {u!r}-{w!r} is missing.")
    blocks = [tuple(sorted(clique))]
    for i, chain in enumerate(chains):
        hits = [u for u in clique if u in chain.removable]
        if len(hits) != 1:
            raise PreconditionError(f"the clique must meet the removable set of chain {i} in exactly one vertex.")
        blocks.extend(tuple(sorted(block)) for block in chain.factor_after_removal(hits[0]).blocks)
    certificate = FactorCertificate(r, tuple(sorted(blocks)))
    if not verify_factor(graph.subgraph(seen), certificate.blocks, r, seen):
        raise InvariantViolation("canonical factor failed verification")
    return certificate
