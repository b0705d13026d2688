"""Bitset graph search shared by the winning-set, strategy and structure code.

Graphs are adjacency lists of Python ints: bit ``j`` of ``adj[i]`` is set when
``i`` and ``j`` are adjacent. Vertex sets are bitmasks in the same encoding.
"""
from __future__ import annotations

from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low

def bits_to_list(mask: int) -> List[int]:
    return list(iter_bits(mask))

def mask_of(vertices) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask

def adjacency_from_edges(n: int, edges) -> List[int]:
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj

def graph_to_adjacency(graph: nx.Graph) -> Tuple[List, List[int]]:
    nodes = sorted(graph.nodes())
    index = {node: i for i, node in enumerate(nodes)}
    adj = [0] * len(nodes)
    for u, v in graph.edges():
        if u == v:
            continue
        iu, iv = index[u], index[v]
        adj[iu] |= 1 << iv
        adj[iv] |= 1 << iu
    return nodes, adj


def iter_cliques(adj: Sequence[int], candidates: int, k: int) -> Iterator[Tuple[int, ...]]:
    if k == 0:
        yield ()
        return
    stack: List[Tuple[int, Tuple[int, ...]]] = [(candidates, ())]
    while stack:
        cand, partial = stack.pop()
        need = k - len(partial)
        if need == 0:
            yield partial
            continue
        if cand.bit_count() < need:
            continue
        pending = []
        rest = cand
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            pending.append((adj[v] & rest, partial + (v,)))
        stack.extend(reversed(pending))

def find_clique(adj: Sequence[int], candidates: int, k: int) -> Optional[Tuple[int, ...]]:
    for clique in iter_cliques(adj, candidates, k):
        return clique
    return None

def count_cliques(adj: Sequence[int], candidates: int, k: int, cap: Optional[int] = None) -> int:
    if k == 0:
        return 1
    if k == 1:
        count = candidates.bit_count()
        return count if cap is None else min(count, cap)
    if k == 2:
        total = 0
        for v in iter_bits(candidates):
            candidates &= ~(1 << v)
            total += (adj[v] & candidates).bit_count()
            if cap is not None and total >= cap:
                return cap
        return total
    total = 0
    rest = candidates
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        rest ^= low
        inner = adj[v] & rest
        if inner.bit_count() >= k - 1:
            remaining = None if cap is None else cap - total
            total += count_cliques(adj, inner, k - 1, remaining)
            if cap is not None and total >= cap:
                return cap
    return total


def pattern_order(k: int, pattern_adj: Sequence[int], fixed: Sequence[int] = ()) -> List[int]:
    order = list(fixed)
    placed = mask_of(order)
    while len(order) < k:
        best = None
        best_key = None
        for u in range(k):
            if placed >> u & 1:
                continue
            key = ((pattern_adj[u] & placed).bit_count(), pattern_adj[u].bit_count(), -u)
            if best_key is None or key > best_key:
                best, best_key = u, key
        order.append(best)
        placed |= 1 << best
    return order

def iter_embeddings(
    k: int,
    pattern_adj: Sequence[int],
    host_adj: Sequence[int],
    fixed: Optional[Dict[int, int]] = None,
    host_mask: Optional[int] = None,
) -> Iterator[Tuple[int, ...]]:
    """Injective maps of the pattern into the host that send edges to edges.

    ``fixed`` pins pattern vertices to host vertices; the yielded tuple lists
    the host image of pattern vertex ``0..k-1``.
    """
    fixed = dict(fixed or {})
    n = len(host_adj)
    everything = (1 << n) - 1 if host_mask is None else host_mask
    for a, x in fixed.items():
        for b, y in fixed.items():
            if pattern_adj[a] >> b & 1 and not host_adj[x] >> y & 1:
                return
    if len(set(fixed.values())) != len(fixed):
        return
    order = pattern_order(k, pattern_adj, list(fixed))
    image = [-1] * k
    used = 0
    for a, x in fixed.items():
        image[a] = x
        used |= 1 << x
    start = len(fixed)

    def extend(depth: int, used: int) -> Iterator[Tuple[int, ...]]:
        if depth == k:
            yield tuple(image)
            return
        u = order[depth]
        cand = everything & ~used
        need = pattern_adj[u].bit_count()
        for w in order[:depth]:
            if pattern_adj[u] >> w & 1:
                cand &= host_adj[image[w]]
        for x in iter_bits(cand):
            if host_adj[x].bit_count() < need:
                continue
            image[u] = x
            yield from extend(depth + 1, used | 1 << x)
        image[u] = -1

    yield from extend(start, used)
