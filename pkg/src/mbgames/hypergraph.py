from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .constants import HAXELL_EXHAUSTIVE_MAX_T, HAXELL_SAMPLED_SUBSETS, TAU_MAX_EDGES, TAU_MAX_VERTICES
from .exceptions import CapacityExceeded, InvariantViolation, PreconditionError
from .graphsearch import graph_to_adjacency, iter_bits, iter_cliques, mask_of

__all__ = [
    "tau",
    "HaxellResult",
    "haxell_select",
    "neighbourhood_hypergraphs",
    "haxell_cover",
]

_LOG = logging.getLogger(__name__)

Hyperedge = FrozenSet[Hashable]


def _as_masks(edges: Iterable[Iterable[Hashable]]) -> Tuple[List[Hashable], List[int]]:
    sets = [frozenset(e) for e in edges]
    vertices = sorted({x for e in sets for x in e}, key=repr)
    index = {x: i for i, x in enumerate(vertices)}
    masks = sorted({mask_of(index[x] for x in e) for e in sets})
    return vertices, masks

def _packing_bound(edges: Sequence[int]) -> int:
    used = 0
    count = 0
    for e in sorted(edges, key=int.bit_count):
        if not e & used:
            used |= e
            count += 1
    return count

def tau(edges: Iterable[Iterable[Hashable]]) -> Tuple[int, Tuple[Hashable, ...]]:
    """Minimum vertex cover of a hypergraph, returned with a witness cover."""
    vertices, masks = _as_masks(edges)
    if not masks:
        return 0, ()
    if 0 in masks:
        raise PreconditionError("an empty hyperedge cannot be covered")
    if len(vertices) > TAU_MAX_VERTICES and len(masks) > TAU_MAX_EDGES:
        raise CapacityExceeded(
            f"tau is limited to {TAU_MAX_VERTICES} vertices or {TAU_MAX_EDGES} edges, "
            f"got {len(vertices)} vertices and {len(masks)} edges"
        )
    best_size = len(vertices) + 1
    best_cover = 0

    def greedy(rest: List[int]) -> int:
        cover = 0
        while rest:
            counts: Dict[int, int] = {}
            for e in rest:
                for x in iter_bits(e):
                    counts[x] = counts.get(x, 0) + 1
            x = max(counts, key=lambda k: (counts[k], -k))
            cover |= 1 << x
            rest = [e for e in rest if not e >> x & 1]
        return cover

    start = greedy(list(masks))
    best_size, best_cover = start.bit_count(), start

    def solve(rest: List[int], chosen: int) -> None:
        nonlocal best_size, best_cover
        if not rest:
            size = chosen.bit_count()
            if size < best_size:
                best_size, best_cover = size, chosen
            return
        if chosen.bit_count() + _packing_bound(rest) >= best_size:
            return
        # branch k takes the k-th vertex of the smallest edge and bans the earlier ones
        pivot = min(rest, key=lambda e: (e.bit_count(), e))
        banned = 0
        for x in iter_bits(pivot):
            pick = 1 << x
            reduced = [e & ~banned for e in rest if not e & pick]
            if all(reduced):
                solve(reduced, chosen | pick)
            banned |= pick

    solve(list(masks), 0)
    return best_size, tuple(vertices[i] for i in iter_bits(best_cover))


@dataclass
class HaxellResult:
    criterion_holds: bool
    sampled: bool
    subsets_checked: int
    witness: Optional[Tuple[Tuple[int, ...], int]] = None
    system: Optional[List[Hyperedge]] = None
    blocks: List[Tuple] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "criterion_holds": self.criterion_holds,
            "sampled": self.sampled,
            "subsets_checked": self.subsets_checked,
            "witness": None if self.witness is None else {"I": list(self.witness[0]), "tau": self.witness[1]},
            "system": None if self.system is None else [sorted(h, key=repr) for h in self.system],
            "blocks": [list(b) for b in self.blocks],
        }

def _subsets(t: int, rng: np.random.Generator) -> Tuple[Iterable[Tuple[int, ...]], bool]:
    if t <= HAXELL_EXHAUSTIVE_MAX_T:
        return (c for size in range(1, t + 1) for c in combinations(range(t), size)), False
    chosen = {(i,) for i in range(t)}
    while len(chosen) < HAXELL_SAMPLED_SUBSETS + t:
        mask = rng.random(t) < 0.5
        if mask.any():
            chosen.add(tuple(np.flatnonzero(mask).tolist()))
    return sorted(chosen, key=lambda c: (len(c), c)), True

def _disjoint_system(hypergraphs: Sequence[Sequence[Hyperedge]]) -> Optional[List[Hyperedge]]:
    order = sorted(range(len(hypergraphs)), key=lambda i: (len(hypergraphs[i]), i))
    chosen: Dict[int, Hyperedge] = {}

    def search(depth: int, used: FrozenSet) -> bool:
        if depth == len(order):
            return True
        i = order[depth]
        for h in hypergraphs[i]:
            if used.isdisjoint(h):
                chosen[i] = h
                if search(depth + 1, used | h):
                    return True
        chosen.pop(i, None)
        return False

    if not search(0, frozenset()):
        return None
    return [chosen[i] for i in range(len(hypergraphs))]

def haxell_select(
    hypergraphs: Sequence[Iterable[Iterable[Hashable]]],
    r: int,
    *,
    seed: int = 0,
    factor: Optional[int] = None,
) -> HaxellResult:
    """Check the union-cover criterion and pick pairwise-disjoint representatives.

    ``factor`` is the multiplier in ``tau(union over I) >= factor * |I|`` and
    defaults to ``2 r``.
    """
    graphs = [[frozenset(h) for h in hs] for hs in hypergraphs]
    for i, hs in enumerate(graphs):
        for h in hs:
            if len(h) != r:
                raise PreconditionError(f"hypergraph {i} is not {r}-uniform: {sorted(h, key=repr)}")
    factor = 2 * r if factor is None else factor
    rng = np.random.default_rng(seed)
    subsets, sampled = _subsets(len(graphs), rng)
    checked = 0
    witness = None
    for subset in subsets:
        checked += 1
        union = {h for i in subset for h in graphs[i]}
        size, _ = tau(union)
        if size < factor * len(subset):
            witness = (tuple(subset), size)
            break
    if witness is not None:
        _LOG.debug("criterion fails on I=%s with tau=%d", witness[0], witness[1])
        return HaxellResult(False, sampled, checked, witness, _disjoint_system(graphs))
    system = _disjoint_system(graphs)
    if system is None:
        raise InvariantViolation("the cover criterion holds but no disjoint system exists")
    return HaxellResult(True, sampled, checked, None, system)


def neighbourhood_hypergraphs(graph: nx.Graph, r: int, targets: Sequence[Hashable], pool: Iterable[Hashable]) -> Dict[Hashable, List[Hyperedge]]:
    nodes, adj = graph_to_adjacency(graph)
    index = {x: i for i, x in enumerate(nodes)}
    target_set = set(targets)
    pool_mask = mask_of(index[x] for x in pool if x in index and x not in target_set)
    out: Dict[Hashable, List[Hyperedge]] = {}
    for v in targets:
        if v not in index:
            out[v] = []
            continue
        cand = adj[index[v]] & pool_mask
        out[v] = [frozenset(nodes[i] for i in clique) for clique in iter_cliques(adj, cand, r - 1)]
    return out

def haxell_cover(graph: nx.Graph, r: int, targets: Sequence[Hashable], pool: Iterable[Hashable], *, seed: int = 0) -> HaxellResult:
    """Cover every target by its own K_r whose other vertices come from the pool."""
    if r < 2:
        raise PreconditionError(f"need r >= 2, got {r}.")
    hypergraphs = neighbourhood_hypergraphs(graph, r, targets, pool)
    result = haxell_select([hypergraphs[v] for v in targets], r - 1, seed=seed)
    if result.system is not None:
        result.blocks = [(v,) + tuple(sorted(h, key=repr)) for v, h in zip(targets, result.system)]
        for block in result.blocks:
            for i, u in enumerate(block):
                for w in block[i + 1:]:
                    if not graph.has_edge(u, w):
                        raise InvariantViolation(f"cover block {block} is not a clique")
    return result
