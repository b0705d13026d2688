"""Sampled checks of the three expansion/clique properties of neat graphs.

Only the minimum-degree part of the first property is checked exhaustively.
The other parts are statements over all qualifying vertex subsets, so a run
either finds a counterexample or reports how many samples it survived; it
never claims the property holds.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, List, Optional, Sequence

import networkx as nx
import numpy as np

from .constants import DEFAULT_NEAT_TRIALS, NEAT_SEARCH_BUDGET
from .exceptions import ConfigError
from .graphsearch import find_clique, graph_to_adjacency, mask_of
from .rng import make_rng

__all__ = ["NeatParams", "NeatStatus", "PropertyReport", "NeatReport", "neat_check"]

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class NeatParams:
    alpha: float
    beta: float
    p: float
    r: int
    trials: int = DEFAULT_NEAT_TRIALS
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha < 1 or not 0 < self.beta < 1:
            raise ConfigError(f"alpha and beta must lie in (0, 1), got alpha={self.alpha}, beta={self.beta}.")
        if not 0 < self.p <= 1:
            raise ConfigError(f"p must lie in (0, 1], got {self.p}.")
        if self.r < 4:
            raise ConfigError(f"neat graphs are defined for r >= 4, got {self.r}.")
        if self.trials < 1:
            raise ConfigError(f"trials must be positive, got {self.trials}.")

class NeatStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NO_COUNTEREXAMPLE = "no_counterexample"
    VACUOUS = "vacuous"

@dataclass
class PropertyReport:
    name: str
    status: NeatStatus
    trials: int = 0
    detail: str = ""
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status.value,
            "trials": self.trials,
            "detail": self.detail,
            "witness": self.witness,
        }

@dataclass
class NeatReport:
    p1_degree: PropertyReport
    p1_expansion: PropertyReport
    p2: PropertyReport
    p3: PropertyReport
    warnings: List[str] = field(default_factory=list)

    @property
    def properties(self) -> List[PropertyReport]:
        return [self.p1_degree, self.p1_expansion, self.p2, self.p3]

    @property
    def failed(self) -> bool:
        return any(p.status is NeatStatus.FAIL for p in self.properties)

    def to_dict(self) -> dict:
        return {"properties": [p.to_dict() for p in self.properties], "warnings": list(self.warnings)}


def _labels(nodes: Sequence[Hashable], idx) -> list:
    return [nodes[i] for i in sorted(int(x) for x in idx)]

def _check_degrees(nodes, adj: Sequence[int], p: float) -> PropertyReport:
    n = len(nodes)
    need = n * p / 2
    for i, a in enumerate(adj):
        if a.bit_count() < need:
            return PropertyReport(
                "P1-degree",
                NeatStatus.FAIL,
                n,
                f"vertex {nodes[i]!r} has degree {a.bit_count()} < np/2 = {need:g}",
                {"vertex": nodes[i], "degree": a.bit_count()},
            )
    return PropertyReport("P1-degree", NeatStatus.PASS, n, f"every degree is at least np/2 = {need:g}")

def _check_expansion(nodes, adj, params: NeatParams, rng: np.random.Generator, warnings: List[str]) -> PropertyReport:
    n = len(nodes)
    x_size = math.ceil(math.log(max(n, 2)) / params.p)
    y_size = math.ceil(params.alpha * n)
    if x_size + y_size > n:
        warnings.append(f"P1 expansion is vacuous: |X| >= {x_size} and |Y| >= {y_size} do not fit in {n} vertices")
        return PropertyReport("P1-expansion", NeatStatus.VACUOUS, 0, "no disjoint X, Y of the required sizes")
    need = y_size * params.p / 2
    for trial in range(params.trials):
        order = rng.permutation(n)
        xs, ys = order[:x_size], order[x_size:x_size + y_size]
        y_mask = mask_of(int(y) for y in ys)
        if not any((adj[int(x)] & y_mask).bit_count() >= need for x in xs):
            return PropertyReport(
                "P1-expansion",
                NeatStatus.FAIL,
                trial + 1,
                f"no vertex of X has {need:g} neighbours in Y",
                {"X": _labels(nodes, xs), "Y": _labels(nodes, ys)},
            )
    return PropertyReport(
        "P1-expansion",
        NeatStatus.NO_COUNTEREXAMPLE,
        params.trials,
        f"no counterexample in {params.trials} trials (|X|={x_size}, |Y|={y_size})",
    )

def _check_neighbourhoods(nodes, adj, params: NeatParams, rng: np.random.Generator, warnings: List[str]) -> PropertyReport:
    n = len(nodes)
    size = max(1, math.ceil(params.alpha * n * params.p))
    if size > n - 1:
        warnings.append(f"P2 is vacuous: |X| >= {size} exceeds every possible degree")
        return PropertyReport("P2", NeatStatus.VACUOUS, 0, "no neighbourhood can be that large")
    eligible = [i for i, a in enumerate(adj) if a.bit_count() >= size]
    if not eligible:
        return PropertyReport("P2", NeatStatus.VACUOUS, 0, f"no vertex has degree >= {size}")
    for trial in range(params.trials):
        v = eligible[int(rng.integers(len(eligible)))]
        neighbours = [i for i in range(n) if adj[v] >> i & 1]
        xs = rng.choice(neighbours, size=size, replace=False)
        if find_clique(adj, mask_of(int(x) for x in xs), params.r - 1) is None:
            return PropertyReport(
                "P2",
                NeatStatus.FAIL,
                trial + 1,
                f"G[X] has no K_{params.r - 1} for X inside N({nodes[v]!r})",
                {"vertex": nodes[v], "X": _labels(nodes, xs)},
            )
    return PropertyReport("P2", NeatStatus.NO_COUNTEREXAMPLE, params.trials, f"no counterexample in {params.trials} trials (|X|={size})")

class _Budget(Exception):
    pass

def _transversal(adj: Sequence[int], parts: Sequence[Sequence[int]], budget: int) -> Optional[bool]:
    """Look for K_{k}^- with one vertex per part; None when the budget runs out."""
    explored = 0

    def extend(depth: int, chosen: int, missing: int) -> bool:
        nonlocal explored
        if depth == len(parts):
            return True
        for x in parts[depth]:
            explored += 1
            if explored > budget:
                raise _Budget
            misses = (chosen & ~adj[x]).bit_count()
            if missing + misses <= 1 and extend(depth + 1, chosen | 1 << x, missing + misses):
                return True
        return False

    try:
        return extend(0, 0, 0)
    except _Budget:
        return None

def _check_transversals(nodes, adj, params: NeatParams, rng: np.random.Generator, warnings: List[str]) -> PropertyReport:
    n = len(nodes)
    k = params.r + 1
    size = math.ceil(n ** (1.0 - params.beta))
    if k * size > n:
        warnings.append(f"P3 is vacuous: {k} disjoint parts of size {size} do not fit in {n} vertices")
        return PropertyReport("P3", NeatStatus.VACUOUS, 0, "parts do not fit")
    skipped = 0
    for trial in range(params.trials):
        order = rng.permutation(n)
        parts = [[int(x) for x in order[i * size:(i + 1) * size]] for i in range(k)]
        found = _transversal(adj, parts, NEAT_SEARCH_BUDGET)
        if found is None:
            skipped += 1
            continue
        if not found:
            return PropertyReport(
                "P3",
                NeatStatus.FAIL,
                trial + 1,
                f"no K_{k}^- with one vertex in each of {k} parts of size {size}",
                {"parts": [_labels(nodes, part) for part in parts]},
            )
    detail = f"no counterexample in {params.trials - skipped} trials (parts of size {size})"
    if skipped:
        detail += f"; {skipped} trials hit the search budget"
    return PropertyReport("P3", NeatStatus.NO_COUNTEREXAMPLE, params.trials - skipped, detail)


def neat_check(graph: nx.Graph, params: NeatParams) -> NeatReport:
    nodes, adj = graph_to_adjacency(graph)
    if not nodes:
        raise ConfigError("neat_check needs a nonempty graph.")
    rng = make_rng(params.seed)
    warnings: List[str] = []
    report = NeatReport(
        _check_degrees(nodes, adj, params.p),
        _check_expansion(nodes, adj, params, rng, warnings),
        _check_neighbourhoods(nodes, adj, params, rng, warnings),
        _check_transversals(nodes, adj, params, rng, warnings),
        warnings,
    )
    for message in warnings:
        _LOG.warning("%s", message)
    _LOG.info("neat check on %d vertices: %s", len(nodes), ", ".join(f"{p.name}={p.status.value}" for p in report.properties))
    return report
