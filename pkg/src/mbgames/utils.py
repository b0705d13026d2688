from __future__ import annotations

import json
import logging
import os
import tempfile
from typing import Any, Iterable, List, Tuple

import networkx as nx

from .constants import ENV_WORKERS
from .exceptions import ConfigError, InvalidBoardError
from .safe_paths import validate_input_path, validate_output_path

_LOG = logging.getLogger(__name__)


def setup_logging(level=logging.INFO):
    logger = logging.getLogger("mbgames")
    logger.setLevel(level)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(
            logging.Formatter("%(asctime)s - %(levelname)s - [%(module)s] - %(message)s")
        )
        logger.addHandler(handler)
        logger.propagate = False

def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))

def atomic_write_text(path: str, text: str, role: str = "output file") -> str:
    target = validate_output_path(path, role)
    directory = os.path.dirname(target) or "."
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".mbgames-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_path, target)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise
    _LOG.debug("wrote %d chars to %s", len(text), target)
    return target

def read_text(path: str, role: str = "input file") -> str:
    canonical = validate_input_path(path, role)
    with open(canonical, "r", encoding="utf-8") as fh:
        return fh.read()

def parse_edge_list(text: str) -> Tuple[int, List[Tuple[int, int]]]:
    rows = [line.split() for line in text.splitlines()]
    rows = [row for row in rows if row and not row[0].startswith("#")]
    if not rows:
        raise InvalidBoardError("Edge list is empty: expected a 'k m' header line.")
    try:
        k, m = (int(tok) for tok in rows[0])
    except ValueError as e:
        raise InvalidBoardError(f"Bad edge-list header {' '.join(rows[0])!r}: {e}") from e
    if k < 0 or m < 0:
        raise InvalidBoardError("Edge-list header values must be non-negative.")
    body = rows[1:]
    if len(body) != m:
        raise InvalidBoardError(f"Edge list declares {m} edges but has {len(body)}.")
    edges: List[Tuple[int, int]] = []
    for lineno, row in enumerate(body, start=2):
        if len(row) != 2:
            raise InvalidBoardError(f"Edge-list line {lineno}: expected 'u v'.")
        try:
            u, v = int(row[0]), int(row[1])
        except ValueError as e:
            raise InvalidBoardError(f"Edge-list line {lineno}: {e}") from e
        if not (0 <= u < k and 0 <= v < k) or u == v:
            raise InvalidBoardError(f"Edge-list line {lineno}: bad edge ({u}, {v}) for k={k}.")
        edges.append((min(u, v), max(u, v)))
    return k, edges

def format_edge_list(k: int, edges: Iterable[Tuple[int, int]]) -> str:
    ordered = sorted({(min(u, v), max(u, v)) for u, v in edges})
    lines = [f"{k} {len(ordered)}"]
    lines.extend(f"{u} {v}" for u, v in ordered)
    return "\n".join(lines) + "\n"

def graph_from_edge_list(text: str) -> nx.Graph:
    k, edges = parse_edge_list(text)
    graph = nx.Graph()
    graph.add_nodes_from(range(k))
    graph.add_edges_from(edges)
    return graph

def read_edge_list(path: str) -> nx.Graph:
    return graph_from_edge_list(read_text(path, "graph file"))

def write_edge_list(graph: nx.Graph, path: str) -> str:
    nodes = sorted(graph.nodes())
    relabel = {node: i for i, node in enumerate(nodes)}
    edges = [(relabel[u], relabel[v]) for u, v in graph.edges()]
    return atomic_write_text(path, format_edge_list(len(nodes), edges), "graph file")

def env_workers(default: int = 1) -> int:
    raw = os.environ.get(ENV_WORKERS)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise ConfigError(f"{ENV_WORKERS} must be an integer, got {raw!r}") from e
    if value < 1:
        raise ConfigError(f"{ENV_WORKERS} must be at least 1, got {value}")
    return value
