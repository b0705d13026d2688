from __future__ import annotations

import logging
import os

import networkx as nx
import pytest

from mbgames.exceptions import ConfigError, InvalidBoardError
from mbgames.rng import derive_seed, fresh_seed, make_rng
from mbgames.utils import (
    atomic_write_text,
    canonical_json,
    env_workers,
    format_edge_list,
    graph_from_edge_list,
    parse_edge_list,
    read_edge_list,
    read_text,
    setup_logging,
    write_edge_list,
)


@pytest.fixture
def package_logger():
    logger = logging.getLogger("mbgames")
    saved = (logger.level, list(logger.handlers), logger.propagate)
    yield logger
    logger.setLevel(saved[0])
    logger.handlers[:] = saved[1]
    logger.propagate = saved[2]


def test_setup_logging_installs_one_handler(package_logger):
    package_logger.handlers.clear()
    setup_logging(logging.DEBUG)
    setup_logging(logging.INFO)
    assert package_logger.level == logging.INFO
    assert len(package_logger.handlers) == 1
    assert package_logger.propagate is False


def test_canonical_json_sorts_keys():
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'


def test_parse_edge_list_with_comments():
    text = "# a triangle\n3 3\n0 1\n2 1\n\n# closing edge\n0 2\n"
    assert parse_edge_list(text) == (3, [(0, 1), (1, 2), (0, 2)])


@pytest.mark.parametrize(
    "text,match",
    [
        ("", "empty"),
        ("3\n", "header"),
        ("3 two\n", "header"),
        ("3 2\n0 1\n", "declares 2 edges"),
        ("3 1\n0 1 2\n", "expected 'u v'"),
        ("3 1\n0 x\n", "line 2"),
        ("3 1\n0 3\n", "bad edge"),
        ("3 1\n1 1\n", "bad edge"),
        ("-1 0\n", "non-negative"),
    ],
)
def test_parse_edge_list_errors(text, match):
    with pytest.raises(InvalidBoardError, match=match):
        parse_edge_list(text)


def test_format_edge_list_normalises():
    assert format_edge_list(4, [(3, 0), (1, 2), (0, 3)]) == "4 2\n0 3\n1 2\n"


def test_graph_from_edge_list_keeps_isolated_vertices():
    graph = graph_from_edge_list("5 1\n0 4\n")
    assert graph.number_of_nodes() == 5
    assert list(graph.edges()) == [(0, 4)]


def test_edge_list_files(tmp_path):
    graph = nx.relabel_nodes(nx.cycle_graph(4), {0: "a", 1: "b", 2: "c", 3: "d"})
    path = write_edge_list(graph, str(tmp_path / "c4.txt"))
    loaded = read_edge_list(path)
    assert nx.is_isomorphic(graph, loaded)
    assert sorted(loaded.nodes()) == [0, 1, 2, 3]


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    target = str(tmp_path / "out.json")
    atomic_write_text(target, "first")
    atomic_write_text(target, "second")
    assert read_text(target) == "second"
    assert os.listdir(tmp_path) == ["out.json"]


def test_env_workers(monkeypatch):
    monkeypatch.delenv("MBGAMES_WORKERS", raising=False)
    assert env_workers() == 1
    assert env_workers(default=3) == 3
    monkeypatch.setenv("MBGAMES_WORKERS", "4")
    assert env_workers() == 4
    monkeypatch.setenv("MBGAMES_WORKERS", " ")
    assert env_workers() == 1
    for bad in ("four", "0"):
        monkeypatch.setenv("MBGAMES_WORKERS", bad)
        with pytest.raises(ConfigError, match="MBGAMES_WORKERS"):
            env_workers()


def test_streams_are_reproducible_and_independent():
    a = make_rng(42, 1).integers(1 << 30, size=8).tolist()
    assert a == make_rng(42, 1).integers(1 << 30, size=8).tolist()
    assert a != make_rng(42, 2).integers(1 << 30, size=8).tolist()
    assert a != make_rng(43, 1).integers(1 << 30, size=8).tolist()


def test_derived_seeds_are_64_bit():
    seeds = {derive_seed(7, c, g) for c in range(3) for g in range(10)}
    assert len(seeds) == 30
    assert all(0 <= s < 1 << 64 for s in seeds)
    assert derive_seed(7, 0, 0) == derive_seed(7, 0, 0)
    assert 0 <= fresh_seed() < 1 << 64
