from __future__ import annotations

import networkx as nx
import pytest

from mbgames.chains import build_chain, canonical_factor, find_chain_in
from mbgames.exceptions import PreconditionError
from mbgames.factors import verify_factor


def test_build_chain_shape():
    chain = build_chain(3, 2)
    assert chain.links == (0, 3, 6)
    assert chain.blocks == ((0, 1, 2, 3), (3, 4, 5, 6))
    assert chain.vertices == list(range(7))
    assert len(chain.edges()) == 10
    assert not chain.graph().has_edge(0, 3)


@pytest.mark.parametrize("u", [0, 3, 6])
def test_every_link_leaves_a_factor(u):
    chain = build_chain(3, 2)
    certificate = chain.factor_after_removal(u)
    rest = [x for x in chain.vertices if x != u]
    assert verify_factor(chain.graph(), certificate.blocks, 3, rest)


def test_factor_after_removal_splits_at_the_link():
    assert build_chain(3, 2).factor_after_removal(3).blocks == ((0, 1, 2), (4, 5, 6))
    with pytest.raises(PreconditionError, match="not a removable"):
        build_chain(3, 2).factor_after_removal(1)


def test_build_chain_preconditions():
    with pytest.raises(PreconditionError, match="r >= 3"):
        build_chain(2, 1)
    with pytest.raises(PreconditionError):
        build_chain(3, -1)


def test_shifted_chain_keeps_structure():
    chain = build_chain(4, 1).shifted(10)
    assert chain.links == (10, 14)
    assert chain.to_dict()["removable"] == [10, 14]


def test_find_chain_in_host_graphs():
    host = nx.complete_graph(7)
    found = find_chain_in(host, 3, 2)
    assert found.found
    assert len(found.chain.vertices) == 7
    assert find_chain_in(build_chain(3, 2).graph(), 3, 2).found
    assert find_chain_in(nx.path_graph(7), 3, 2).reason == "not found"
    assert find_chain_in(nx.complete_graph(6), 3, 2).reason == "not found"


def test_find_chain_budget():
    result = find_chain_in(nx.complete_graph(7), 3, 2, budget=0)
    assert result.budget_exhausted
    assert result.reason == "not found (budget)"


def test_length_zero_chain_is_a_vertex():
    result = find_chain_in(nx.complete_graph(3), 3, 0)
    assert result.chain.vertices == [0]


def _three_chains():
    chains = [build_chain(3, 1).shifted(4 * i) for i in range(3)]
    graph = nx.Graph()
    for chain in chains:
        graph.update(chain.graph())
    graph.add_edges_from([(0, 4), (0, 8), (4, 8)])
    return graph, chains


def test_canonical_factor():
    graph, chains = _three_chains()
    certificate = canonical_factor(graph, chains, [0, 4, 8])
    assert certificate.blocks == ((0, 4, 8), (1, 2, 3), (5, 6, 7), (9, 10, 11))
    assert verify_factor(graph, certificate.blocks, 3)


def test_canonical_factor_rejects_bad_input():
    graph, chains = _three_chains()
    with pytest.raises(PreconditionError, match="not a clique"):
        canonical_factor(graph, chains, [0, 4, 11])
    with pytest.raises(PreconditionError, match="exactly r=3"):
        canonical_factor(graph, chains[:2], [0, 4, 8])
    with pytest.raises(PreconditionError):
        canonical_factor(graph, [], [0])
