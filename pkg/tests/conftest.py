import os

import networkx as nx
import pytest

from mbgames.utils import write_edge_list

PAIRS_OF_FOUR = "explicit:4:[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]"

@pytest.fixture
def temp_dir(tmpdir):
    return str(tmpdir)

@pytest.fixture
def pairs_of_four():
    return PAIRS_OF_FOUR

@pytest.fixture
def edge_list_file(temp_dir):
    def _write(graph, name="graph.txt"):
        return write_edge_list(graph, os.path.join(temp_dir, name))
    return _write

@pytest.fixture
def two_disjoint_k4(edge_list_file):
    graph = nx.disjoint_union(nx.complete_graph(4), nx.complete_graph(4))
    return edge_list_file(graph, "two_k4.txt")
