from __future__ import annotations

import networkx as nx

from mbgames.board import Player, new_complete_board
from mbgames.dangerous import DangerousTracker, dangerous_structures
from mbgames.winsets import PatternGraph

K3 = PatternGraph.complete(3)


def test_cherry_is_dangerous_for_triangles():
    report = dangerous_structures(nx.path_graph(3), [], K3)
    assert report.pairs == {(0, 2)}
    (structure,) = report.structures
    assert structure.edges == frozenset({(0, 1), (1, 2)})


def test_blocked_pair_is_not_dangerous():
    report = dangerous_structures(nx.path_graph(3), [(2, 0)], K3)
    assert report.is_empty()
    assert report.to_dict() == {"structures": [], "fans": [], "flowers": []}


def test_star_groups_into_fans():
    star = nx.star_graph(3)
    report = dangerous_structures(star, [], K3)
    assert report.pairs == {(1, 2), (1, 3), (2, 3)}
    assert len(report.fans) == 3
    assert all(group.t == 2 and group.simple for group in report.fans)
    assert {group.shared for group in report.fans} == {(0, 1), (0, 2), (0, 3)}


def test_groups_truncate_at_t_max():
    report = dangerous_structures(nx.star_graph(3), [], K3, t_max=1)
    assert all(group.truncated and group.t == 1 for group in report.fans)


def test_tracker_ranks_open_pairs():
    board = new_complete_board(4)
    tracker = DangerousTracker(4, K3)
    board.claim(board.encode(0, 1), Player.MAKER)
    assert tracker.add_maker_edge(board.maker_adjacency(), 0, 1) == 0
    board.claim(board.encode(0, 2), Player.MAKER)
    assert tracker.add_maker_edge(board.maker_adjacency(), 0, 2) > 0
    assert tracker.priorities(board) == [board.encode(1, 2)]
    board.claim(board.encode(1, 2), Player.BREAKER)
    assert tracker.priorities(board) == []
    assert not tracker.truncated
