import argparse
import csv
import json
import os

import networkx as nx
import pytest

from mbgames.cli import perform_check_neat, perform_play, perform_replay, perform_sweep, perform_verify_factor
from mbgames.engine import load_transcript, replay
from mbgames.exceptions import DivisibilityError, StrategySpecError


def _play_args(**overrides):
    values = dict(
        win=None, n=None, m=1, b=1, dynamic=False, maker="random", breaker="random",
        max_rounds=None, seed=None, play_out=False, out=None, human=None, resume=None,
    )
    values.update(overrides)
    return argparse.Namespace(**values)

def test_play_then_replay(temp_dir, capsys):
    out = os.path.join(temp_dir, "k3.json")
    args = _play_args(win="copies:K3", n=7, b=2, maker="greedy(r=3)", breaker="dynamicH", dynamic=True, seed=8, out=out)
    assert perform_play(args)
    printed = capsys.readouterr().out
    assert "Seed: 8" in printed
    transcript = load_transcript(out)
    assert transcript.config.dynamic
    assert replay(transcript).consistent
    assert perform_replay(argparse.Namespace(transcript=out))

def test_fresh_seed_is_printed_and_reproducible(temp_dir, capsys, pairs_of_four):
    first = os.path.join(temp_dir, "a.json")
    args = _play_args(win=pairs_of_four, b=2, out=first)
    perform_play(args)
    assert args.seed is not None
    second = os.path.join(temp_dir, "b.json")
    perform_play(_play_args(win=pairs_of_four, b=2, seed=args.seed, out=second))
    with open(first, encoding="utf-8") as fa, open(second, encoding="utf-8") as fb:
        assert fa.read() == fb.read()

def test_play_needs_a_win_condition():
    with pytest.raises(StrategySpecError, match="--win"):
        perform_play(_play_args())

def test_sweep_to_csv(temp_dir, capsys, pairs_of_four):
    path = os.path.join(temp_dir, "sweep.csv")
    args = argparse.Namespace(
        win=pairs_of_four, n=[None], b=[1, 2, 3], m=1, dynamic=False, maker="random", breaker="random",
        max_rounds=None, seed=3, games=5, workers=1, csv=path, progress=False,
    )
    assert perform_sweep(args)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [row["b"] for row in rows] == ["1", "2", "3"]
    assert [row["maker_wins"] for row in rows] == ["5", "5", "0"]
    assert all(row["faults"] == "0" for row in rows)

def test_factor_certificate_flow(temp_dir, capsys, two_disjoint_k4, edge_list_file):
    cert = os.path.join(temp_dir, "cert.json")
    args = argparse.Namespace(graph=two_disjoint_k4, r=4, certificate=None, out=cert)
    assert perform_verify_factor(args)
    with open(cert, encoding="utf-8") as fh:
        assert json.load(fh)["r"] == 4
    args = argparse.Namespace(graph=two_disjoint_k4, r=4, certificate=cert, out=None)
    assert perform_verify_factor(args)
    path_graph = edge_list_file(nx.path_graph(8), "p8.txt")
    assert not perform_verify_factor(argparse.Namespace(graph=path_graph, r=4, certificate=cert, out=None))
    with pytest.raises(DivisibilityError):
        perform_verify_factor(argparse.Namespace(graph=two_disjoint_k4, r=3, certificate=None, out=None))

def test_check_neat_reports_failure(capsys, edge_list_file):
    path = edge_list_file(nx.empty_graph(30), "empty.txt")
    args = argparse.Namespace(
        graph=path, n=None, p=None, p_edge=0.5, alpha=0.2, beta=0.5, r=4, trials=3, seed=None, out=None,
    )
    assert not perform_check_neat(args)
    assert "P1-degree     fail" in capsys.readouterr().out
