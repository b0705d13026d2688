from __future__ import annotations

import networkx as nx
import pytest

from mbgames.exceptions import ConfigError
from mbgames.neat import NeatParams, NeatStatus, neat_check


def test_complete_graph_has_no_counterexample():
    report = neat_check(nx.complete_graph(30), NeatParams(alpha=0.2, beta=0.5, p=1.0, r=4, trials=10))
    assert report.p1_degree.status is NeatStatus.PASS
    assert report.p1_expansion.status is NeatStatus.NO_COUNTEREXAMPLE
    assert report.p2.status is NeatStatus.NO_COUNTEREXAMPLE
    assert report.p3.status is NeatStatus.NO_COUNTEREXAMPLE
    assert not report.failed
    assert not report.warnings


def test_empty_graph_fails():
    report = neat_check(nx.empty_graph(30), NeatParams(alpha=0.2, beta=0.5, p=0.5, r=4, trials=5))
    assert report.p1_degree.status is NeatStatus.FAIL
    assert report.p1_degree.witness["degree"] == 0
    assert report.p2.status is NeatStatus.VACUOUS
    assert report.p3.status is NeatStatus.FAIL
    assert len(report.p3.witness["parts"]) == 5
    assert report.failed


def test_small_graphs_are_vacuous(caplog):
    report = neat_check(nx.complete_graph(5), NeatParams(alpha=0.9, beta=0.1, p=1.0, r=4, trials=3))
    assert report.p1_expansion.status is NeatStatus.VACUOUS
    assert report.p3.status is NeatStatus.VACUOUS
    assert any("P1 expansion is vacuous" in w for w in report.warnings)
    assert "vacuous" in caplog.text


def test_report_serialises():
    data = neat_check(nx.complete_graph(12), NeatParams(alpha=0.5, beta=0.5, p=1.0, r=4, trials=2)).to_dict()
    assert [p["name"] for p in data["properties"]] == ["P1-degree", "P1-expansion", "P2", "P3"]
    assert data["properties"][0]["status"] == "pass"


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(alpha=0.0, beta=0.5, p=0.5, r=4),
        dict(alpha=0.5, beta=1.0, p=0.5, r=4),
        dict(alpha=0.5, beta=0.5, p=0.0, r=4),
        dict(alpha=0.5, beta=0.5, p=0.5, r=3),
        dict(alpha=0.5, beta=0.5, p=0.5, r=4, trials=0),
    ],
)
def test_params_are_validated(kwargs):
    with pytest.raises(ConfigError):
        NeatParams(**kwargs)


def test_empty_graph_is_rejected():
    with pytest.raises(ConfigError, match="nonempty"):
        neat_check(nx.Graph(), NeatParams(alpha=0.5, beta=0.5, p=0.5, r=4))
