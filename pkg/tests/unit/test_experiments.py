from __future__ import annotations

import logging

import networkx as nx
import pytest

from mbgames.constants import SWEEP_CSV_FIELDS
from mbgames.exceptions import ConfigError, InsufficientDataError, StrategySpecError
from mbgames.experiments import (
    GameSpec,
    ThresholdEstimate,
    discrepancy_diagnostics,
    estimate_threshold,
    fit_exponent,
    play_one,
    random_graph,
    sweep,
    sweep_csv,
    sweep_grid,
    uniformity_diagnostic,
    write_sweep_csv,
)

PAIRS_OF_FOUR = "explicit:4:[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]"


def test_play_one_reports_outcome():
    outcome = play_one(GameSpec(PAIRS_OF_FOUR, None, "random", "random", breaker_bias=3), 7)
    assert outcome.winner == "breaker"
    assert not outcome.faulted


def test_play_one_turns_errors_into_faults():
    outcome = play_one(GameSpec("copies:K3", 5, "random", "isolate"), 0)
    assert outcome.faulted
    assert outcome.winner is None
    assert "b must be >= 2" in outcome.message


def test_sweep_counts_wins():
    cells = sweep_grid(PAIRS_OF_FOUR, [None], [1, 3], "random", "random")
    records = sweep(cells, games=4, seed=9, workers=1)
    assert [(r.b, r.maker_wins, r.breaker_wins, r.faults) for r in records] == [(1, 4, 0, 0), (3, 0, 4, 0)]
    assert records[0].win_rate == 1.0
    assert records[0].pattern == "explicit"


def test_sweep_is_reproducible():
    cells = sweep_grid("copies:K3", [6], [2], "random", "random")
    assert sweep(cells, games=3, seed=5, workers=1) == sweep(cells, games=3, seed=5, workers=1)


def test_sweep_csv_layout(tmp_path):
    records = sweep(sweep_grid(PAIRS_OF_FOUR, [None], [2], "random", "random"), games=2, seed=1, workers=1)
    text = sweep_csv(records)
    header, row = text.splitlines()
    assert header == ",".join(SWEEP_CSV_FIELDS)
    assert row.split(",")[0] == ""
    assert row.split(",")[3] == "2"
    path = write_sweep_csv(records, str(tmp_path / "sweep.csv"))
    with open(path, encoding="utf-8") as handle:
        assert handle.read() == text


def test_sweep_validation():
    with pytest.raises(ConfigError):
        sweep([], games=1, seed=0)
    cells = sweep_grid(PAIRS_OF_FOUR, [None], [1], "random", "random")
    with pytest.raises(ConfigError):
        sweep(cells, games=0, seed=0)
    with pytest.raises(StrategySpecError):
        sweep(sweep_grid(PAIRS_OF_FOUR, [None], [1], "random", "nobody"), games=1, seed=0)


def test_threshold_of_pairs_game():
    estimate = estimate_threshold(GameSpec(PAIRS_OF_FOUR, None, "random", "random"), probes=4, seed=3, workers=1)
    assert (estimate.lo, estimate.hi) == (2, 3)
    assert estimate.value == 2
    assert not estimate.flags
    assert estimate.rates[2] == 1.0
    assert estimate.to_dict()["rates"]["3"] == 0.0


def test_threshold_flags_hopeless_maker():
    spec = GameSpec("explicit:4:[[0,1,2,3]]", None, "random", "random")
    estimate = estimate_threshold(spec, probes=2, workers=1)
    assert estimate.flags == ["maker loses already at b=1"]
    assert estimate.value == 0.5


def test_threshold_arguments():
    spec = GameSpec(PAIRS_OF_FOUR, None, "random", "random")
    with pytest.raises(ConfigError):
        estimate_threshold(spec, crossing=1.0)
    with pytest.raises(ConfigError):
        estimate_threshold(spec, probes=0)
    with pytest.raises(ConfigError, match="min_bias"):
        estimate_threshold(spec, min_bias=5)


def test_threshold_starts_at_min_bias():
    spec = GameSpec(PAIRS_OF_FOUR, None, "random", "random")
    estimate = estimate_threshold(spec, probes=2, workers=1, min_bias=2)
    assert (estimate.lo, estimate.hi) == (2, 3)
    assert 1 not in estimate.rates
    estimate = estimate_threshold(spec, probes=2, workers=1, min_bias=3)
    assert estimate.flags == ["maker loses already at b=3"]
    assert (estimate.lo, estimate.hi) == (2, 3)


def test_threshold_warns_about_aborted_games(caplog):
    spec = GameSpec("kvertex:0:3", 6, "random", "isolate")
    with caplog.at_level(logging.WARNING, logger="mbgames.experiments"):
        estimate = estimate_threshold(spec, probes=2, workers=1)
    assert estimate.rates[1] == 0.0
    assert "2 of 2 games at b=1 aborted" in caplog.text
    assert "b must be >= 2" in caplog.text


def test_fit_exponent_recovers_slope():
    fit = fit_exponent([(10, 5), (100, 50), (1000, 500)])
    assert fit.slope == pytest.approx(1.0)
    assert fit.rvalue == pytest.approx(1.0)
    half = fit_exponent([(4, 2), (16, 4), (64, 8), (256, 16)])
    assert half.slope == pytest.approx(0.5)


def test_fit_exponent_needs_data():
    with pytest.raises(InsufficientDataError, match="3 distinct"):
        fit_exponent([(10, 5), (10, 6), (100, 50)])
    with pytest.raises(InsufficientDataError, match="positive"):
        fit_exponent([(10, 0), (100, 50), (1000, 500)])
    estimate = ThresholdEstimate(None, "explicit", "random", "random", 2, 3, 0.5, 4, 0)
    with pytest.raises(InsufficientDataError):
        fit_exponent([estimate])


def test_discrepancy_of_complete_graph_is_zero():
    report = discrepancy_diagnostics(nx.complete_graph(20), 1.0, samples=20)
    assert report.max_degree_deviation == 0
    assert report.max_pair_deviation == 0
    assert report.max_set_deviation == 0
    assert not report.flagged


def test_discrepancy_of_random_graph_is_moderate():
    report = discrepancy_diagnostics(random_graph(200, 0.3, seed=1), 0.3, samples=50, seed=2)
    assert report.max_degree_deviation < report.level
    assert report.to_dict()["n"] == 200


def test_discrepancy_arguments():
    with pytest.raises(ConfigError):
        discrepancy_diagnostics(nx.complete_graph(5), 1.5)
    with pytest.raises(ConfigError):
        discrepancy_diagnostics(nx.empty_graph(1), 0.5)


def test_uniformity_diagnostic():
    assert uniformity_diagnostic([100, 100, 100, 100]).uniform
    assert not uniformity_diagnostic([1000, 0, 0, 0]).uniform
    with pytest.raises(InsufficientDataError):
        uniformity_diagnostic([5])
    with pytest.raises(InsufficientDataError):
        uniformity_diagnostic([0, 0])
