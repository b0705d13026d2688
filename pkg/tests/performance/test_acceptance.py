"""Monte Carlo acceptance runs. Set MBGAMES_RUN_PERFORMANCE=1 to enable."""
import itertools
import math
import os

import networkx as nx
import numpy as np
import pytest

from mbgames.board import Player
from mbgames.breaker import isolation_breaker, potential_breaker
from mbgames.chains import build_chain
from mbgames.engine import Claim, FamilyWin, GameConfig, Strategy, Transcript, replay, run_game
from mbgames.experiments import GameSpec, estimate_threshold, fit_exponent, sweep, sweep_grid
from mbgames.factors import has_kr_factor, verify_factor
from mbgames.hypergraph import haxell_select
from mbgames.maker import ScriptedMaker, greedy_at_vertex_maker, greedy_clique_maker, random_maker
from mbgames.potential import f_value, potential_monotonicity_audit
from mbgames.specs import build_breaker, build_maker
from mbgames.winsets import ExplicitFamily, PatternGraph, enumerate_h_copies

pytestmark = [
    pytest.mark.performance,
    pytest.mark.skipif(os.environ.get("MBGAMES_RUN_PERFORMANCE") != "1", reason="set MBGAMES_RUN_PERFORMANCE=1"),
]


class HeaviestElementMaker(Strategy):
    """Claims the open element lying in the most winning sets Breaker has not touched."""

    name = "heaviest"

    def __init__(self, family):
        self.family = family

    def move(self, view):
        board = view.board
        breaker = set(board.breaker_elements())
        live = [h for h in self.family if not h & breaker]
        free = board.open_elements()
        free.sort(key=lambda e: (-sum(1 for h in live if e in h), e))
        return Claim(free[: view.budget])


def _random_family(rng, size, count, width):
    return ExplicitFamily(size, [rng.choice(size, size=width, replace=False).tolist() for _ in range(count)])


def test_small_potential_concedes_nothing():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 50:
        q = int(rng.integers(1, 4))
        family = _random_family(rng, int(rng.integers(10, 20)), int(rng.integers(3, 12)), int(rng.integers(4, 8)))
        if (1 + q) * f_value(family, 1, q).f >= 1:
            continue
        checked += 1
        for maker in (random_maker(), ScriptedMaker([]), HeaviestElementMaker(family)):
            config = GameConfig(FamilyWin(family), breaker_bias=q, seed=checked)
            result = run_game(config, maker, potential_breaker(family, 1, q)).result
            assert result.fault is None
            assert result.fully_claimed == 0
            assert result.winner is Player.BREAKER
    for n, q in ((6, 4), (7, 6)):
        family = enumerate_h_copies(n, PatternGraph.complete(3))
        assert (1 + q) * f_value(family, 1, q).f < 1
        config = GameConfig(FamilyWin(family), breaker_bias=q, seed=n)
        assert run_game(config, greedy_clique_maker(3), potential_breaker(family, 1, q)).result.winner is Player.BREAKER


@pytest.mark.parametrize("dynamic", [False, True])
def test_potential_is_monotone(dynamic):
    for seed in range(100):
        n = 6 + seed % 3
        q = 1 + seed % 4
        config = GameConfig.from_spec("copies:K3", n, breaker_bias=q, dynamic=dynamic, seed=seed)
        maker = random_maker() if seed % 2 else greedy_clique_maker(3)
        transcript = run_game(config, maker, build_breaker("potential", config))
        audit = potential_monotonicity_audit(transcript)
        assert audit.passed, audit.summary()
        assert transcript.result.fully_claimed <= audit.bound * (1 + 1e-9)


def _brute_force_factor(graph, r):
    nodes = sorted(graph.nodes())

    def split(rest):
        if not rest:
            return True
        first = rest[0]
        for others in itertools.combinations(rest[1:], r - 1):
            block = (first,) + others
            if all(graph.has_edge(u, w) for u, w in itertools.combinations(block, 2)):
                if split([x for x in rest if x not in block]):
                    return True
        return False

    return split(nodes)


def test_factor_search_matches_brute_force():
    pairs = list(itertools.combinations(range(6), 2))
    for mask in range(1 << len(pairs)):
        graph = nx.empty_graph(6)
        graph.add_edges_from(p for i, p in enumerate(pairs) if mask >> i & 1)
        assert bool(has_kr_factor(graph, 3)) == _brute_force_factor(graph, 3)
    for seed in range(500):
        graph = nx.gnp_random_graph(8, 0.7, seed=seed)
        result = has_kr_factor(graph, 4)
        assert bool(result) == _brute_force_factor(graph, 4)
        if result:
            assert verify_factor(graph, result.certificate.blocks, 4)


@pytest.mark.parametrize("r,length", [(r, length) for r in (4, 5) for length in range(6)])
def test_chain_invariants(r, length):
    chain = build_chain(r, length)
    if length:
        assert len(chain.vertices) == r * length + 1
    assert len(chain.removable) == length + 1
    for u in chain.removable:
        rest = [x for x in chain.vertices if x != u]
        assert verify_factor(chain.graph(), chain.factor_after_removal(u).blocks, r, rest)


def test_criterion_always_yields_a_system():
    rng = np.random.default_rng(7)
    held = 0
    for _ in range(500):
        r = int(rng.integers(2, 4))
        t = int(rng.integers(1, 6))
        hypergraphs = [
            [rng.choice(18, size=r, replace=False).tolist() for _ in range(int(rng.integers(4, 9)))]
            for _ in range(t)
        ]
        result = haxell_select(hypergraphs, r, seed=1)
        if result.criterion_holds:
            held += 1
            assert result.system is not None
            used = [x for h in result.system for x in h]
            assert len(used) == len(set(used))
    assert held > 0


@pytest.mark.parametrize("n", [32, 64, 128])
def test_isolation_keeps_vertex_out_of_k4(n):
    b = math.ceil(4 * n ** (1 / 3))
    for seed in range(200):
        for maker in (random_maker(), greedy_at_vertex_maker(0, 4)):
            config = GameConfig.from_spec("kvertex:0:4", n, breaker_bias=b, seed=seed)
            breaker = isolation_breaker(0, 4, b, n, audit=True)
            result = run_game(config, maker, breaker).result
            assert result.fault is None
            assert result.winner is Player.BREAKER
            assert breaker.max_neighbourhood <= 2 * n / b + 1


MAKERS = ["random", "random(mode=forfeit)", "greedy", "atvertex"]
BREAKERS = ["random", "null", "potential", "dynamicH", "forest"]


def test_fuzzed_games_replay():
    rng = np.random.default_rng(99)
    for i in range(500):
        config = GameConfig.from_spec(
            "copies:K3",
            int(rng.integers(5, 9)),
            maker_bias=int(rng.integers(1, 3)),
            breaker_bias=int(rng.integers(1, 6)),
            dynamic=bool(rng.integers(0, 2)),
            seed=i,
        )
        maker = build_maker(MAKERS[i % len(MAKERS)], config)
        breaker = build_breaker(BREAKERS[(i // len(MAKERS)) % len(BREAKERS)], config)
        transcript = run_game(config, maker, breaker)
        assert replay(transcript).consistent
        assert replay(Transcript.from_json(transcript.to_json())).consistent


def test_win_rate_falls_with_bias():
    games = 40
    records = sweep(sweep_grid("copies:K3", [8], range(1, 7), "random", "random"), games, seed=11, workers=1)
    for lower, higher in zip(records, records[1:]):
        spread = math.sqrt(
            lower.win_rate * (1 - lower.win_rate) / games + higher.win_rate * (1 - higher.win_rate) / games
        )
        assert higher.win_rate <= lower.win_rate + 2 * spread + 1e-9


def _fitted_slope(win, ns, maker, breaker, dynamic=False, min_bias=1):
    estimates = []
    for n in ns:
        spec = GameSpec(win, n, maker, breaker, dynamic=dynamic)
        estimate = estimate_threshold(spec, probes=20, seed=n, min_bias=min_bias)
        assert not estimate.flags, estimate.flags
        estimates.append(estimate)
    return fit_exponent(estimates)


@pytest.mark.slow
def test_triangle_threshold_grows_like_sqrt_n():
    fit = _fitted_slope("copies:K3", [50, 100, 200], "greedy(r=3)", "dynamicH", dynamic=True)
    assert abs(fit.slope - 0.5) <= 0.15, fit.to_dict()


@pytest.mark.slow
def test_k4_factor_threshold_grows_like_cube_root_n():
    fit = _fitted_slope("kfactor:4", [32, 64, 128], "atvertex(v=0, r=4)", "isolate(v=0, r=4)", min_bias=2)
    assert abs(fit.slope - 1 / 3) <= 0.15, fit.to_dict()
