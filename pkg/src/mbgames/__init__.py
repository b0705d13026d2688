from __future__ import annotations


try:
    from mbgames._version import version as __version__
except ImportError:
    try:
        from importlib.metadata import version as _pkg_version
        __version__ = _pkg_version("mbgames")
    except Exception:
        __version__ = "0.0.0+unknown"


from mbgames.board import Board, Player, new_abstract_board, new_complete_board
from mbgames.breaker import (
    DynamicHBreaker,
    IsolationBreaker,
    PotentialBreaker,
    dynamic_h_breaker,
    isolation_breaker,
    potential_breaker,
)
from mbgames.engine import (
    Claim,
    GameConfig,
    GameResult,
    Reveal,
    Strategy,
    Transcript,
    parallel_multiplex,
    parse_win,
    replay,
    run_game,
)
from mbgames.exceptions import MBGamesError
from mbgames.experiments import estimate_threshold, fit_exponent, sweep
from mbgames.factors import has_kr_factor, verify_factor
from mbgames.maker import greedy_at_vertex_maker, greedy_clique_maker, random_maker
from mbgames.winsets import PatternGraph, enumerate_clusters, enumerate_h_copies, enumerate_simple_fans, m2_density


from mbgames.cli import _build_version_string, dispatch, main

__all__ = [

    "__version__",

    "Board",
    "Player",
    "new_complete_board",
    "new_abstract_board",
    "PatternGraph",
    "m2_density",
    "enumerate_h_copies",
    "enumerate_clusters",
    "enumerate_simple_fans",
    "Claim",
    "Reveal",
    "GameConfig",
    "GameResult",
    "Strategy",
    "Transcript",
    "parse_win",
    "run_game",
    "replay",
    "parallel_multiplex",
    "PotentialBreaker",
    "DynamicHBreaker",
    "IsolationBreaker",
    "potential_breaker",
    "dynamic_h_breaker",
    "isolation_breaker",
    "random_maker",
    "greedy_clique_maker",
    "greedy_at_vertex_maker",
    "has_kr_factor",
    "verify_factor",
    "sweep",
    "estimate_threshold",
    "fit_exponent",
    "MBGamesError",

    "main",
    "dispatch",
    "_build_version_string",
]
