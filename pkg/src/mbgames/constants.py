from __future__ import annotations


DEFAULT_DELTA = 0.5
DEFAULT_T_CLUSTER = 3


FAMILY_INDEX_CAPACITY = 2_000_000
CANONICAL_MAX_VERTICES = 8


CHAIN_SEARCH_BUDGET = 1_000_000
HAXELL_EXHAUSTIVE_MAX_T = 16
HAXELL_SAMPLED_SUBSETS = 4096
TAU_MAX_VERTICES = 25
TAU_MAX_EDGES = 20


POTENTIAL_REL_TOL = 1e-9
ARGMAX_REL_TOL = 1e-12


DEFAULT_CROSSING = 0.5
DEFAULT_PROBES = 50
DEFAULT_GAMES_PER_CELL = 20
DISCREPANCY_FLAG_LEVEL = 3.0
DEFAULT_NEAT_TRIALS = 100
NEAT_SEARCH_BUDGET = 200_000


ENV_WORKERS = "MBGAMES_WORKERS"


TRANSCRIPT_FORMAT_VERSION = 1
SWEEP_CSV_FIELDS = (
    "n",
    "r",
    "pattern",
    "b",
    "games",
    "maker_wins",
    "breaker_wins",
    "faults",
    "mean_rounds",
    "seed",
)
