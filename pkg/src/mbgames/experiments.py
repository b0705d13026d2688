from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy import stats

from .board import Player
from .constants import DEFAULT_CROSSING, DEFAULT_PROBES, DISCREPANCY_FLAG_LEVEL, SWEEP_CSV_FIELDS
from .engine import GameConfig, parse_win, run_game
from .exceptions import ConfigError, InsufficientDataError, MBGamesError
from .graphsearch import graph_to_adjacency, mask_of
from .rng import derive_seed, make_rng
from .specs import build_breaker, build_maker, check_spec
from .utils import atomic_write_text, canonical_json, env_workers

__all__ = [
    "GameSpec",
    "GameOutcome",
    "SweepRecord",
    "ThresholdEstimate",
    "ExponentFit",
    "DiscrepancyReport",
    "UniformityReport",
    "play_one",
    "sweep",
    "sweep_grid",
    "sweep_csv",
    "write_sweep_csv",
    "estimate_threshold",
    "fit_exponent",
    "discrepancy_diagnostics",
    "random_graph",
    "uniformity_diagnostic",
]

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class GameSpec:
    """Everything needed to rebuild one game in a worker process."""

    win: str
    n: Optional[int]
    maker: str
    breaker: str
    maker_bias: int = 1
    breaker_bias: int = 1
    dynamic: bool = False
    max_rounds: Optional[int] = None
    play_out: bool = False

    def config(self, seed: int) -> GameConfig:
        return GameConfig(
            parse_win(self.win, self.n),
            maker_bias=self.maker_bias,
            breaker_bias=self.breaker_bias,
            dynamic=self.dynamic,
            max_rounds=self.max_rounds,
            seed=seed,
            play_out=self.play_out,
        )

    def with_bias(self, b: int) -> "GameSpec":
        return replace(self, breaker_bias=b)

    def labels(self) -> Tuple[Optional[int], str]:
        return parse_win(self.win, self.n).labels()

    def universe_size(self) -> int:
        return parse_win(self.win, self.n).universe_size

    def validate(self) -> None:
        check_spec(self.maker, "maker")
        check_spec(self.breaker, "breaker")
        self.config(0)

@dataclass(frozen=True)
class GameOutcome:
    winner: Optional[str]
    faulted: bool
    rounds: int
    message: str = ""

def play_one(spec: GameSpec, seed: int) -> GameOutcome:
    try:
        config = spec.config(seed)
        transcript = run_game(config, build_maker(spec.maker, config), build_breaker(spec.breaker, config))
    except MBGamesError as e:
        _LOG.debug("game with seed %d aborted: %s", seed, e)
        return GameOutcome(None, True, 0, str(e))
    result = transcript.result
    return GameOutcome(result.winner.value, result.fault is not None, result.rounds)

def _play_all(spec: GameSpec, seeds: Sequence[int], workers: int, progress: bool, desc: str) -> List[GameOutcome]:
    bar = None
    if progress:
        try:
            from tqdm import tqdm

            bar = tqdm(total=len(seeds), desc=desc, unit="game", leave=False)
        except ImportError:
            bar = None
    outcomes: List[GameOutcome] = []
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for outcome in pool.map(play_one, [spec] * len(seeds), seeds, chunksize=max(1, len(seeds) // (4 * workers))):
                outcomes.append(outcome)
                if bar is not None:
                    bar.update(1)
    else:
        for seed in seeds:
            outcomes.append(play_one(spec, seed))
            if bar is not None:
                bar.update(1)
    if bar is not None:
        bar.close()
    return outcomes


@dataclass(frozen=True)
class SweepRecord:
    n: Optional[int]
    r: Optional[int]
    pattern: str
    b: int
    games: int
    maker_wins: int
    breaker_wins: int
    faults: int
    mean_rounds: float
    seed: int

    @property
    def win_rate(self) -> float:
        return self.maker_wins / self.games if self.games else 0.0

    def row(self) -> Dict[str, str]:
        values = {
            "n": "" if self.n is None else str(self.n),
            "r": "" if self.r is None else str(self.r),
            "pattern": self.pattern,
            "b": str(self.b),
            "games": str(self.games),
            "maker_wins": str(self.maker_wins),
            "breaker_wins": str(self.breaker_wins),
            "faults": str(self.faults),
            "mean_rounds": f"{self.mean_rounds:.6f}",
            "seed": str(self.seed),
        }
        return {key: values[key] for key in SWEEP_CSV_FIELDS}

def sweep_grid(
    win: str,
    ns: Iterable[Optional[int]],
    biases: Iterable[int],
    maker: str,
    breaker: str,
    **kwargs,
) -> List[GameSpec]:
    biases = list(biases)
    return [GameSpec(win, n, maker, breaker, breaker_bias=b, **kwargs) for n in ns for b in biases]

def sweep(
    cells: Sequence[GameSpec],
    games: int,
    seed: int,
    workers: Optional[int] = None,
    progress: bool = False,
) -> List[SweepRecord]:
    if not cells:
        raise ConfigError("A sweep needs at least one cell.")
    if games < 1:
        raise ConfigError(f"games per cell must be positive, got {games}.")
    for cell in cells:
        cell.validate()
    workers = env_workers() if workers is None else workers
    records = []
    for c, cell in enumerate(cells):
        seeds = [derive_seed(seed, c, g) for g in range(games)]
        outcomes = _play_all(cell, seeds, workers, progress, f"cell {c + 1}/{len(cells)}")
        faults = sum(1 for o in outcomes if o.faulted)
        clean = [o for o in outcomes if not o.faulted]
        r, pattern = cell.labels()
        record = SweepRecord(
            n=cell.n,
            r=r,
            pattern=pattern,
            b=cell.breaker_bias,
            games=games,
            maker_wins=sum(1 for o in clean if o.winner == Player.MAKER.value),
            breaker_wins=sum(1 for o in clean if o.winner == Player.BREAKER.value),
            faults=faults,
            mean_rounds=float(np.mean([o.rounds for o in outcomes])),
            seed=seed,
        )
        _LOG.info(
            "sweep cell n=%s b=%d: maker %d, breaker %d, faults %d",
            cell.n, cell.breaker_bias, record.maker_wins, record.breaker_wins, faults,
        )
        records.append(record)
    return records

def sweep_csv(records: Iterable[SweepRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(SWEEP_CSV_FIELDS), lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(record.row())
    return buffer.getvalue()

def write_sweep_csv(records: Iterable[SweepRecord], path: str) -> str:
    return atomic_write_text(path, sweep_csv(records), "sweep table")


@dataclass
class ThresholdEstimate:
    n: Optional[int]
    pattern: str
    maker: str
    breaker: str
    lo: int
    hi: int
    crossing: float
    probes: int
    seed: int
    flags: List[str] = field(default_factory=list)
    rates: Dict[int, float] = field(default_factory=dict)

    @property
    def value(self) -> float:
        return max(self.lo, 0.5)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pattern": self.pattern,
            "maker": self.maker,
            "breaker": self.breaker,
            "lo": self.lo,
            "hi": self.hi,
            "crossing": self.crossing,
            "probes": self.probes,
            "seed": self.seed,
            "flags": list(self.flags),
            "rates": {str(b): rate for b, rate in sorted(self.rates.items())},
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

def estimate_threshold(
    spec: GameSpec,
    crossing: float = DEFAULT_CROSSING,
    probes: int = DEFAULT_PROBES,
    seed: int = 0,
    workers: Optional[int] = None,
    progress: bool = False,
    min_bias: int = 1,
) -> ThresholdEstimate:
    """Bisect on Breaker's bias for the largest b at which Maker still wins at the crossing rate.

    Probing starts at ``min_bias``, for Breakers that cannot play below some bias.
    """
    if not 0 < crossing < 1:
        raise ConfigError(f"crossing must lie in (0, 1), got {crossing}.")
    if probes < 1:
        raise ConfigError(f"probes must be positive, got {probes}.")
    spec.validate()
    workers = env_workers() if workers is None else workers
    cap = spec.universe_size()
    if not 1 <= min_bias <= cap:
        raise ConfigError(f"min_bias must lie in [1, {cap}], got {min_bias}.")
    rates: Dict[int, float] = {}

    def rate(b: int) -> float:
        if b not in rates:
            seeds = [derive_seed(seed, b, g) for g in range(probes)]
            outcomes = _play_all(spec.with_bias(b), seeds, workers, progress, f"b={b}")
            aborted = [o for o in outcomes if o.winner is None]
            if aborted:
                _LOG.warning("%d of %d games at b=%d aborted and count as losses: %s", len(aborted), probes, b, aborted[0].message)
            rates[b] = sum(1 for o in outcomes if o.winner == Player.MAKER.value) / probes
            _LOG.debug("probe b=%d: maker win rate %.3f", b, rates[b])
        return rates[b]

    _, pattern = spec.labels()
    estimate = ThresholdEstimate(spec.n, pattern, spec.maker, spec.breaker, 0, 1, crossing, probes, seed, rates=rates)
    if rate(min_bias) < crossing:
        estimate.lo, estimate.hi = min_bias - 1, min_bias
        estimate.flags.append(f"maker loses already at b={min_bias}")
        return estimate
    lo = min_bias
    hi = min(max(spec.n or cap, 2 * min_bias), cap)
    while rate(hi) >= crossing:
        if hi >= cap:
            estimate.lo, estimate.hi = cap, cap + 1
            estimate.flags.append("maker wins at every bias up to the universe size")
            return estimate
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if rate(mid) >= crossing:
            lo = mid
        else:
            hi = mid
    losing_below = [b for b, x in rates.items() if b < lo and x < crossing]
    winning_above = [b for b, x in rates.items() if b > hi and x >= crossing]
    if losing_below or winning_above:
        estimate.flags.append("non-monotone win rates; interval widened")
        _LOG.warning("threshold probes for %s are not monotone in b", pattern)
        lo = min([lo] + [b - 1 for b in losing_below])
        hi = max([hi] + [b + 1 for b in winning_above])
    estimate.lo, estimate.hi = lo, hi
    _LOG.info("threshold bracket for %s at n=%s: [%d, %d]", pattern, spec.n, lo, hi)
    return estimate


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    stderr: float
    intercept: float
    rvalue: float
    points: Tuple[Tuple[float, float], ...]

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "stderr": self.stderr,
            "intercept": self.intercept,
            "rvalue": self.rvalue,
            "points": [list(p) for p in self.points],
        }

def fit_exponent(points: Iterable[Union[ThresholdEstimate, Tuple[float, float]]]) -> ExponentFit:
    """Least-squares slope of log b* against log n."""
    pairs: List[Tuple[float, float]] = []
    for point in points:
        if isinstance(point, ThresholdEstimate):
            if point.n is None:
                raise InsufficientDataError("threshold estimates without n cannot be fitted")
            pairs.append((float(point.n), float(point.value)))
        else:
            n, b = point
            pairs.append((float(n), float(b)))
    if len({n for n, _ in pairs}) < 3:
        raise InsufficientDataError(f"need at least 3 distinct n values, got {len({n for n, _ in pairs})}")
    if any(n <= 0 or b <= 0 for n, b in pairs):
        raise InsufficientDataError("log-log fits need positive n and b")
    xs = np.log([n for n, _ in pairs])
    ys = np.log([b for _, b in pairs])
    fit = stats.linregress(xs, ys)
    return ExponentFit(float(fit.slope), float(fit.stderr), float(fit.intercept), float(fit.rvalue), tuple(pairs))


@dataclass
class DiscrepancyReport:
    n: int
    p: float
    max_degree_deviation: float
    worst_vertex: object
    max_pair_deviation: float
    max_set_deviation: float
    samples: int
    level: float = DISCREPANCY_FLAG_LEVEL

    @property
    def flagged(self) -> bool:
        return max(self.max_degree_deviation, self.max_pair_deviation, self.max_set_deviation) > self.level

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "max_degree_deviation": self.max_degree_deviation,
            "worst_vertex": self.worst_vertex,
            "max_pair_deviation": self.max_pair_deviation,
            "max_set_deviation": self.max_set_deviation,
            "samples": self.samples,
            "flagged": self.flagged,
        }

_TINY = 1e-12

def discrepancy_diagnostics(graph: nx.Graph, p: float, samples: int = 100, seed: int = 0) -> DiscrepancyReport:
    """Degree concentration for every vertex plus sampled edge counts between and inside vertex sets.

    Deviations are normalised the way the concentration bounds scale, so values
    around 1 are typical for G(n, p) and values above the flag level are not.
    """
    if not 0 <= p <= 1:
        raise ConfigError(f"p must lie in [0, 1], got {p}.")
    nodes, adj = graph_to_adjacency(graph)
    n = len(nodes)
    if n < 2:
        raise ConfigError("discrepancy diagnostics need at least two vertices.")
    log_n = max(math.log(n), 1.0)
    degree_scale = math.sqrt(max(n * p, _TINY) * log_n)
    deviations = [abs(a.bit_count() - (n - 1) * p) / degree_scale for a in adj]
    worst = int(np.argmax(deviations))
    rng = make_rng(seed)
    pair_dev = 0.0
    set_dev = 0.0
    for _ in range(samples):
        order = rng.permutation(n)
        x_size = int(rng.integers(1, n // 2 + 1))
        y_size = int(rng.integers(1, n - x_size + 1))
        xs = [int(v) for v in order[:x_size]]
        ys = [int(v) for v in order[x_size:x_size + y_size]]
        y_mask = mask_of(ys)
        x_mask = mask_of(xs)
        e_xy = sum((adj[x] & y_mask).bit_count() for x in xs)
        scale = y_size * math.sqrt(max(x_size * p, _TINY) * max(math.log(n / y_size), 1.0))
        pair_dev = max(pair_dev, abs(e_xy - x_size * y_size * p) / scale)
        e_x = sum((adj[x] & x_mask).bit_count() for x in xs) // 2
        scale = x_size * math.sqrt(max(x_size * p, _TINY) * max(math.log(n / x_size), 1.0))
        set_dev = max(set_dev, abs(e_x - math.comb(x_size, 2) * p) / scale)
    report = DiscrepancyReport(n, p, deviations[worst], nodes[worst], pair_dev, set_dev, samples)
    if report.flagged:
        _LOG.info("discrepancy above %.1f on %d vertices", report.level, n)
    return report

def random_graph(n: int, p: float, seed: int = 0) -> nx.Graph:
    return nx.gnp_random_graph(n, p, seed=int(seed))


@dataclass(frozen=True)
class UniformityReport:
    statistic: float
    pvalue: float
    alpha: float

    @property
    def uniform(self) -> bool:
        return self.pvalue >= self.alpha

def uniformity_diagnostic(counts: Sequence[int], alpha: float = 0.01) -> UniformityReport:
    """Chi-square test that claim counts are spread evenly over the elements."""
    observed = np.asarray(counts, dtype=np.float64)
    if observed.size < 2 or observed.sum() <= 0:
        raise InsufficientDataError("uniformity needs at least two cells and some observations")
    result = stats.chisquare(observed)
    return UniformityReport(float(result.statistic), float(result.pvalue), alpha)
