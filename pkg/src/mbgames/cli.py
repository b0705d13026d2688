from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from typing import List, Optional

import networkx as nx

from mbgames.board import Player
from mbgames.constants import (
    DEFAULT_CROSSING,
    DEFAULT_GAMES_PER_CELL,
    DEFAULT_NEAT_TRIALS,
    DEFAULT_PROBES,
    ENV_WORKERS,
)
from mbgames.engine import GameConfig, Transcript, load_transcript, replay, run_game
from mbgames.exceptions import DivisibilityError, MBGamesError, StrategySpecError
from mbgames.experiments import (
    GameSpec,
    discrepancy_diagnostics,
    estimate_threshold,
    fit_exponent,
    random_graph,
    sweep,
    sweep_csv,
    sweep_grid,
    uniformity_diagnostic,
    write_sweep_csv,
)
from mbgames.factors import FactorCertificate, has_kr_factor, verify_factor
from mbgames.human import human_play
from mbgames.neat import NeatParams, neat_check
from mbgames.rng import fresh_seed
from mbgames.specs import build_breaker, build_maker, check_spec
from mbgames.utils import atomic_write_text, canonical_json, read_edge_list, read_text, setup_logging

try:
    from mbgames._version import version as __version__
except ImportError:
    __version__ = "0.1.0"

_SEED_MAX = (1 << 64) - 1


def _build_version_string() -> str:
    def _present(mod_name: str) -> str:
        try:
            __import__(mod_name)
            return "ok"
        except ImportError:
            return "missing"

    parts = [f"mbgames {__version__}"]
    parts.append("")
    parts.append("Core (required):")
    parts.append(f"  networkx       : {_present('networkx')}")
    parts.append(f"  numpy          : {_present('numpy')}")
    parts.append(f"  scipy          : {_present('scipy')}")
    parts.append("")
    parts.append("Optional:")
    parts.append(f"  tqdm           : {_present('tqdm')}")
    return "\n".join(parts)

def _print_err(msg: str) -> None:
    print(f"Error: {msg}", file=sys.stderr)

def _print_ok(msg: str) -> None:
    print(msg)

def _bounded_int(lo: int, hi: int, name: str = "value"):
    def _check(raw: str) -> int:
        try:
            v = int(raw)
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"{name} must be an integer, got {raw!r}"
            )
        if not (lo <= v <= hi):
            raise argparse.ArgumentTypeError(
                f"{name} must be between {lo} and {hi}, got {v}"
            )
        return v
    return _check

def _unit_float(name: str, closed: bool = False):
    def _check(raw: str) -> float:
        try:
            v = float(raw)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {raw!r}")
        if not (0 < v < 1 or (closed and v == 1)):
            raise argparse.ArgumentTypeError(f"{name} must lie in (0, 1{']' if closed else ')'}, got {v}")
        return v
    return _check

def _seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        args.seed = fresh_seed()
    return args.seed

def _load_graph(args: argparse.Namespace) -> nx.Graph:
    if args.graph:
        return read_edge_list(args.graph)
    if args.n is None or args.p is None:
        raise StrategySpecError("give either --graph FILE or --n and --p for a random graph")
    return random_graph(args.n, args.p, _seed(args))

def _write_or_print(text: str, path: Optional[str], label: str) -> None:
    if path:
        written = atomic_write_text(path, text + "\n", label.lower())
        _print_ok(f"{label}: {written}")
    else:
        _print_ok(text)


def perform_play(args: argparse.Namespace) -> bool:
    resume: Optional[Transcript] = None
    if args.resume:
        resume = load_transcript(args.resume)
        config = resume.config
        _print_ok(f"Resuming {config.win.spec} at move {len(resume.moves)} (seed {config.seed})")
    else:
        if args.win is None:
            raise StrategySpecError("play needs --win (or --resume TRANSCRIPT)")
        config = GameConfig.from_spec(
            args.win,
            args.n,
            maker_bias=args.m,
            breaker_bias=args.b,
            dynamic=args.dynamic,
            max_rounds=args.max_rounds,
            seed=_seed(args),
            play_out=args.play_out,
        )
        _print_ok(f"Seed: {config.seed} (rerun with --seed {config.seed})")

    if args.human:
        side = Player(args.human)
        if side is Player.MAKER:
            opponent = build_breaker(args.breaker, config)
        else:
            opponent = build_maker(args.maker, config)
        transcript = human_play(config, side, opponent, resume=resume)
    else:
        maker = build_maker(args.maker, config)
        breaker = build_breaker(args.breaker, config)
        transcript = run_game(config, maker, breaker, resume=resume)

    if args.out:
        written = atomic_write_text(args.out, transcript.to_json() + "\n", "transcript")
        _print_ok(f"Transcript: {written}")
    result = transcript.result
    if result is None:
        _print_ok(f"Partial game: {len(transcript.moves)} moves recorded")
        return True
    line = f"Winner: {result.winner.value} after {result.rounds} rounds (fully claimed: {result.fully_claimed})"
    if result.fault is not None:
        line += f"; {result.fault.player.value} faulted: {result.fault.message}"
    _print_ok(line)
    for note in result.notes:
        _print_ok(f"Note: {note}")
    return True

def perform_sweep(args: argparse.Namespace) -> bool:
    seed = _seed(args)
    cells = sweep_grid(
        args.win,
        args.n,
        args.b,
        args.maker,
        args.breaker,
        maker_bias=args.m,
        dynamic=args.dynamic,
        max_rounds=args.max_rounds,
    )
    _print_ok(f"Seed: {seed} (rerun with --seed {seed})")
    records = sweep(cells, args.games, seed, workers=args.workers, progress=args.progress)
    if args.csv:
        written = write_sweep_csv(records, args.csv)
        _print_ok(f"Sweep CSV: {written}")
    else:
        sys.stdout.write(sweep_csv(records))
    return True

def perform_threshold(args: argparse.Namespace) -> bool:
    seed = _seed(args)
    _print_ok(f"Seed: {seed} (rerun with --seed {seed})")
    estimates = []
    for n in args.n:
        spec = GameSpec(
            args.win,
            n,
            args.maker,
            args.breaker,
            maker_bias=args.m,
            dynamic=args.dynamic,
            max_rounds=args.max_rounds,
        )
        estimate = estimate_threshold(
            spec,
            crossing=args.crossing,
            probes=args.probes,
            seed=seed,
            workers=args.workers,
            progress=args.progress,
            min_bias=args.min_b,
        )
        flags = f"  [{'; '.join(estimate.flags)}]" if estimate.flags else ""
        _print_ok(f"n={n}: b* in [{estimate.lo}, {estimate.hi}]  estimate {estimate.value:g}{flags}")
        estimates.append(estimate)

    fit = None
    if len({e.n for e in estimates}) >= 3:
        fit = fit_exponent(estimates)
        _print_ok(f"log b* ~ {fit.slope:.3f} log n + {fit.intercept:.3f}  (stderr {fit.stderr:.3f}, r={fit.rvalue:.3f})")
    if args.out:
        payload = {"estimates": [e.to_dict() for e in estimates], "fit": fit.to_dict() if fit else None}
        written = atomic_write_text(args.out, canonical_json(payload) + "\n", "threshold report")
        _print_ok(f"Threshold report: {written}")
    return True

def perform_verify_factor(args: argparse.Namespace) -> bool:
    graph = read_edge_list(args.graph)
    if args.certificate:
        try:
            certificate = FactorCertificate.from_json(read_text(args.certificate, "certificate"))
        except (json.JSONDecodeError, KeyError, TypeError, IndexError) as e:
            _print_err(f"verify-factor failed: unreadable certificate: {e}")
            return False
        if verify_factor(graph, certificate.blocks, args.r):
            _print_ok(f"Certificate is a valid K_{args.r}-factor ({len(certificate.blocks)} blocks)")
            return True
        _print_err(f"verify-factor failed: certificate is not a K_{args.r}-factor of {args.graph}")
        return False

    n = graph.number_of_nodes()
    if n % args.r:
        raise DivisibilityError(f"{n} vertices cannot be split into copies of K_{args.r}")
    result = has_kr_factor(graph, args.r)
    if not result:
        _print_err(f"verify-factor failed: {result.reason} ({result.nodes} search nodes)")
        return False
    _write_or_print(result.certificate.to_json(), args.out, "Certificate")
    return True

def perform_check_neat(args: argparse.Namespace) -> bool:
    graph = _load_graph(args)
    params = NeatParams(args.alpha, args.beta, args.p_edge, args.r, trials=args.trials, seed=args.seed or 0)
    report = neat_check(graph, params)
    for prop in report.properties:
        _print_ok(f"{prop.name:<13} {prop.status.value:<18} {prop.detail}")
    for warning in report.warnings:
        _print_ok(f"Warning: {warning}")
    if args.out:
        written = atomic_write_text(args.out, canonical_json(report.to_dict()) + "\n", "neat report")
        _print_ok(f"Neat report: {written}")
    return not report.failed

def perform_replay(args: argparse.Namespace) -> bool:
    transcript = load_transcript(args.transcript)
    report = replay(transcript)
    if report.consistent:
        _print_ok(report.summary())
        return True
    _print_err(f"replay failed: {report.summary()}")
    return False

def perform_diagnose(args: argparse.Namespace) -> bool:
    ok = True
    if args.transcripts:
        counts: Counter = Counter()
        universe = None
        for path in args.transcripts:
            transcript = load_transcript(path)
            universe = transcript.config.universe_size
            for move in transcript.moves:
                if move.player is Player.MAKER and move.kind == "claim":
                    counts.update(move.elements)
        spread = uniformity_diagnostic([counts.get(e, 0) for e in range(universe or 0)], alpha=args.alpha)
        verdict = "uniform" if spread.uniform else "not uniform"
        _print_ok(f"Maker claims: chi2={spread.statistic:.3f} p={spread.pvalue:.4f} ({verdict} at {spread.alpha})")
        ok = spread.uniform
    if args.graph or args.n is not None:
        if args.p is None:
            raise StrategySpecError("discrepancy diagnostics need --p")
        graph = _load_graph(args)
        report = discrepancy_diagnostics(graph, args.p, samples=args.samples, seed=args.seed or 0)
        _print_ok(f"degree deviation : {report.max_degree_deviation:.3f} (vertex {report.worst_vertex!r})")
        _print_ok(f"pair deviation   : {report.max_pair_deviation:.3f}")
        _print_ok(f"set deviation    : {report.max_set_deviation:.3f}")
        _print_ok(f"flagged          : {'yes' if report.flagged else 'no'} (level {report.level:g})")
        if args.out:
            written = atomic_write_text(args.out, canonical_json(report.to_dict()) + "\n", "diagnostics report")
            _print_ok(f"Diagnostics: {written}")
    elif not args.transcripts:
        raise StrategySpecError("diagnose needs --graph, --n/--p or --transcripts")
    return ok


def _add_game_flags(p: argparse.ArgumentParser, many: bool) -> None:
    if many:
        p.add_argument("--n", type=_bounded_int(2, 10_000, "n"), nargs="+", metavar="N",
                       help="Vertex counts of K_n (omit for explicit win conditions).")
    else:
        p.add_argument("--n", type=_bounded_int(2, 10_000, "n"), default=None, metavar="N",
                       help="Vertex count of the K_n board (omit for explicit win conditions).")
    p.add_argument("--win", default=None, metavar="WIN",
                   help="Win condition: kfactor:r, kvertex:v:r, copies:H, clusters:H:t, fans:H:t "
                        "or explicit:size:[[...],...].")
    p.add_argument("--m", type=_bounded_int(1, 1 << 20, "m"), default=1, help="Maker's bias (default 1).")
    p.add_argument("--dynamic", action="store_true", help="Play on a dynamic board that starts empty.")
    p.add_argument("--maker", default="random", metavar="SPEC", help="Maker strategy, e.g. greedy(r=3).")
    p.add_argument("--breaker", default="random", metavar="SPEC", help="Breaker strategy, e.g. potential(H=K3).")
    p.add_argument("--max-rounds", type=_bounded_int(1, 1 << 30, "max-rounds"), default=None, metavar="R")
    p.add_argument("--seed", type=_bounded_int(0, _SEED_MAX, "seed"), default=None,
                   help="64-bit seed (default: fresh entropy, printed).")

def _add_graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", metavar="EDGES", default=None, help="Graph in edge-list format ('k m' then 'u v' lines).")
    p.add_argument("--n", type=_bounded_int(2, 100_000, "n"), default=None, help="Vertices of a random G(n, p) instead.")
    p.add_argument("--seed", type=_bounded_int(0, _SEED_MAX, "seed"), default=None)
    p.add_argument("--out", metavar="JSON", default=None, help="Write the report as JSON.")

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbgames",
        description=f"mbgames v{__version__}: biased Maker-Breaker games on static and dynamic boards.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=(
            "Examples:\n"
            "  mbgames play --n 12 --win kfactor:3 --b 2 --maker 'greedy(r=3)' --breaker 'potential(H=K3)' --seed 7\n"
            "  mbgames play --n 8 --win kvertex:0:4 --b 4 --breaker 'isolate(v=0,r=4)' --human maker\n"
            "  mbgames sweep --n 8 12 --win copies:K3 --b 1 2 4 --games 20 --csv sweep.csv\n"
            "  mbgames threshold --n 8 10 12 --win copies:K3 --maker 'greedy(r=3)' --out thr.json\n"
            "  mbgames verify-factor --graph g.edges --r 4\n"
            "  mbgames replay --transcript t.json\n"
        ),
    )
    parser.add_argument(
        "-v", "--version",
        action="version",
        version=_build_version_string(),
        help="Show the version banner with dependency availability.",
    )
    parser.add_argument("--verbose", action="store_true", help="Enable debug logging.")

    sub = parser.add_subparsers(dest="mode", required=True)

    play = sub.add_parser("play", help="Play one game and print the winner.")
    _add_game_flags(play, many=False)
    play.add_argument("--b", type=_bounded_int(1, 1 << 20, "b"), default=1, help="Breaker's bias (default 1).")
    play.add_argument("--play-out", action="store_true",
                      help="Keep playing after Maker completes a winning set.")
    play.add_argument("--out", metavar="JSON", default=None, help="Write the transcript here.")
    play.add_argument("--human", choices=[Player.MAKER.value, Player.BREAKER.value], default=None,
                      help="Play this side at the terminal.")
    play.add_argument("--resume", metavar="JSON", default=None,
                      help="Continue a partial transcript (its config replaces the game flags).")

    sw = sub.add_parser("sweep", help="Win/loss tallies over a grid of n and b.")
    _add_game_flags(sw, many=True)
    sw.add_argument("--b", type=_bounded_int(1, 1 << 20, "b"), nargs="+", required=True, metavar="B")
    sw.add_argument("--games", type=_bounded_int(1, 1 << 20, "games"), default=DEFAULT_GAMES_PER_CELL)
    sw.add_argument("--workers", type=_bounded_int(1, 1024, "workers"), default=None,
                    help=f"Worker processes (default: ${ENV_WORKERS} or 1).")
    sw.add_argument("--csv", metavar="CSV", default=None, help="Write the table here instead of stdout.")
    sw.add_argument("--progress", action="store_true", help="Show a progress bar.")

    th = sub.add_parser("threshold", help="Estimate the threshold bias by bisection.")
    _add_game_flags(th, many=True)
    th.add_argument("--crossing", type=_unit_float("crossing"), default=DEFAULT_CROSSING)
    th.add_argument("--probes", type=_bounded_int(1, 1 << 20, "probes"), default=DEFAULT_PROBES)
    th.add_argument("--min-b", dest="min_b", type=_bounded_int(1, 1 << 30, "min-b"), default=1,
                    help="Smallest Breaker bias to probe (isolate needs 2).")
    th.add_argument("--workers", type=_bounded_int(1, 1024, "workers"), default=None)
    th.add_argument("--out", metavar="JSON", default=None)
    th.add_argument("--progress", action="store_true")

    vf = sub.add_parser("verify-factor", help="Find or check a K_r-factor of a graph.")
    vf.add_argument("--graph", metavar="EDGES", required=True)
    vf.add_argument("--r", type=_bounded_int(1, 64, "r"), required=True)
    vf.add_argument("--certificate", metavar="JSON", default=None, help="Check this certificate instead of searching.")
    vf.add_argument("--out", metavar="JSON", default=None, help="Write the certificate here.")

    cn = sub.add_parser("check-neat", help="Sampled checks of the neat-graph properties.")
    _add_graph_flags(cn)
    cn.add_argument("--p", type=_unit_float("p", closed=True), default=None,
                    help="Edge probability of the random graph (with --n).")
    cn.add_argument("--alpha", type=_unit_float("alpha"), required=True)
    cn.add_argument("--beta", type=_unit_float("beta"), required=True)
    cn.add_argument("--density", dest="p_edge", type=_unit_float("density", closed=True), default=None,
                    help="p in the property thresholds (default: --p).")
    cn.add_argument("--r", type=_bounded_int(4, 64, "r"), required=True)
    cn.add_argument("--trials", type=_bounded_int(1, 1 << 20, "trials"), default=DEFAULT_NEAT_TRIALS)

    rp = sub.add_parser("replay", help="Re-run a transcript and check it.")
    rp.add_argument("--transcript", metavar="JSON", required=True)

    dg = sub.add_parser("diagnose", help="Discrepancy of a graph, or uniformity of Maker's claims.")
    _add_graph_flags(dg)
    dg.add_argument("--p", type=_unit_float("p", closed=True), default=None)
    dg.add_argument("--samples", type=_bounded_int(1, 1 << 20, "samples"), default=100)
    dg.add_argument("--transcripts", metavar="JSON", nargs="+", default=None)
    dg.add_argument("--alpha", type=_unit_float("alpha"), default=0.01, help="Significance level of the chi-square test.")
    return parser

def _check_args(args: argparse.Namespace) -> None:
    if args.mode in ("sweep", "threshold"):
        if args.win is None:
            raise StrategySpecError(f"{args.mode} needs --win")
        if args.n is None:
            args.n = [None]
    if args.mode in ("play", "sweep", "threshold") and not getattr(args, "resume", None):
        if getattr(args, "human", None) != Player.MAKER.value:
            check_spec(args.maker, "maker")
        if getattr(args, "human", None) != Player.BREAKER.value:
            check_spec(args.breaker, "breaker")
    if args.mode == "check-neat" and args.p_edge is None:
        if args.p is None:
            raise StrategySpecError("check-neat needs --density (or --p with a random graph)")
        args.p_edge = args.p


def dispatch(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    log_level = logging.DEBUG if args.verbose else logging.INFO
    setup_logging(log_level)
    logging.getLogger("mbgames").debug("mbgames v%s started (mode=%s).", __version__, args.mode)

    try:
        _check_args(args)
        if args.mode == "play":
            ok = perform_play(args)
        elif args.mode == "sweep":
            ok = perform_sweep(args)
        elif args.mode == "threshold":
            ok = perform_threshold(args)
        elif args.mode == "verify-factor":
            ok = perform_verify_factor(args)
        elif args.mode == "check-neat":
            ok = perform_check_neat(args)
        elif args.mode == "replay":
            ok = perform_replay(args)
        elif args.mode == "diagnose":
            ok = perform_diagnose(args)
        else:
            _print_err(f"Unknown mode: {args.mode}")
            return 2
    except StrategySpecError as e:
        _print_err(f"{args.mode}: {e}")
        return 2
    except (MBGamesError, OSError) as e:
        _print_err(f"{args.mode} failed: {e}")
        return 1
    return 0 if ok else 1

def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(dispatch(argv))

if __name__ == "__main__":
    main()
