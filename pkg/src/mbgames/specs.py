from __future__ import annotations

import logging
import re
from typing import Any, Callable, Dict, List, Tuple

from .breaker import ForestBreaker, NullBreaker, RandomBreaker, dynamic_h_breaker, isolation_breaker, potential_breaker
from .constants import DEFAULT_DELTA, DEFAULT_T_CLUSTER
from .engine import FamilyWin, GameConfig, Strategy, parallel_multiplex
from .exceptions import ConfigError, InvalidBoardError, PreconditionError, StrategySpecError
from .maker import ScriptedMaker, greedy_at_vertex_maker, greedy_clique_maker, random_maker
from .utils import read_text
from .winsets import PatternGraph, enumerate_h_copies, load_pattern

__all__ = ["parse_strategy", "build_maker", "build_breaker", "check_spec", "MAKERS", "BREAKERS"]

_LOG = logging.getLogger(__name__)

_CALL = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*", re.DOTALL)

Parsed = Tuple[str, List[Any], Dict[str, Any]]


def _split_top(text: str, sep: str) -> List[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise StrategySpecError(f"Unbalanced parentheses in {text!r}.")
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise StrategySpecError(f"Unbalanced parentheses in {text!r}.")
    parts.append(text[start:])
    return parts

def _value(token: str) -> Any:
    token = token.strip()
    low = token.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    for cast in (int, float):
        try:
            return cast(token)
        except ValueError:
            pass
    return token

def parse_strategy(spec: str) -> Parsed:
    m = _CALL.fullmatch(spec or "")
    if not m:
        raise StrategySpecError(f"Cannot parse strategy {spec!r}; expected name or name(args).")
    name, body = m.group(1), m.group(2)
    args: List[Any] = []
    kwargs: Dict[str, Any] = {}
    if body is None or not body.strip():
        return name, args, kwargs
    if name == "multiplex":
        return name, [part.strip() for part in _split_top(body, "|")], kwargs
    for item in _split_top(body, ","):
        if not item.strip():
            raise StrategySpecError(f"Empty argument in {spec!r}.")
        key, eq, raw = item.partition("=")
        if eq:
            kwargs[key.strip()] = _value(raw)
        elif kwargs:
            raise StrategySpecError(f"Positional argument after keyword in {spec!r}.")
        else:
            args.append(_value(item))
    return name, args, kwargs


def _take(name: str, args: List[Any], kwargs: Dict[str, Any], params: Tuple[str, ...]) -> Dict[str, Any]:
    if len(args) > len(params):
        raise StrategySpecError(f"{name} takes at most {len(params)} positional arguments.")
    out = dict(zip(params, args))
    for key, value in kwargs.items():
        if key not in params:
            raise StrategySpecError(f"{name} does not take {key!r} (known: {', '.join(params) or 'none'}).")
        if key in out:
            raise StrategySpecError(f"{name} got {key!r} twice.")
        out[key] = value
    return out

def _int(name: str, key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise StrategySpecError(f"{name}: {key} must be an integer, got {value!r}.")
    return value

def _default_r(config: GameConfig) -> int:
    r, _ = config.win.labels()
    if r is None:
        raise StrategySpecError("This strategy needs r=..., the win condition does not fix one.")
    return r

def _default_pattern(config: GameConfig) -> PatternGraph:
    pattern = getattr(getattr(config.win, "family", None), "pattern", None)
    if pattern is not None:
        return pattern
    return PatternGraph.complete(_default_r(config))

def _pattern(value: Any) -> PatternGraph:
    try:
        return load_pattern(str(value))
    except (ConfigError, InvalidBoardError) as e:
        raise StrategySpecError(str(e)) from e

def _need_graph(name: str, config: GameConfig) -> int:
    if config.n is None:
        raise StrategySpecError(f"{name} plays on K_n boards; the win condition has no vertex count.")
    return config.n


def _random_maker(config: GameConfig, a: Dict[str, Any]) -> Strategy:
    return random_maker(str(a.get("mode", "resample")))

def _greedy_maker(config: GameConfig, a: Dict[str, Any]) -> Strategy:
    _need_graph("greedy", config)
    return greedy_clique_maker(_int("greedy", "r", a["r"] if "r" in a else _default_r(config)))

def _atvertex_maker(config: GameConfig, a: Dict[str, Any]) -> Strategy:
    _need_graph("atvertex", config)
    return greedy_at_vertex_maker(_int("atvertex", "v", a.get("v", 0)), _int("atvertex", "r", a["r"] if "r" in a else _default_r(config)))

def _script_maker(config: GameConfig, a: Dict[str, Any]) -> Strategy:
    if "file" not in a:
        raise StrategySpecError("script needs a file: script(moves.json).")
    return ScriptedMaker.from_json(read_text(str(a["file"]), "move script"))

def _null_breaker(config: GameConfig, a: Dict[str, Any]) -> Strategy:
    return NullBreaker()

def _random_breaker(config: GameConfig, a: Dict[str, Any]) -> Strategy:
    return RandomBreaker()

def _potential_breaker(config: GameConfig, a: Dict[str, Any]) -> Strategy:
    p = _int("potential", "p", a.get("p", config.maker_bias))
    q = _int("potential", "q", a.get("q", config.breaker_bias))
    if "H" in a:
        family = enumerate_h_copies(_need_graph("potential", config), _pattern(a["H"]))
    elif isinstance(config.win, FamilyWin):
        family = config.win.family
    else:
        raise StrategySpecError(f"potential needs H=... for the predicate win condition {config.win.spec!r}.")
    return potential_breaker(family, p, q)

def _dynamic_h_breaker(config: GameConfig, a: Dict[str, Any]) -> Strategy:
    n = _need_graph("dynamicH", config)
    pattern = _pattern(a["H"]) if "H" in a else _default_pattern(config)
    return dynamic_h_breaker(
        pattern,
        config.breaker_bias,
        n,
        delta=float(a.get("delta", DEFAULT_DELTA)),
        t_cluster=_int("dynamicH", "t_cluster", a.get("t_cluster", DEFAULT_T_CLUSTER)),
    )

def _isolation_breaker(config: GameConfig, a: Dict[str, Any]) -> Strategy:
    n = _need_graph("isolate", config)
    v = _int("isolate", "v", a.get("v", getattr(config.win, "v", 0)))
    r = _int("isolate", "r", a["r"] if "r" in a else _default_r(config))
    return isolation_breaker(v, r, config.breaker_bias, n, audit=bool(a.get("audit", False)))

def _forest_breaker(config: GameConfig, a: Dict[str, Any]) -> Strategy:
    _need_graph("forest", config)
    return ForestBreaker(_pattern(a.get("H", "P3")))


Builder = Callable[[GameConfig, Dict[str, Any]], Strategy]

MAKERS: Dict[str, Tuple[Tuple[str, ...], Builder]] = {
    "random": (("mode",), _random_maker),
    "greedy": (("r",), _greedy_maker),
    "atvertex": (("v", "r"), _atvertex_maker),
    "script": (("file",), _script_maker),
}

BREAKERS: Dict[str, Tuple[Tuple[str, ...], Builder]] = {
    "null": ((), _null_breaker),
    "random": ((), _random_breaker),
    "potential": (("H", "p", "q"), _potential_breaker),
    "dynamicH": (("H", "delta", "t_cluster"), _dynamic_h_breaker),
    "isolate": (("v", "r", "audit"), _isolation_breaker),
    "forest": (("H",), _forest_breaker),
}


def _lookup(spec: str, table: Dict[str, Tuple[Tuple[str, ...], Builder]], side: str) -> Tuple[Builder, Dict[str, Any]]:
    name, args, kwargs = parse_strategy(spec)
    if name not in table:
        raise StrategySpecError(f"Unknown {side} strategy {name!r} (known: {', '.join(sorted(table))}).")
    params, builder = table[name]
    return builder, _take(name, args, kwargs, params)

def check_spec(spec: str, side: str) -> None:
    """Parse a strategy string without building it."""
    if side == "maker":
        name, args, _ = parse_strategy(spec)
        if name == "multiplex":
            if not args:
                raise StrategySpecError("multiplex needs sub-strategies: multiplex(random|greedy(r=3)).")
            for sub in args:
                check_spec(sub, side)
            return
        _lookup(spec, MAKERS, side)
    elif side == "breaker":
        _lookup(spec, BREAKERS, side)
    else:
        raise StrategySpecError(f"Unknown side {side!r}.")

def build_maker(spec: str, config: GameConfig) -> Strategy:
    name, args, _ = parse_strategy(spec)
    if name == "multiplex":
        if not args:
            raise StrategySpecError("multiplex needs sub-strategies: multiplex(random|greedy(r=3)).")
        strategy: Strategy = parallel_multiplex([build_maker(sub, config) for sub in args])
    else:
        builder, params = _lookup(spec, MAKERS, "maker")
        try:
            strategy = builder(config, params)
        except (ConfigError, PreconditionError) as e:
            raise StrategySpecError(f"{spec}: {e}") from e
    strategy.spec = spec.strip()
    return strategy

def build_breaker(spec: str, config: GameConfig) -> Strategy:
    builder, params = _lookup(spec, BREAKERS, "breaker")
    try:
        strategy = builder(config, params)
    except (ConfigError, PreconditionError) as e:
        raise StrategySpecError(f"{spec}: {e}") from e
    strategy.spec = spec.strip()
    _LOG.debug("built breaker %s for %s", strategy.spec, config.win.spec)
    return strategy
