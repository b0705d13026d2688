"""Weighted potential over the winning sets Breaker has not yet hit.

Every surviving hyperedge H contributes ``(1+mu) ** -|H minus M|`` where
``1+mu = (1+q) ** (1/p)``; hyperedges meeting Breaker's set contribute nothing.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .constants import ARGMAX_REL_TOL, FAMILY_INDEX_CAPACITY, POTENTIAL_REL_TOL
from .exceptions import ConfigError, InvariantViolation, PreconditionError
from .winsets import FamilyIndex, HCopiesFamily, WinningFamily

__all__ = [
    "PotentialState",
    "FValue",
    "AuditReport",
    "ProbeReport",
    "f_value",
    "audit_potentials",
    "potential_monotonicity_audit",
    "potential_inequality_probe",
]

_LOG = logging.getLogger(__name__)


def _check_biases(p: float, q: float) -> None:
    if p < 1 or q < 1:
        raise ConfigError(f"Potential biases need p, q >= 1, got p={p}, q={q}.")


class _Neumaier:
    __slots__ = ("total", "comp")

    def __init__(self, start: float = 0.0):
        self.total = start
        self.comp = 0.0

    def add(self, x: float) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - t) + x
        else:
            self.comp += (x - t) + self.total
        self.total = t

    @property
    def value(self) -> float:
        return self.total + self.comp


class PotentialState:
    def __init__(self, index: FamilyIndex, p: int = 1, q: int = 1):
        _check_biases(p, q)
        self.index = index
        self.p = p
        self.q = q
        self.base = (1.0 + q) ** (1.0 / p)
        self.mu = self.base - 1.0
        sizes = index.sizes
        self.survivors = sizes.astype(np.int64)
        self.alive = np.ones(len(index), dtype=bool)
        self.weights = np.power(self.base, -self.survivors.astype(np.float64))
        self.element_phi = np.zeros(index.universe_size, dtype=np.float64)
        self.alive_count = np.diff(index.incidence_offsets).astype(np.int64)
        np.add.at(self.element_phi, index.members, np.repeat(self.weights, sizes))
        self._total = _Neumaier(math.fsum(self.weights.tolist()))
        self.maker: Set[int] = set()
        self.breaker: Set[int] = set()

    def _members_of(self, hs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        offsets = self.index.offsets
        starts = offsets[hs]
        lens = offsets[hs + 1] - starts
        total = int(lens.sum())
        if total == 0:
            return np.empty(0, dtype=np.int64), lens
        first = np.cumsum(lens) - lens
        pos = np.repeat(starts - first, lens) + np.arange(total)
        return self.index.members[pos], lens

    @property
    def total(self) -> float:
        return self._total.value

    def maker_claim(self, e: int) -> None:
        hs = self.index.containing(e)
        self.maker.add(e)
        if hs.size == 0:
            return
        self.survivors[hs] -= 1
        live = hs[self.alive[hs]]
        if live.size == 0:
            return
        old = self.weights[live]
        new = old * self.base
        self.weights[live] = new
        delta = new - old
        flat, lens = self._members_of(live)
        np.add.at(self.element_phi, flat, np.repeat(delta, lens))
        for d in delta.tolist():
            self._total.add(d)

    def breaker_claim(self, e: int) -> None:
        hs = self.index.containing(e)
        self.breaker.add(e)
        if hs.size == 0:
            return
        live = hs[self.alive[hs]]
        if live.size == 0:
            return
        old = self.weights[live]
        self.alive[live] = False
        self.weights[live] = 0.0
        flat, lens = self._members_of(live)
        np.add.at(self.element_phi, flat, -np.repeat(old, lens))
        np.add.at(self.alive_count, flat, -1)
        for w in old.tolist():
            self._total.add(-w)

    def element_potential(self, e: int) -> float:
        if self.alive_count[e] == 0:
            return 0.0
        return float(self.element_phi[e])

    def exact_element_potential(self, e: int) -> float:
        hs = self.index.containing(e)
        live = hs[self.alive[hs]]
        return math.fsum(self.base ** -float(s) for s in self.survivors[live].tolist())

    def argmax(self, candidates: Sequence[int]) -> int:
        cands = np.asarray(candidates, dtype=np.int64)
        if cands.size == 0:
            raise PreconditionError("argmax over an empty candidate set")
        live = cands[self.alive_count[cands] > 0]
        if live.size == 0:
            return int(cands.min())
        values = self.element_phi[live]
        top = values.max()
        ties = live[values >= top * (1.0 - ARGMAX_REL_TOL)]
        return int(ties.min())

    def full_recompute(self) -> float:
        terms = []
        for h in range(len(self.index)):
            members = self.index.hyperedge(h).tolist()
            if any(x in self.breaker for x in members):
                continue
            left = sum(1 for x in members if x not in self.maker)
            terms.append(self.base ** -float(left))
        return math.fsum(terms)

    def audit(self, rel_tol: float = POTENTIAL_REL_TOL) -> float:
        exact = self.full_recompute()
        if not math.isclose(self.total, exact, rel_tol=rel_tol, abs_tol=1e-300):
            raise InvariantViolation(f"incremental potential {self.total!r} drifted from {exact!r}")
        return exact


@dataclass(frozen=True)
class FValue:
    f: float
    bound: float
    p: int
    q: int

    def to_dict(self) -> dict:
        return {"f": self.f, "bound": self.bound, "p": self.p, "q": self.q}

def f_value(family: WinningFamily, p: int = 1, q: int = 1, capacity: int = FAMILY_INDEX_CAPACITY) -> FValue:
    _check_biases(p, q)
    if isinstance(family, HCopiesFamily):
        count = family.count()
        f = count * (1.0 + q) ** (-family.core.e / p) if count else 0.0
        return FValue(f, (1.0 + q) * f, p, q)
    sizes: Counter = Counter()
    incidences = 0
    if family._index is not None:
        sizes.update(family._index.sizes.tolist())
    else:
        expected = family.exact_incidences()
        if expected is not None and expected > capacity:
            family.index(capacity)
        for h in family:
            incidences += len(h)
            if incidences > capacity:
                family.index(capacity)
            sizes[len(h)] += 1
    f = math.fsum(count * (1.0 + q) ** (-size / p) for size, count in sizes.items())
    return FValue(f, (1.0 + q) * f, p, q)


@dataclass
class AuditReport:
    passed: bool
    rounds_checked: int
    first_violation: Optional[int] = None
    endpoint_ok: bool = True
    phi: List[float] = field(default_factory=list)
    bound: Optional[float] = None

    def summary(self) -> str:
        if self.passed:
            return f"monotone over {self.rounds_checked} rounds"
        if not self.endpoint_ok:
            return f"first-round potential {self.phi[0]!r} exceeds (1+q)f = {self.bound!r}"
        return f"potential increased at round {self.first_violation}"

def audit_potentials(
    series: Sequence[Tuple[int, float]], f: float, q: int, rel_tol: float = POTENTIAL_REL_TOL
) -> AuditReport:
    values = [phi for _, phi in series]
    bound = (1.0 + q) * f
    report = AuditReport(True, len(series), phi=values, bound=bound)
    if values and values[0] > bound * (1.0 + rel_tol) + 1e-300:
        report.passed = False
        report.endpoint_ok = False
    for (_, prev), (round_no, cur) in zip(series, series[1:]):
        if cur > prev * (1.0 + rel_tol) + 1e-300:
            report.passed = False
            report.first_violation = round_no
            break
    return report

def potential_monotonicity_audit(transcript, family: Optional[WinningFamily] = None, rel_tol: float = POTENTIAL_REL_TOL) -> AuditReport:
    """Recompute the potential after every Maker move of a transcript and check it never grows."""
    from .board import Player
    from .engine import FamilyWin

    config = transcript.config
    if family is None:
        if not isinstance(config.win, FamilyWin):
            raise PreconditionError("potential audits need a winning-set family, not a predicate")
        family = config.win.family
    p, q = config.maker_bias, config.breaker_bias
    state = PotentialState(family.index(), p, q)
    series: List[Tuple[int, float]] = []
    moves = transcript.moves
    for i, rec in enumerate(moves):
        if rec.kind == "claim":
            for e in rec.elements:
                if rec.player is Player.MAKER:
                    state.maker_claim(e)
                else:
                    state.breaker_claim(e)
        if rec.player is Player.MAKER:
            series.append((rec.round, state.total))
    report = audit_potentials(series, f_value(family, p, q).f, q, rel_tol)
    if not report.passed:
        _LOG.info("potential audit failed: %s", report.summary())
    return report


@dataclass
class ProbeReport:
    probes: int
    violations: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

def _potential_at(index: FamilyIndex, base: float, maker: Set[int], breaker: Set[int], z: int) -> float:
    terms = []
    for h in index.containing(z).tolist():
        members = index.hyperedge(h).tolist()
        if any(x in breaker for x in members):
            continue
        terms.append(base ** -float(sum(1 for x in members if x not in maker)))
    return math.fsum(terms)

def potential_inequality_probe(
    family: WinningFamily, p: int, q: int, probes: int, rng: np.random.Generator
) -> ProbeReport:
    _check_biases(p, q)
    index = family.index()
    base = (1.0 + q) ** (1.0 / p)
    size = index.universe_size
    report = ProbeReport(probes)
    if size < 2:
        return report
    for probe in range(probes):
        owner = rng.integers(0, 3, size=size)
        z, e = (int(x) for x in rng.choice(size, size=2, replace=False))
        owner[z] = owner[e] = 0
        maker = set(np.flatnonzero(owner == 1).tolist())
        breaker = set(np.flatnonzero(owner == 2).tolist())
        here = _potential_at(index, base, maker, breaker, z)
        after_maker = _potential_at(index, base, maker | {e}, breaker, z)
        after_breaker = _potential_at(index, base, maker, breaker | {e}, z)
        if after_maker > base * here * (1.0 + POTENTIAL_REL_TOL):
            report.violations.append({"probe": probe, "kind": "maker", "z": z, "e": e})
        if after_breaker > here * (1.0 + POTENTIAL_REL_TOL):
            report.violations.append({"probe": probe, "kind": "breaker", "z": z, "e": e})
    return report
