"""Brute-force references and synthetic corpora.

Everything here favours directness over speed.  Statistics are recomputed
by scanning world frozensets and counting; probabilities are exact
``Fraction``s; the extraction and comparison references enumerate without
any of the engine's pruning or vectorization.  Tests pit the engine
against these on small instances, so the two code paths must share
nothing but the data types and the counting conventions.

``None`` plays the role of the engine's NO_OCCURRENCE marker here: a
Fraction-valued statistic is absent exactly when the engine reports the
marker.
"""

from __future__ import annotations

import datetime as dt
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .extraction import ExtractParams, subset_count
from .ingestion import BuiltCorpus
from .model import (
    AptmineError,
    And,
    Atom,
    AtomId,
    AtomRegistry,
    Conjunction,
    Formula,
    Not,
    Or,
    Predicate,
    Thread,
)
from .stats import AptRule, rule_sort_key


class OracleGuardError(AptmineError):
    """The brute-force instance size estimate exceeded the guard."""


# ------------------------------------------------------------- T1 fixture


def t1_corpus() -> tuple[Thread, AtomRegistry]:
    """The worked six-period example: atoms a, b, g with g the only action.

    Worlds: {a,b}, {g}, {b}, {g,a}, {b}, {}.
    """
    registry = AtomRegistry()
    a = registry.intern(Predicate("a", 0))
    b = registry.intern(Predicate("b", 0))
    g = registry.intern(Predicate("g", 0))
    for atom in (a, b, g):
        registry.mark_env(atom)
    registry.mark_action(g)
    thread = Thread([{a, b}, {g}, {b}, {g, a}, {b}, ()])
    registry.freeze()
    return thread, registry


# ------------------------------------------------------- exact statistics


def _eval(world: frozenset[AtomId], formula: Formula) -> bool:
    if isinstance(formula, Atom):
        return formula.atom_id in world
    if isinstance(formula, Not):
        return not _eval(world, formula.operand)
    if isinstance(formula, And):
        return _eval(world, formula.left) and _eval(world, formula.right)
    if isinstance(formula, Or):
        return _eval(world, formula.left) or _eval(world, formula.right)
    raise TypeError(f"not a formula node: {formula!r}")


def exact_prior(thread: Thread, formula: Formula) -> Fraction:
    hits = sum(1 for t in range(1, thread.t_max + 1) if _eval(thread.world(t), formula))
    return Fraction(hits, thread.t_max)


def exact_rule_probability(
    thread: Thread, atoms: Iterable[AtomId], consequence: AtomId
) -> Fraction | None:
    atoms = frozenset(atoms)
    numerator = denominator = 0
    for t in range(1, thread.t_max):
        if atoms <= thread.world(t):
            denominator += 1
            if consequence in thread.world(t + 1):
                numerator += 1
    if denominator == 0:
        return None
    return Fraction(numerator, denominator)


def exact_negative_probability(
    thread: Thread, atoms: Iterable[AtomId], consequence: AtomId
) -> Fraction | None:
    atoms = frozenset(atoms)
    unpreceded = total = 0
    for t in range(1, thread.t_max + 1):
        if consequence in thread.world(t):
            total += 1
            if t == 1 or not atoms <= thread.world(t - 1):
                unpreceded += 1
    if total == 0:
        return None
    return Fraction(unpreceded, total)


def exact_support(thread: Thread, atoms: Iterable[AtomId]) -> int:
    atoms = frozenset(atoms)
    return sum(1 for t in range(1, thread.t_max + 1) if atoms <= thread.world(t))


# ------------------------------------------------------ reference mining


@dataclass(frozen=True, slots=True)
class OracleRuleStats:
    p: Fraction
    p_star: Fraction
    rho: Fraction
    support: int


@dataclass(frozen=True)
class OracleExtraction:
    rules: Mapping[AptRule, OracleRuleStats]
    combinations_explored: int


def brute_force_extract(
    thread: Thread,
    registry: AtomRegistry,
    params: ExtractParams,
    pair_guard: int = 1_000_000,
) -> OracleExtraction:
    """Exhaustively evaluate every (subset of frequent env atoms, consequence) pair.

    No per-period pruning: every subset of at most max_dim frequent atoms is
    tried against every occurring consequence.  Refuses instances whose
    candidate-pair estimate exceeds the guard.
    """
    frequent = sorted(
        a for a in registry.env_set if exact_support(thread, [a]) >= params.supp_lb
    )
    consequences = sorted(
        g
        for g in registry.action_set
        if any(g in thread.world(t) for t in range(1, thread.t_max + 1))
    )
    estimate = sum(
        subset_count(len([a for a in frequent if a != g]), params.max_dim)
        for g in consequences
    )
    if estimate > pair_guard:
        raise OracleGuardError(
            f"instance needs {estimate} candidate pairs, guard allows {pair_guard}"
        )

    rules: dict[AptRule, OracleRuleStats] = {}
    explored = 0
    for g in consequences:
        rho = exact_prior(thread, Atom(g))
        pool = [a for a in frequent if a != g]
        for size in range(1, params.max_dim + 1):
            for combo in combinations(pool, size):
                explored += 1
                p = exact_rule_probability(thread, combo, g)
                if p is None:
                    continue
                supp = exact_support(thread, combo)
                if supp >= params.supp_lb and p > rho and p >= params.min_prob:
                    rules[AptRule(Conjunction(combo), g)] = OracleRuleStats(
                        p, exact_negative_probability(thread, combo, g), rho, supp
                    )
    return OracleExtraction(rules, explored)


# -------------------------------------------------- reference comparison


@dataclass(frozen=True, slots=True)
class OracleScore:
    eps_avg: Fraction | None
    eps_min: Fraction | None
    eps_frac: Fraction | None
    related_count: int
    never_separated_count: int


def brute_force_scores(
    thread: Thread, rules: Iterable[AptRule]
) -> dict[AptRule, OracleScore]:
    """Score every rule against every other, filtering by relatedness afterwards."""
    members = sorted(set(rules), key=rule_sort_key)
    out: dict[AptRule, OracleScore] = {}
    for r in members:
        c = frozenset(r.precondition.atoms)
        g = r.consequence
        deltas: list[Fraction] = []
        never_separated = 0
        for r2 in members:
            if r2 == r:
                continue
            if r2.consequence != g:
                continue
            c2 = frozenset(r2.precondition.atoms)
            co_fired = any(
                c <= thread.world(t) and c2 <= thread.world(t) and g in thread.world(t + 1)
                for t in range(1, thread.t_max)
            )
            if not co_fired:
                continue
            p_both = exact_rule_probability(thread, c | c2, g)
            only_numer = only_denom = 0
            for t in range(1, thread.t_max):
                if c2 <= thread.world(t) and not c <= thread.world(t):
                    only_denom += 1
                    if g in thread.world(t + 1):
                        only_numer += 1
            if only_denom == 0:
                never_separated += 1
                deltas.append(p_both)
            else:
                deltas.append(p_both - Fraction(only_numer, only_denom))
        if not deltas:
            out[r] = OracleScore(None, None, None, 0, 0)
            continue
        n = len(deltas)
        out[r] = OracleScore(
            sum(deltas, Fraction(0)) / n,
            min(deltas),
            Fraction(sum(1 for d in deltas if d >= 0), n),
            n,
            never_separated,
        )
    return out


# ------------------------------------------------------ synthetic corpora

_SYNTH_EPOCH = dt.date(2000, 1, 3)


@dataclass(frozen=True, slots=True)
class PlantedRule:
    """A ground-truth rule to embed: co-placed precondition atoms whose
    consequence fires in the next period with the given probability."""

    precondition: tuple[int, ...]
    consequence: str
    fire_prob: float
    placements: int

    def __post_init__(self) -> None:
        if not self.precondition:
            raise ValueError("planted precondition must not be empty")
        if len(set(self.precondition)) != len(self.precondition):
            raise ValueError("planted precondition atoms must be distinct")
        if not 0.0 <= self.fire_prob <= 1.0:
            raise ValueError(f"fire_prob must lie in [0, 1], got {self.fire_prob}")
        if self.placements < 1:
            raise ValueError(f"placements must be positive, got {self.placements}")


@dataclass(frozen=True, slots=True)
class SynthSpec:
    n_env: int
    t_max: int
    planted: tuple[PlantedRule, ...] = ()
    density: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_env < 1:
            raise ValueError(f"n_env must be positive, got {self.n_env}")
        if self.t_max < 2:
            raise ValueError(f"t_max must be at least 2, got {self.t_max}")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must lie in [0, 1], got {self.density}")
        labels = [p.consequence for p in self.planted]
        if len(set(labels)) != len(labels):
            raise ValueError("planted consequences must have distinct labels")
        for plant in self.planted:
            if len(plant.precondition) > self.n_env:
                raise ValueError(
                    f"planted precondition has {len(plant.precondition)} atoms, "
                    f"only {self.n_env} environmental atoms exist"
                )
            if any(not 0 <= i < self.n_env for i in plant.precondition):
                raise ValueError("planted precondition indices out of range")
            if plant.placements > self.t_max - 1:
                raise ValueError(
                    f"cannot place {plant.placements} firings in {self.t_max - 1} slots"
                )


def generate_synthetic(spec: SynthSpec) -> BuiltCorpus:
    """Random background plus planted rules, fully determined by the seed.

    Environmental atoms env(0..n_env-1) get ids 0..n_env-1; each planted
    consequence act(label) follows, marked action and environmental.  The
    consequence's base rate away from firings equals the background
    density.  Placement times are drawn from 1..t_max-1 so every firing
    has a successor world.
    """
    rng = random.Random(spec.seed)
    registry = AtomRegistry()
    env_pred = Predicate("env", 1)
    for i in range(spec.n_env):
        atom = registry.intern(env_pred, (str(i),))
        registry.mark_env(atom)
    act_pred = Predicate("act", 1)
    consequence_ids = []
    for plant in spec.planted:
        atom = registry.intern(act_pred, (plant.consequence,))
        registry.mark_env(atom)
        registry.mark_action(atom)
        consequence_ids.append(atom)

    worlds: list[set[int]] = [set() for _ in range(spec.t_max)]
    for i in range(spec.n_env):
        for t in range(spec.t_max):
            if rng.random() < spec.density:
                worlds[t].add(i)
    for atom in consequence_ids:
        for t in range(spec.t_max):
            if rng.random() < spec.density:
                worlds[t].add(atom)
    for plant, atom in zip(spec.planted, consequence_ids):
        scheduled = sorted(rng.sample(range(1, spec.t_max), plant.placements))
        for t in scheduled:
            worlds[t - 1].update(plant.precondition)
            if rng.random() < plant.fire_prob:
                worlds[t].add(atom)

    registry.freeze()
    thread = Thread(worlds)
    period_dates = tuple(
        (
            _SYNTH_EPOCH + dt.timedelta(days=7 * i),
            _SYNTH_EPOCH + dt.timedelta(days=7 * i + 6),
        )
        for i in range(spec.t_max)
    )
    return BuiltCorpus(thread, registry, period_dates, {})


def sparse_benchmark_corpus(
    seed: int = 2024,
    n_env: int = 980,
    t_max: int = 30,
    weekly_active: int = 93,
    weekly_core: int = 47,
    n_core: int = 200,
    n_act: int = 6,
    act_weeks: int = 7,
) -> tuple[Thread, AtomRegistry]:
    """A corpus shaped like a sparse incident dataset, for efficiency tests.

    Exactly ``weekly_active`` atoms are active each period: ``weekly_core``
    drawn from a pool of ``n_core`` recurring atoms (the first ``n_act`` of
    which double as action atoms with ``act_weeks`` occurrences each), the
    rest filled from one-or-two-shot rare atoms that can never clear a
    support bound of 3.  Deterministic for a fixed seed.
    """
    if weekly_core > n_core or weekly_active > n_env or weekly_core > weekly_active:
        raise ValueError("inconsistent corpus shape")
    n_rare = n_env - n_core
    rare_fill = weekly_active - weekly_core
    if rare_fill * t_max > 2 * n_rare:
        raise ValueError("not enough rare atoms to fill the periods")

    rng = random.Random(seed)
    registry = AtomRegistry()
    env_pred = Predicate("env", 1)
    for i in range(n_env):
        atom = registry.intern(env_pred, (str(i),))
        registry.mark_env(atom)
    for atom in range(n_act):
        registry.mark_action(atom)

    worlds: list[set[int]] = [set() for _ in range(t_max)]
    for atom in range(n_act):
        for week in rng.sample(range(1, t_max + 1), act_weeks):
            worlds[week - 1].add(atom)
    others = list(range(n_act, n_core))
    for week in range(t_max):
        need = weekly_core - len(worlds[week])
        worlds[week].update(rng.sample(others, need))

    uses = list(range(n_core, n_env)) * 2
    rng.shuffle(uses)
    for week in range(t_max):
        placed = 0
        stash: list[int] = []
        while placed < rare_fill:
            atom = uses.pop()
            if atom in worlds[week]:
                stash.append(atom)
                continue
            worlds[week].add(atom)
            placed += 1
        uses.extend(stash)

    registry.freeze()
    return Thread(worlds), registry
