"""Prima facie rule extraction.

For each occurring action atom g, candidate preconditions are built only
from the time points whose successor world contains g, only from the
frequent environmental atoms active at that point, and only up to the
dimension cap.  Each distinct (precondition, consequence) pair is then
evaluated once against the support, prior, and minimum-probability gates.

The prima facie guarantee makes the pruning lossless: a rule with p > rho
and rho > 0 must have a satisfied precondition followed by the consequence
somewhere, so every rule that could pass the gates is generated from some
qualifying time point.  The report carries the counters needed to check
that claim against a bound computed from the per-period candidate counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .model import (
    AptmineError,
    Atom,
    AtomId,
    AtomRegistry,
    Conjunction,
    FrozenRegistryError,
    Thread,
    iter_mask_times,
    low_time_mask,
)
from .stats import (
    NO_OCCURRENCE,
    AptRule,
    RuleStats,
    negative_probability,
    prior,
    rule_probability,
    support,
)


class EmptyConsequenceError(AptmineError):
    """The consequence atom never occurs, so no candidate can qualify."""


@dataclass(frozen=True, slots=True)
class ExtractParams:
    max_dim: int = 3
    supp_lb: int = 3
    min_prob: float = 0.5

    def __post_init__(self) -> None:
        if self.max_dim < 1:
            raise ValueError(f"max_dim must be at least 1, got {self.max_dim}")
        if self.supp_lb < 1:
            raise ValueError(f"supp_lb must be at least 1, got {self.supp_lb}")
        if not 0.0 <= self.min_prob <= 1.0:
            raise ValueError(f"min_prob must lie in [0, 1], got {self.min_prob}")


def subset_count(n: int, max_dim: int) -> int:
    """Number of non-empty subsets of an n-set with at most max_dim elements."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return sum(comb(n, m) for m in range(1, max_dim + 1))


@dataclass(frozen=True, slots=True)
class ExtractionReport:
    """Extracted rules plus the instrumentation counters.

    rules                    (rule, stats) pairs in canonical order
    combinations_explored    distinct (precondition, consequence) pairs evaluated
    active_env_counts        per period: environmental atoms active there
    candidate_atom_counts    per period: frequent environmental atoms active there
    consequence_period_pairs (g, t) pairs with g in the successor world of t
    n_env                    size of the environmental atom set
    """

    rules: tuple[tuple[AptRule, RuleStats], ...]
    combinations_explored: int
    active_env_counts: tuple[int, ...]
    candidate_atom_counts: tuple[int, ...]
    consequence_period_pairs: int
    n_env: int
    params: ExtractParams

    def rule_set(self) -> frozenset[AptRule]:
        return frozenset(rule for rule, _ in self.rules)

    def per_period_bound(self) -> int:
        """Upper bound on combinations_explored from the per-period candidate counts."""
        peak = max(self.candidate_atom_counts, default=0)
        return self.consequence_period_pairs * subset_count(peak, self.params.max_dim)

    def naive_bound(self) -> int:
        """Cost of one consequence under exhaustive enumeration, no pruning."""
        return subset_count(self.n_env, self.params.max_dim)


def frequent_env_atoms(thread: Thread, registry: AtomRegistry, supp_lb: int) -> frozenset[AtomId]:
    """Environmental atoms occurring at least supp_lb times in the thread."""
    if supp_lb < 1:
        raise ValueError(f"supp_lb must be at least 1, got {supp_lb}")
    return frozenset(
        a for a in registry.env_set if thread.time_mask(a).bit_count() >= supp_lb
    )


def candidate_preconditions(
    thread: Thread,
    consequence: AtomId,
    params: ExtractParams,
    frequent: frozenset[AtomId],
) -> set[Conjunction]:
    """Candidate preconditions for one consequence, deduplicated.

    Candidates are the non-empty subsets, up to max_dim atoms, of the
    frequent environmental atoms active at some time point whose successor
    world contains the consequence.  The consequence itself is excluded
    from the pool.
    """
    goal_mask = thread.time_mask(consequence)
    if goal_mask == 0:
        raise EmptyConsequenceError(f"consequence atom {consequence} never occurs in the thread")
    pool = sorted(frequent - {consequence})
    qualifying = (goal_mask >> 1) & low_time_mask(thread.t_max - 1)
    combos: set[tuple[AtomId, ...]] = set()
    seen_active: set[tuple[AtomId, ...]] = set()
    for t in iter_mask_times(qualifying):
        bit = 1 << (t - 1)
        active = tuple(a for a in pool if thread.time_mask(a) & bit)
        if not active or active in seen_active:
            continue
        seen_active.add(active)
        top = min(params.max_dim, len(active))
        for m in range(1, top + 1):
            combos.update(combinations(active, m))
    return {Conjunction(c) for c in combos}


def pf_rule_extract(
    thread: Thread, registry: AtomRegistry, params: ExtractParams
) -> ExtractionReport:
    """Extract every rule passing the support, prior, and min-probability gates.

    Consequences are the occurring action atoms; never-occurring action
    atoms are skipped silently (they can head no rule).  Output order is
    canonical: consequence id, then precondition atoms.
    """
    if not registry.frozen:
        raise FrozenRegistryError("freeze the registry before extraction")
    env = registry.env_set
    frequent = frequent_env_atoms(thread, registry, params.supp_lb)

    active_env_counts = []
    candidate_atom_counts = []
    for t in range(1, thread.t_max + 1):
        world = thread.world(t)
        active_env_counts.append(len(world & env))
        candidate_atom_counts.append(len(world & frequent))

    horizon = low_time_mask(thread.t_max - 1)
    consequences = sorted(a for a in registry.action_set if thread.time_mask(a))
    pairs = sum(((thread.time_mask(g) >> 1) & horizon).bit_count() for g in consequences)

    rules: list[tuple[AptRule, RuleStats]] = []
    explored = 0
    for g in consequences:
        rho = prior(thread, Atom(g))
        for c in sorted(candidate_preconditions(thread, g, params, frequent)):
            explored += 1
            p = rule_probability(thread, c, g)
            if p is NO_OCCURRENCE:
                # Unreachable for generated candidates (each occurs at a
                # qualifying t <= t_max - 1), kept as an honest guard.
                continue
            s = support(thread, c)
            if s >= params.supp_lb and p > rho and p >= params.min_prob:
                rule = AptRule(c, g)
                stats = RuleStats(p, negative_probability(thread, c, g), rho, s)
                rules.append((rule, stats))

    return ExtractionReport(
        rules=tuple(rules),
        combinations_explored=explored,
        active_env_counts=tuple(active_env_counts),
        candidate_atom_counts=tuple(candidate_atom_counts),
        consequence_period_pairs=pairs,
        n_env=len(env),
        params=params,
    )
