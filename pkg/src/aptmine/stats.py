"""The four rule statistics: prior, probability, negative probability, support.

Conventions, fixed here and mirrored by the brute-force oracle:

* ``rule_probability`` restricts both numerator and denominator to times
  t <= t_max - 1.  A precondition at the final time point has no successor
  world, so it carries no evidence for or against the rule.
* ``negative_probability`` counts a consequence occurrence at t = 1 toward
  the numerator: no world precedes time 1, so the precondition vacuously
  did not occur before it.
* ``support`` counts over the full range 1..t_max.
* A statistic whose conditioning event never occurs yields NO_OCCURRENCE,
  a distinct marker, never 0.0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import AtomId, Atom, Conjunction, Formula, Thread, low_time_mask, satisfies


class NoOccurrence:
    """Marker for statistics whose conditioning event never occurs."""

    __slots__ = ()
    _singleton = None

    def __new__(cls) -> "NoOccurrence":
        if cls._singleton is None:
            cls._singleton = super().__new__(cls)
        return cls._singleton

    def __repr__(self) -> str:
        return "NO_OCCURRENCE"


NO_OCCURRENCE = NoOccurrence()


@dataclass(frozen=True, slots=True)
class AptRule:
    """precondition ~> consequence, one time step apart.

    The precondition is a conjunction of positive atoms; the consequence is
    a single atom and may not appear in its own precondition.
    """

    precondition: Conjunction
    consequence: AtomId

    def __post_init__(self) -> None:
        if self.consequence in self.precondition:
            raise ValueError(
                f"rule consequence (atom {self.consequence}) may not appear in its own precondition"
            )


def rule_sort_key(rule: AptRule) -> tuple[AtomId, tuple[AtomId, ...]]:
    """Canonical rule order: by consequence, then precondition atoms."""
    return (rule.consequence, rule.precondition.atoms)


@dataclass(frozen=True, slots=True)
class RuleStats:
    """The four statistics of one rule against one thread."""

    p: float | NoOccurrence
    p_star: float | NoOccurrence
    rho: float
    support: int

    def __post_init__(self) -> None:
        for name, value in (("p", self.p), ("p_star", self.p_star), ("rho", self.rho)):
            if isinstance(value, NoOccurrence):
                continue
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        if self.support < 0:
            raise ValueError(f"support must be non-negative, got {self.support!r}")


def prior(thread: Thread, formula: Formula) -> float:
    """Fraction of times 1..t_max at which the formula holds (Eq. rho)."""
    if isinstance(formula, Atom):
        hits = thread.time_mask(formula.atom_id).bit_count()
    else:
        hits = sum(1 for t in range(1, thread.t_max + 1) if satisfies(thread, t, formula))
    return hits / thread.t_max


def rule_probability(
    thread: Thread, precondition: Conjunction, consequence: AtomId
) -> float | NoOccurrence:
    """P(consequence next | precondition now), over t in 1..t_max-1."""
    horizon = thread.t_max - 1
    cond = thread.times_mask(precondition.atoms) & low_time_mask(horizon)
    denominator = cond.bit_count()
    if denominator == 0:
        return NO_OCCURRENCE
    hits = (cond & (thread.time_mask(consequence) >> 1)).bit_count()
    return hits / denominator


def negative_probability(
    thread: Thread, precondition: Conjunction, consequence: AtomId
) -> float | NoOccurrence:
    """Fraction of the consequence's occurrences not preceded by the precondition."""
    goal = thread.time_mask(consequence)
    total = goal.bit_count()
    if total == 0:
        return NO_OCCURRENCE
    preceded = thread.times_mask(precondition.atoms) << 1
    unpreceded = (goal & ~preceded & low_time_mask(thread.t_max)).bit_count()
    return unpreceded / total


def support(thread: Thread, precondition: Conjunction) -> int:
    """Number of times in 1..t_max at which the whole precondition holds."""
    return thread.times_mask(precondition.atoms).bit_count()


def evaluate_rule(thread: Thread, rule: AptRule) -> RuleStats:
    """All four statistics in one bundle."""
    return RuleStats(
        p=rule_probability(thread, rule.precondition, rule.consequence),
        p_star=negative_probability(thread, rule.precondition, rule.consequence),
        rho=prior(thread, Atom(rule.consequence)),
        support=support(thread, rule.precondition),
    )
