"""Causality scoring of extracted rules against their consequence group.

Two rules are related when they share a consequence and their preconditions
jointly fire somewhere with the consequence in the successor world.  Each
related pair contributes a delta p_both - p_notfirst; a rule's eps_avg,
eps_min and eps_frac summarize its deltas over the whole group.  When the
second precondition never occurs without the first, p_notfirst is taken as
0 and the pair is flagged NeverSeparated rather than dropped.

Grouped scoring is vectorized: preconditions become 0/1 rows over the
restricted time range and every pairwise count is an integer-valued matrix
product.  Counts never exceed t_max, far below 2**53, so the float64
arithmetic is exact and the batched path is bit-identical to the scalar
one (causal_scores), which remains the readable reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .model import AptmineError, AtomId, Thread, iter_mask_times, low_time_mask
from .stats import AptRule, RuleStats, evaluate_rule, rule_sort_key

_BLOCK_ROWS = 512  # row-chunk size for the pairwise count products


class UnrelatedRulesError(AptmineError):
    """Pairwise probabilities were requested for rules that are not related."""


@dataclass(frozen=True, slots=True)
class PairProbs:
    """Conditional probabilities of one ordered related pair (r, r2)."""

    p_both: float
    p_notfirst: float
    never_separated: bool = False


@dataclass(frozen=True, slots=True)
class ScoredRule:
    """One rule's aggregate standing within its consequence group.

    The eps fields are None exactly when the rule is related to nothing
    (related_count == 0); such a rule is unscored, not scored zero.
    """

    rule: AptRule
    stats: RuleStats
    eps_avg: float | None
    eps_min: float | None
    eps_frac: float | None
    related_count: int
    never_separated_count: int

    @property
    def is_unscored(self) -> bool:
        return self.related_count == 0


def related(thread: Thread, r: AptRule, r2: AptRule) -> bool:
    """True when r and r2 share a consequence and co-fire before it somewhere."""
    if r == r2:
        raise ValueError("relatedness is defined for distinct rules")
    if r.consequence != r2.consequence:
        return False
    horizon = low_time_mask(thread.t_max - 1)
    both = (
        thread.times_mask(r.precondition.atoms)
        & thread.times_mask(r2.precondition.atoms)
        & horizon
    )
    return bool(both & (thread.time_mask(r.consequence) >> 1))


def pair_probs(thread: Thread, r: AptRule, r2: AptRule) -> PairProbs:
    """p_both and p_notfirst for a related pair; raises if unrelated."""
    if not related(thread, r, r2):
        raise UnrelatedRulesError(f"rules {r} and {r2} are not related on this thread")
    horizon = low_time_mask(thread.t_max - 1)
    first = thread.times_mask(r.precondition.atoms) & horizon
    second = thread.times_mask(r2.precondition.atoms) & horizon
    goal_next = thread.time_mask(r.consequence) >> 1

    both = first & second
    p_both = (both & goal_next).bit_count() / both.bit_count()

    only_second = second & ~first
    denominator = only_second.bit_count()
    if denominator == 0:
        return PairProbs(p_both, 0.0, True)
    p_notfirst = (only_second & goal_next).bit_count() / denominator
    return PairProbs(p_both, p_notfirst, False)


def causal_scores(thread: Thread, r: AptRule, pool: Iterable[AptRule]) -> ScoredRule:
    """Score one rule against a pool it belongs to (scalar reference path)."""
    members = sorted(set(pool), key=rule_sort_key)
    if r not in members:
        raise ValueError("rule must be a member of its comparison pool")
    deltas: list[float] = []
    never_separated = 0
    for r2 in members:
        if r2 == r or r2.consequence != r.consequence:
            continue
        if not related(thread, r, r2):
            continue
        pp = pair_probs(thread, r, r2)
        never_separated += pp.never_separated
        deltas.append(pp.p_both - pp.p_notfirst)
    stats = evaluate_rule(thread, r)
    return _finish(r, stats, deltas, never_separated)


def _finish(
    rule: AptRule, stats: RuleStats, deltas: list[float], never_separated: int
) -> ScoredRule:
    if not deltas:
        return ScoredRule(rule, stats, None, None, None, 0, 0)
    n = len(deltas)
    return ScoredRule(
        rule,
        stats,
        math.fsum(deltas) / n,
        min(deltas),
        sum(1 for d in deltas if d >= 0.0) / n,
        n,
        never_separated,
    )


def _rank_key(sr: ScoredRule):
    # Scored above unscored; then eps_avg, p, support descending; then
    # canonical precondition order.  Total, so rankings are deterministic.
    if sr.is_unscored:
        return (1, 0.0, 0.0, 0, sr.rule.precondition.atoms)
    return (0, -sr.eps_avg, -sr.stats.p, -sr.stats.support, sr.rule.precondition.atoms)


def _score_group(
    thread: Thread, consequence: AtomId, members: list[tuple[AptRule, RuleStats]]
) -> list[ScoredRule]:
    horizon = thread.t_max - 1
    low = low_time_mask(horizon)
    n = len(members)
    if horizon == 0 or n == 1:
        return [_finish(rule, stats, [], 0) for rule, stats in members]

    rows = np.zeros((n, horizon), dtype=np.float64)
    for i, (rule, _) in enumerate(members):
        mask = thread.times_mask(rule.precondition.atoms) & low
        for t in iter_mask_times(mask):
            rows[i, t - 1] = 1.0
    goal_next = np.zeros(horizon, dtype=np.float64)
    for t in iter_mask_times((thread.time_mask(consequence) >> 1) & low):
        goal_next[t - 1] = 1.0

    fired = rows * goal_next            # precondition at t and consequence at t+1
    hits = rows @ goal_next             # per-rule fired counts
    occur = rows.sum(axis=1)            # per-rule restricted supports

    out: list[ScoredRule] = []
    for start in range(0, n, _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, n)
        co_fired = fired[start:stop] @ rows.T   # |{t: c_i, c_j at t, g at t+1}|
        co_occur = rows[start:stop] @ rows.T    # |{t: c_i, c_j at t}|
        for i in range(start, stop):
            fire_row = co_fired[i - start]
            occ_row = co_occur[i - start]
            mask = fire_row >= 0.5
            mask[i] = False
            idx = np.flatnonzero(mask)
            rule, stats = members[i]
            if idx.size == 0:
                out.append(_finish(rule, stats, [], 0))
                continue
            p_both = fire_row[idx] / occ_row[idx]
            only_second = occur[idx] - occ_row[idx]
            sep = only_second >= 0.5
            numer = hits[idx] - fire_row[idx]
            p_notfirst = np.where(sep, numer / np.where(sep, only_second, 1.0), 0.0)
            deltas = p_both - p_notfirst
            out.append(
                _finish(rule, stats, deltas.tolist(), int(np.count_nonzero(~sep)))
            )
    return out


def pf_rule_compare(
    thread: Thread,
    rules: Iterable[tuple[AptRule, RuleStats]],
    k: int | None = None,
) -> Mapping[AtomId, list[ScoredRule]]:
    """Group rules by consequence, score each against its group, rank.

    ``k = None`` means all: each group keeps every member, scored or not,
    in rank order with unscored rules at the bottom.  A positive k keeps
    the top k scored rules per group and drops unscored ones.
    """
    if k is not None and (not isinstance(k, int) or isinstance(k, bool) or k < 1):
        raise ValueError(f"k must be a positive integer or None, got {k!r}")
    groups: dict[AtomId, list[tuple[AptRule, RuleStats]]] = {}
    seen: set[AptRule] = set()
    for rule, stats in rules:
        if rule in seen:
            raise ValueError(f"duplicate rule in comparison input: {rule}")
        seen.add(rule)
        groups.setdefault(rule.consequence, []).append((rule, stats))

    ranked: dict[AtomId, list[ScoredRule]] = {}
    for g in sorted(groups):
        members = sorted(groups[g], key=lambda pair: rule_sort_key(pair[0]))
        scored = sorted(_score_group(thread, g, members), key=_rank_key)
        if k is not None:
            scored = [sr for sr in scored if not sr.is_unscored][:k]
        ranked[g] = scored
    return ranked
