"""The four rule statistics, frozen against the worked six-period example."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from aptmine import (
    NO_OCCURRENCE,
    AptRule,
    Atom,
    And,
    Conjunction,
    Not,
    NoOccurrence,
    RuleStats,
    Thread,
    evaluate_rule,
    negative_probability,
    prior,
    rule_probability,
    rule_sort_key,
    support,
)
from aptmine.oracle import (
    exact_negative_probability,
    exact_prior,
    exact_rule_probability,
    exact_support,
)

from conftest import corpora


def test_no_occurrence_is_a_singleton():
    assert NoOccurrence() is NO_OCCURRENCE
    assert repr(NO_OCCURRENCE) == "NO_OCCURRENCE"
    assert NO_OCCURRENCE != 0.0


def test_priors_on_worked_example(t1):
    thread, registry, a, b, g = t1
    assert prior(thread, Atom(a)) == 1 / 3
    assert prior(thread, Atom(b)) == 1 / 2
    assert prior(thread, Atom(g)) == 1 / 3


def test_prior_handles_compound_formulas(t1):
    thread, registry, a, b, g = t1
    assert prior(thread, And(Atom(a), Atom(b))) == 1 / 6
    assert prior(thread, Not(Atom(a))) == 4 / 6


def test_rule_probability_on_worked_example(t1):
    thread, registry, a, b, g = t1
    assert rule_probability(thread, Conjunction([a]), g) == 1 / 2
    assert rule_probability(thread, Conjunction([b]), g) == 2 / 3
    assert rule_probability(thread, Conjunction([a, b]), g) == 1.0
    assert rule_probability(thread, Conjunction([b]), a) == 1 / 3


def test_rule_probability_zero_is_not_the_marker(t1):
    thread, registry, a, b, g = t1
    # g occurs within the horizon but a never follows it: a real zero.
    value = rule_probability(thread, Conjunction([g]), a)
    assert value == 0.0
    assert value is not NO_OCCURRENCE


def test_rule_probability_marker_when_precondition_never_fires(t1):
    thread, registry, a, b, g = t1
    # b and g never co-occur anywhere.
    assert rule_probability(thread, Conjunction([b, g]), a) is NO_OCCURRENCE


def test_final_period_occurrence_counts_for_support_not_probability():
    thread = Thread([set(), set(), {0}])
    only_last = Conjunction([0])
    assert support(thread, only_last) == 1
    assert rule_probability(thread, only_last, 1) is NO_OCCURRENCE


def test_single_period_thread_has_no_rule_evidence():
    thread = Thread([{0, 1}])
    assert rule_probability(thread, Conjunction([0]), 1) is NO_OCCURRENCE
    assert negative_probability(thread, Conjunction([0]), 1) == 1.0  # vacuous at t = 1


def test_negative_probability_on_worked_example(t1):
    thread, registry, a, b, g = t1
    assert negative_probability(thread, Conjunction([b]), g) == 0.0
    assert negative_probability(thread, Conjunction([a]), g) == 1 / 2
    assert negative_probability(thread, Conjunction([a, b]), g) == 1 / 2
    # a at t = 1 has no predecessor world, so it counts as unpreceded.
    assert negative_probability(thread, Conjunction([g]), a) == 1.0
    assert negative_probability(thread, Conjunction([a]), b) == 2 / 3


def test_negative_probability_marker_when_consequence_never_occurs(t1):
    thread, registry, a, b, g = t1
    assert negative_probability(thread, Conjunction([a]), 99) is NO_OCCURRENCE


def test_support_counts_the_full_range(t1):
    thread, registry, a, b, g = t1
    assert support(thread, Conjunction([a])) == 2
    assert support(thread, Conjunction([b])) == 3
    assert support(thread, Conjunction([a, b])) == 1
    assert support(thread, Conjunction([b, g])) == 0


def test_evaluate_rule_bundles_all_four(t1):
    thread, registry, a, b, g = t1
    stats = evaluate_rule(thread, AptRule(Conjunction([b]), g))
    assert stats == RuleStats(p=2 / 3, p_star=0.0, rho=1 / 3, support=3)


def test_rule_rejects_consequence_in_precondition():
    with pytest.raises(ValueError, match="its own precondition"):
        AptRule(Conjunction([1, 2]), 2)


def test_rule_sort_key_orders_by_consequence_then_atoms():
    r1 = AptRule(Conjunction([5]), 1)
    r2 = AptRule(Conjunction([0, 1]), 2)
    r3 = AptRule(Conjunction([0, 3]), 2)
    assert sorted([r3, r2, r1], key=rule_sort_key) == [r1, r2, r3]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(p=1.5, p_star=0.0, rho=0.0, support=0),
        dict(p=0.5, p_star=-0.1, rho=0.0, support=0),
        dict(p=0.5, p_star=0.0, rho=2.0, support=0),
        dict(p=0.5, p_star=0.0, rho=0.0, support=-1),
    ],
)
def test_rule_stats_validation(kwargs):
    with pytest.raises(ValueError):
        RuleStats(**kwargs)


def test_rule_stats_accept_the_marker():
    stats = RuleStats(p=NO_OCCURRENCE, p_star=NO_OCCURRENCE, rho=0.0, support=0)
    assert stats.p is NO_OCCURRENCE


# ------------------------------------------- agreement with the exact oracle


@st.composite
def corpus_and_rule(draw):
    thread, registry = draw(corpora())
    n = len(registry)
    atoms = draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=3))
    consequence = draw(st.integers(0, n - 1))
    return thread, Conjunction(atoms), consequence


@given(corpus_and_rule())
def test_statistics_match_the_fraction_oracle(case):
    """Float results are correctly rounded quotients, so equality is exact."""
    thread, c, g = case
    p = rule_probability(thread, c, g)
    exact_p = exact_rule_probability(thread, c.atoms, g)
    assert (p is NO_OCCURRENCE) == (exact_p is None)
    if exact_p is not None:
        assert p == float(exact_p)

    p_star = negative_probability(thread, c, g)
    exact_ps = exact_negative_probability(thread, c.atoms, g)
    assert (p_star is NO_OCCURRENCE) == (exact_ps is None)
    if exact_ps is not None:
        assert p_star == float(exact_ps)

    assert prior(thread, Atom(g)) == float(exact_prior(thread, Atom(g)))
    assert support(thread, c) == exact_support(thread, c.atoms)


@given(corpus_and_rule())
def test_statistics_stay_in_range(case):
    thread, c, g = case
    for value in (
        rule_probability(thread, c, g),
        negative_probability(thread, c, g),
        prior(thread, Atom(g)),
    ):
        if value is not NO_OCCURRENCE:
            assert 0.0 <= value <= 1.0
    assert 0 <= support(thread, c) <= thread.t_max


@given(corpus_and_rule())
def test_certain_rules_are_always_followed(case):
    thread, c, g = case
    if rule_probability(thread, c, g) == 1.0:
        for t in range(1, thread.t_max):
            if set(c.atoms) <= thread.world(t):
                assert g in thread.world(t + 1)


@given(corpus_and_rule(), st.data())
def test_support_shrinks_under_extension(case, data):
    thread, c, g = case
    extra = data.draw(st.integers(0, 7))
    assert support(thread, Conjunction([*c.atoms, extra])) <= support(thread, c)
