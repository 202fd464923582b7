# A tour of threads, formulas, and the four rule statistics.
#
# We build the six-period worked example by hand, ask a few satisfaction
# questions, and read off each statistic the way the mining engine does.

# %%
from aptmine import (
    Atom,
    AtomRegistry,
    Conjunction,
    Not,
    Or,
    Predicate,
    Thread,
    AptRule,
    evaluate_rule,
    negative_probability,
    prior,
    rule_probability,
    satisfies,
    support,
)

registry = AtomRegistry()
a = registry.intern(Predicate("a", 0))
b = registry.intern(Predicate("b", 0))
g = registry.intern(Predicate("g", 0))
for atom in (a, b, g):
    registry.mark_env(atom)
registry.mark_action(g)
registry.freeze()

# Six worlds, indexed 1..6.  Time 6 is deliberately empty.
thread = Thread([{a, b}, {g}, {b}, {g, a}, {b}, ()])
print(f"t_max = {thread.t_max}")

# %%
# Formula satisfaction is plain recursive evaluation against one world.
print("g holds at t=2:", satisfies(thread, 2, Atom(g)))
print("a or b holds at t=6:", satisfies(thread, 6, Or(Atom(a), Atom(b))))
print("not g holds at t=3:", satisfies(thread, 3, Not(Atom(g))))

# %%
# The prior is the unconditional rate of a formula across all periods.
print("prior of g:", prior(thread, Atom(g)))  # 2 of 6 periods

# The rule probability conditions on the precondition and looks one step
# ahead; the final period has no successor, so it never enters the count.
print("p({a} ~> g):", rule_probability(thread, Conjunction([a]), g))
print("p({a,b} ~> g):", rule_probability(thread, Conjunction([a, b]), g))

# The negative probability asks how often g arrives *without* the
# precondition in the previous period; an occurrence at t=1 counts, since
# nothing precedes it.
print("p*({b}, g):", negative_probability(thread, Conjunction([b]), g))

# Support is the plain occurrence count of the whole precondition.
print("support({a,b}):", support(thread, Conjunction([a, b])))

# %%
# One call bundles all four statistics for a rule.
rule = AptRule(Conjunction([a]), g)
print("evaluate_rule({a} ~> g):", evaluate_rule(thread, rule))
