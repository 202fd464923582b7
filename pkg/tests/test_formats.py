"""Versioned file formats: round trips are exact, damage is a FormatError."""

import datetime as dt

import pytest

from aptmine import (
    AtomRegistry,
    CorpusConfig,
    EventRecord,
    ExtractParams,
    FormatError,
    Predicate,
    Reject,
    Thread,
    build_corpus,
    load_rules,
    load_scored,
    load_thread,
    pf_rule_compare,
    pf_rule_extract,
    save_rules,
    save_scored,
    save_thread,
)
from aptmine.formats import (
    RULES_MAGIC,
    THREAD_MAGIC,
    format_counts,
    format_rejects,
    format_rules,
    format_thread,
    write_atomic,
)

from conftest import random_corpus, random_params

PARAMS = {"epoch": "2014-06-08", "window": "4"}


def registry_snapshot(registry):
    return (
        [str(registry.atom(a)) for a in registry.ids()],
        registry.action_set,
        registry.env_set,
    )


def spiky_corpus():
    events = [
        EventRecord(dt.date(2014, 6, 8) + dt.timedelta(days=7 * week), "armedAtk",
                    ("ISIS", "Mosul"))
        for week, n in enumerate([1, 3, 1, 3, 8])
        for _ in range(n)
    ]
    corpus, _ = build_corpus(
        events, CorpusConfig(epoch=dt.date(2014, 6, 8), location_map={"Mosul": "Iraq"})
    )
    return corpus


def test_thread_round_trip_is_byte_exact(t1, tmp_path):
    thread, registry, a, b, g = t1
    path = tmp_path / "t1.thread"
    save_thread(path, thread, registry, PARAMS)
    loaded_thread, loaded_registry, params = load_thread(path)
    assert loaded_thread == thread
    assert params == PARAMS
    assert registry_snapshot(loaded_registry) == registry_snapshot(registry)
    assert loaded_registry.frozen
    assert format_thread(loaded_thread, loaded_registry, params) == path.read_text()


def test_thread_round_trip_with_spike_atoms(tmp_path):
    corpus = spiky_corpus()
    path = tmp_path / "spiky.thread"
    save_thread(path, corpus.thread, corpus.registry, PARAMS)
    loaded_thread, loaded_registry, _ = load_thread(path)
    assert loaded_thread == corpus.thread
    assert registry_snapshot(loaded_registry) == registry_snapshot(corpus.registry)


def test_thread_refuses_half_marked_registries(t1):
    thread = t1[0]
    registry = AtomRegistry()
    for name in ("a", "b", "g"):
        registry.intern(Predicate(name, 0))
    registry.mark_env(0)
    registry.mark_env(1)
    registry.mark_action(2)  # action but not environmental
    with pytest.raises(ValueError, match="not environmental"):
        format_thread(thread, registry, PARAMS)
    registry2 = AtomRegistry()
    registry2.intern(Predicate("a", 0))  # not marked at all
    with pytest.raises(ValueError, match="must be environmental"):
        format_thread(Thread([{0}]), registry2, PARAMS)


def tampered(tmp_path, t1, mutate):
    thread, registry, *_ = t1
    path = tmp_path / "bad.thread"
    save_thread(path, thread, registry, PARAMS)
    lines = path.read_text().splitlines()
    mutate(lines)
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda lines: lines.__setitem__(0, "aptmine-thread v999"), "expected first line"),
        (lambda lines: lines.__setitem__(1, "no params here"), "params"),
        (lambda lines: lines.__setitem__(2, "atoms\tmany"), "malformed section header"),
        (lambda lines: lines.pop(3), "atom ids must be dense"),
        (lambda lines: lines.__setitem__(3, "0\ta\t7"), "flag must be 0 or 1"),
        (lambda lines: lines.__setitem__(3, "5\ta\t0"), "dense and ascending"),
        (lambda lines: lines.__setitem__(7, "0 99"), "unknown atom id"),
        (lambda lines: lines.pop(), "period lines"),
        (lambda lines: lines.append("2"), "period lines"),
    ],
)
def test_damaged_thread_files_raise(tmp_path, t1, mutate, message):
    path = tampered(tmp_path, t1, mutate)
    with pytest.raises(FormatError, match=message):
        load_thread(path)


def test_rules_round_trip_exactly(tmp_path):
    thread, registry = random_corpus(9)
    report = pf_rule_extract(thread, registry, random_params(9))
    assert report.rules, "corpus should yield rules for the round trip to mean anything"
    path = tmp_path / "rules.rules"
    save_rules(path, report.rules, registry, {"max_dim": "3"})
    loaded, params = load_rules(path, registry)
    assert tuple(loaded) == report.rules  # repr() floats parse back bit-identical
    assert params == {"max_dim": "3"}


def test_rules_against_the_wrong_registry(tmp_path, t1):
    thread, registry, a, b, g = t1
    report = pf_rule_extract(thread, registry, ExtractParams(max_dim=2, supp_lb=1))
    path = tmp_path / "rules.rules"
    save_rules(path, report.rules, registry, {})
    stranger = AtomRegistry()
    stranger.mark_env(stranger.intern(Predicate("other", 0)))
    stranger.freeze()
    with pytest.raises(FormatError, match="unknown atom"):
        load_rules(path, stranger)


def test_rules_dimension_mismatch(tmp_path, t1):
    thread, registry, *_ = t1
    report = pf_rule_extract(thread, registry, ExtractParams(max_dim=2, supp_lb=1))
    path = tmp_path / "rules.rules"
    save_rules(path, report.rules, registry, {})
    lines = path.read_text().splitlines()
    fields = lines[2].split("\t")
    fields[5] = "2"  # claim two atoms, list one
    lines[2] = "\t".join(fields[:7])
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(FormatError, match="dimension"):
        load_rules(path, registry)


def test_rules_magic_is_checked(tmp_path):
    path = tmp_path / "x.rules"
    path.write_text(THREAD_MAGIC + "\nparams\n")
    with pytest.raises(FormatError, match=RULES_MAGIC):
        load_rules(path, AtomRegistry())


def test_scored_round_trip_keeps_every_field(tmp_path):
    thread, registry = random_corpus(21)
    report = pf_rule_extract(thread, registry, ExtractParams(max_dim=2, supp_lb=1, min_prob=0.25))
    ranked = pf_rule_compare(thread, report.rules)
    path = tmp_path / "scored.scored"
    save_scored(path, ranked, registry, {"k": "all"})
    records, params = load_scored(path)
    assert params == {"k": "all"}

    flat = [sr for g in sorted(ranked) for sr in ranked[g]]
    assert len(records) == len(flat)
    for record, sr in zip(records, flat):
        assert record.consequence == registry.render(sr.rule.consequence)
        assert record.precondition == tuple(
            registry.render(a) for a in sr.rule.precondition.atoms
        )
        assert record.eps_avg == sr.eps_avg
        assert record.eps_min == sr.eps_min
        assert record.eps_frac == sr.eps_frac
        assert record.related_count == sr.related_count
        assert record.never_separated_count == sr.never_separated_count
        assert record.p == sr.stats.p
        assert record.p_star == sr.stats.p_star
        assert record.rho == sr.stats.rho
        assert record.support == sr.stats.support


def test_scored_round_trip_includes_unscored_na(tmp_path, t1):
    thread, registry, a, b, g = t1
    report = pf_rule_extract(thread, registry, ExtractParams())
    ranked = pf_rule_compare(thread, report.rules)  # single rule: unscored
    path = tmp_path / "na.scored"
    save_scored(path, ranked, registry, {})
    records, _ = load_scored(path)
    assert len(records) == 1
    assert records[0].eps_avg is None
    assert records[0].related_count == 0
    assert "na\tna\tna" in path.read_text()


def test_counts_and_rejects_formats():
    counts = {("armedAtk", "Iraq"): (1, 3, 1), ("armedAtk", "Total"): (1, 3, 1)}
    text = format_counts(counts, {"window": "4"})
    assert text.splitlines() == [
        "aptmine-counts v1",
        "params\twindow=4",
        "armedAtk\tIraq\t1 3 1",
        "armedAtk\tTotal\t1 3 1",
    ]

    rejects = [Reject(7, "unparseable date", "June\t8th\nish")]
    text = format_rejects(rejects, {})
    assert text.splitlines() == [
        "aptmine-rejects v1",
        "params",
        "7\tunparseable date\tJune 8th ish",
    ]


def test_write_atomic_leaves_no_temp_files(tmp_path):
    target = tmp_path / "out.txt"
    write_atomic(target, "first\n")
    write_atomic(target, "second\n")
    assert target.read_text() == "second\n"
    assert list(tmp_path.iterdir()) == [target]
