"""Event ingestion: CSV parsing, period bucketing, theater aggregation,
spike detection, and thread/registry construction.

Parsing and building never drop a row silently: anything unusable lands in
a reject report with its line (or event index) and a reason.  Only a
malformed header is a hard failure.  Built corpora are independent of the
input row order: accepted events are canonically sorted before atoms are
interned, so equal event multisets yield bit-identical threads.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Mapping, NamedTuple

from .model import AptmineError, AtomRegistry, Predicate, Thread
from .spikes import CountSeries, SpikeConfig, spike_atoms

EXPECTED_HEADER = ("date", "predicate", "arg1", "arg2", "actor")
THEATERS = ("Iraq", "Syria")
TOTAL_THEATER = "Total"


class FormatError(AptmineError):
    """A file violated its format contract (hard failure, not a reject)."""


class EmptyCorpusError(AptmineError):
    """No usable events were left to build a corpus from."""


@dataclass(frozen=True, slots=True)
class EventRecord:
    """One incident: what happened, where, when, and by whom."""

    date: dt.date
    predicate: str
    args: tuple[str, ...]
    actor: str | None = None

    @property
    def location(self) -> str | None:
        """Convention: the last argument names the location."""
        return self.args[-1] if self.args else None


@dataclass(frozen=True, slots=True)
class Reject:
    """A row or event that could not be used, and why.

    ``line`` is the CSV line number for parse rejects and the index into
    the event list for build rejects.
    """

    line: int
    reason: str
    detail: str


class SeriesSpec(NamedTuple):
    """One activity predicate and the theaters to aggregate it over."""

    predicate: str
    theaters: tuple[str, ...]


@dataclass(frozen=True)
class CorpusConfig:
    """Everything build_corpus needs beyond the events themselves."""

    epoch: dt.date
    location_map: Mapping[str, str]
    period_days: int = 7
    spike_config: SpikeConfig = SpikeConfig()
    spike_series: tuple[SeriesSpec, ...] | None = None
    spike_theaters: tuple[str, ...] = (*THEATERS, TOTAL_THEATER)
    action_atom_rule: str = "spikes"
    known_predicates: frozenset[str] | None = None

    def __post_init__(self) -> None:
        if self.period_days < 1:
            raise ValueError(f"period_days must be at least 1, got {self.period_days}")
        if self.action_atom_rule != "spikes":
            raise ValueError(
                f"unsupported action_atom_rule {self.action_atom_rule!r}; only 'spikes' exists"
            )
        for theater in self.location_map.values():
            if theater not in THEATERS:
                raise ValueError(f"location map theater must be one of {THEATERS}, got {theater!r}")
        for theater in self.spike_theaters:
            if theater not in (*THEATERS, TOTAL_THEATER):
                raise ValueError(f"unknown theater {theater!r} in spike_theaters")
        if self.spike_series is not None:
            for spec in self.spike_series:
                for theater in spec.theaters:
                    if theater not in (*THEATERS, TOTAL_THEATER):
                        raise ValueError(f"unknown theater {theater!r} for series {spec.predicate!r}")


@dataclass(frozen=True)
class BuiltCorpus:
    """The mined objects plus enough provenance to render reports."""

    thread: Thread
    registry: AtomRegistry
    period_dates: tuple[tuple[dt.date, dt.date], ...]
    count_series: Mapping[tuple[str, str], tuple[int, ...]] = field(default_factory=dict)


_RESERVED_CHARS = set("(),\t\n\r")


def parse_events(
    source: BinaryIO | io.TextIOBase, config: CorpusConfig
) -> tuple[list[EventRecord], list[Reject]]:
    """Read the event CSV: header ``date,predicate,arg1,arg2,actor``.

    Returns the parsed records and the rejects.  Raises FormatError only
    for a missing or malformed header; every bad row becomes a reject.
    """
    if isinstance(source, (io.RawIOBase, io.BufferedIOBase)) or (
        hasattr(source, "mode") and "b" in getattr(source, "mode", "")
    ):
        text = io.TextIOWrapper(source, encoding="utf-8", newline="")
    else:
        text = source
    reader = csv.reader(text)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("event file is empty, expected header date,predicate,arg1,arg2,actor")
    if tuple(h.strip() for h in header) != EXPECTED_HEADER:
        raise FormatError(
            f"bad header {header!r}, expected {','.join(EXPECTED_HEADER)}"
        )

    records: list[EventRecord] = []
    rejects: list[Reject] = []
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(EXPECTED_HEADER):
            rejects.append(Reject(line, "wrong field count", ",".join(row)))
            continue
        raw_date, raw_pred, raw_a1, raw_a2, raw_actor = (cell.strip() for cell in row)
        try:
            date = dt.date.fromisoformat(raw_date)
        except ValueError:
            rejects.append(Reject(line, "unparseable date", raw_date))
            continue
        if not raw_pred:
            rejects.append(Reject(line, "missing predicate", ",".join(row)))
            continue
        if config.known_predicates is not None and raw_pred not in config.known_predicates:
            rejects.append(Reject(line, "unknown predicate", raw_pred))
            continue
        if not raw_a1 and raw_a2:
            rejects.append(Reject(line, "gap in arguments", ",".join(row)))
            continue
        args = tuple(a for a in (raw_a1, raw_a2) if a)
        bad = next(
            (v for v in (raw_pred, *args) if any(ch in _RESERVED_CHARS for ch in v)), None
        )
        if bad is not None:
            rejects.append(Reject(line, "reserved character", bad))
            continue
        records.append(EventRecord(date, raw_pred, args, raw_actor or None))
    return records, rejects


def load_location_map(source: BinaryIO | io.TextIOBase) -> dict[str, str]:
    """Read a ``city,theater`` file; theater must be Iraq or Syria."""
    if isinstance(source, (io.RawIOBase, io.BufferedIOBase)) or (
        hasattr(source, "mode") and "b" in getattr(source, "mode", "")
    ):
        text = io.TextIOWrapper(source, encoding="utf-8", newline="")
    else:
        text = source
    mapping: dict[str, str] = {}
    for line, row in enumerate(csv.reader(text), start=1):
        if not row:
            continue
        if len(row) != 2:
            raise FormatError(f"location map line {line}: expected city,theater, got {row!r}")
        city, theater = (cell.strip() for cell in row)
        if theater not in THEATERS:
            raise FormatError(
                f"location map line {line}: theater must be one of {THEATERS}, got {theater!r}"
            )
        if city in mapping and mapping[city] != theater:
            raise FormatError(f"location map line {line}: conflicting theater for {city!r}")
        mapping[city] = theater
    return mapping


def sigma_label(threshold: float) -> str:
    """Render a threshold as a spike-atom argument, e.g. 2sigma."""
    return f"{threshold:g}sigma"


def _series_specs(
    config: CorpusConfig, observed_predicates: Iterable[str]
) -> tuple[SeriesSpec, ...]:
    if config.spike_series is not None:
        return tuple(sorted(config.spike_series))
    return tuple(
        SeriesSpec(p, config.spike_theaters) for p in sorted(set(observed_predicates))
    )


def build_corpus(
    events: Iterable[EventRecord], config: CorpusConfig
) -> tuple[BuiltCorpus, list[Reject]]:
    """Bucket events into periods, detect spikes, build thread and registry.

    Period index is floor((date - epoch) / period_days) + 1; events dated
    before the epoch are rejected.  Worlds are sets, so repeated identical
    events only influence the count series.  Spike atoms (named
    ``<predicate>Spike(theater, <k>sigma)``) form the action set and are
    also environmental.
    """
    events = list(events)
    if not events:
        raise EmptyCorpusError("no events to build a corpus from")

    rejects: list[Reject] = []
    accepted: list[tuple[int, str | None, int, EventRecord]] = []
    series_predicates = (
        {spec.predicate for spec in config.spike_series}
        if config.spike_series is not None
        else {e.predicate for e in events}
    )
    for index, event in enumerate(events):
        days = (event.date - config.epoch).days
        if days < 0:
            rejects.append(Reject(index, "date before epoch", event.date.isoformat()))
            continue
        period = days // config.period_days + 1
        theater = config.location_map.get(event.location) if event.location else None
        if event.predicate in series_predicates and theater is None:
            rejects.append(
                Reject(index, "unmapped location", event.location or "<no location>")
            )
            continue
        accepted.append((period, theater, index, event))
    if not accepted:
        raise EmptyCorpusError("every event was rejected")

    # Canonical order: interning below must not depend on input row order.
    accepted.sort(key=lambda item: (item[0], item[3].predicate, item[3].args, item[3].actor or ""))
    t_max = max(period for period, _, _, _ in accepted)

    registry = AtomRegistry()
    worlds: list[set[int]] = [set() for _ in range(t_max)]
    raw_counts: dict[tuple[str, str], list[int]] = {}
    observed: set[str] = set()
    for period, theater, index, event in accepted:
        try:
            atom = registry.intern(Predicate(event.predicate, len(event.args)), event.args)
        except (AptmineError, ValueError) as exc:
            # Arity conflicts and reserved characters both land here; rows
            # that came through parse_events can only hit the arity case.
            rejects.append(Reject(index, "uninternable atom", str(exc)))
            continue
        registry.mark_env(atom)
        worlds[period - 1].add(atom)
        observed.add(event.predicate)
        if event.predicate in series_predicates and theater is not None:
            counts = raw_counts.setdefault((event.predicate, theater), [0] * t_max)
            counts[period - 1] += 1

    if not observed:
        raise EmptyCorpusError("every event was rejected")

    count_series: dict[tuple[str, str], tuple[int, ...]] = {}
    zeros = [0] * t_max
    for spec in _series_specs(config, observed):
        for theater in spec.theaters:
            if theater == TOTAL_THEATER:
                parts = [raw_counts.get((spec.predicate, th), zeros) for th in THEATERS]
                counts = tuple(sum(column) for column in zip(*parts))
            else:
                counts = tuple(raw_counts.get((spec.predicate, theater), zeros))
            key = (spec.predicate, theater)
            count_series[key] = counts
            for emission in spike_atoms(CountSeries(key, counts), config.spike_config):
                atom = registry.intern(
                    Predicate(f"{spec.predicate}Spike", 2),
                    (theater, sigma_label(emission.threshold)),
                )
                registry.mark_action(atom)
                registry.mark_env(atom)
                worlds[emission.period - 1].add(atom)

    registry.freeze()
    thread = Thread(worlds)
    period_dates = tuple(
        (
            config.epoch + dt.timedelta(days=i * config.period_days),
            config.epoch + dt.timedelta(days=(i + 1) * config.period_days - 1),
        )
        for i in range(t_max)
    )
    corpus = BuiltCorpus(thread, registry, period_dates, count_series)
    return corpus, rejects
