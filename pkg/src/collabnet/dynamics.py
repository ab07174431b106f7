"""Seminar-impact measurement: copublication set algebra, the five
collaboration measures, author cohorts, area-launcher candidate ranking,
and seminar-aligned time-series tracking over the snapshot sequence.

Measures evaluate to None (the undefined marker) where their definition
does not apply; downstream serialization writes these as NA, never as 0.
"""

from __future__ import annotations

import csv
import logging
import random
import statistics
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .clustering import CoverSet, overlap_coefficient
from .graphs import BipartiteAuthorshipGraph, SnapshotSequence
from .ingest import PublicationRecord, SeminarRecord

log = logging.getLogger(__name__)

MEASURES = ("ap", "acp", "aca", "cpr_intra", "cad")

COHORT_LABELS = ("attendees", "absentees", "random_sample", "connected_sample", "all")


@dataclass(frozen=True)
class AuthorCohort:
    """A tracked author group; seminar cohorts carry their seminar year."""

    cohort_id: str
    label: str
    members: frozenset[str]
    anchor_year: int | None = None


@dataclass
class MeasureSeries:
    """One measure tracked for one cohort across the snapshot sequence.

    Years are offsets from the anchor for seminar cohorts and absolute
    window-start years for reference cohorts; None marks an undefined
    value.
    """

    cohort_id: str
    label: str
    measure: str
    points: list[tuple[int, float | None]]


@dataclass
class LauncherScore:
    seminar_id: str
    max_overlap: float
    best_conference: str
    is_candidate: bool


def _present_ids(
    g: BipartiteAuthorshipGraph, authors: Iterable[str], warn: bool = False
) -> list[int]:
    ids = g.author_ids()
    present = set()
    missing = 0
    for name in authors:
        i = ids.get(name)
        if i is None:
            missing += 1
        else:
            present.add(i)
    if missing and warn:
        log.warning("%d group members have no node in this graph", missing)
    return sorted(present)


def _pub_ids(g: BipartiteAuthorshipGraph, author_ids: Sequence[int]) -> set[int]:
    pubs = set()
    for a in author_ids:
        pubs.update(int(p) for p in g.neighbors(a))
    return pubs


def _copub_ids(g: BipartiteAuthorshipGraph, author_ids: Sequence[int]) -> set[int]:
    return {p for p in _pub_ids(g, author_ids) if g.degree(p) >= 2}


def _intra_copub_ids(g: BipartiteAuthorshipGraph, author_ids: Sequence[int]) -> set[int]:
    members = set(author_ids)
    out = set()
    for p in _copub_ids(g, author_ids):
        inside = sum(1 for a in g.neighbors(p) if int(a) in members)
        if inside >= 2:
            out.add(p)
    return out


def _coauthor_ids(g: BipartiteAuthorshipGraph, author_ids: Sequence[int]) -> set[int]:
    out: set[int] = set()
    for a in author_ids:
        for p in g.neighbors(a):
            for b in g.neighbors(int(p)):
                b = int(b)
                if b != a:
                    out.add(b)
    return out


def publication_set(g: BipartiteAuthorshipGraph, authors: Iterable[str]) -> set[str]:
    """Union of the publication sets of the given authors (pub keys)."""
    ids = _present_ids(g, authors, warn=True)
    off = g.author_count
    return {g.pub_keys[p - off] for p in _pub_ids(g, ids)}


def copublication_set(g: BipartiteAuthorshipGraph, authors: Iterable[str]) -> set[str]:
    """Publications of the group written with at least one coauthor."""
    ids = _present_ids(g, authors, warn=True)
    off = g.author_count
    return {g.pub_keys[p - off] for p in _copub_ids(g, ids)}


def intra_copublication_set(
    g: BipartiteAuthorshipGraph, authors: Iterable[str]
) -> set[str]:
    """Publications authored by at least two members of the group."""
    ids = _present_ids(g, authors, warn=True)
    off = g.author_count
    return {g.pub_keys[p - off] for p in _intra_copub_ids(g, ids)}


def coauthor_set(g: BipartiteAuthorshipGraph, authors: Iterable[str]) -> set[str]:
    """Everyone sharing a publication with a member; members themselves
    appear only when they coauthored with another member."""
    ids = _present_ids(g, authors, warn=True)
    return {g.author_names[b] for b in _coauthor_ids(g, ids)}


def _coauthor_pairs_inside(g: BipartiteAuthorshipGraph, author_ids: Sequence[int]) -> int:
    members = set(author_ids)
    pairs: set[tuple[int, int]] = set()
    for a in author_ids:
        for p in g.neighbors(a):
            for b in g.neighbors(int(p)):
                b = int(b)
                if b > a and b in members:
                    pairs.add((a, b))
    return len(pairs)


def measure(
    g: BipartiteAuthorshipGraph, authors: Iterable[str], which: str
) -> float | None:
    """Evaluate one collaboration measure on the members present in `g`.

    ap / acp / aca are per-member publication, copublication, and
    coauthor counts; cpr_intra is the within-group share of
    copublications (None when the group has none); cad is the fraction of
    member pairs that are coauthors (None for fewer than 2 members).
    Returns None when no member is present in the snapshot.
    """
    if which not in MEASURES:
        raise ValueError(f"unknown measure {which!r}")
    ids = _present_ids(g, authors)
    if not ids:
        return None
    if which == "ap":
        return len(_pub_ids(g, ids)) / len(ids)
    if which == "acp":
        return len(_copub_ids(g, ids)) / len(ids)
    if which == "aca":
        return len(_coauthor_ids(g, ids)) / len(ids)
    if which == "cpr_intra":
        copubs = _copub_ids(g, ids)
        if not copubs:
            return None
        return len(_intra_copub_ids(g, ids)) / len(copubs)
    # cad
    k = len(ids)
    if k < 2:
        return None
    slots = k * (k - 1) // 2
    return _coauthor_pairs_inside(g, ids) / slots


def sample_random_cohorts(
    pool: Iterable[str], size: int, count: int, seed: int
) -> list[AuthorCohort]:
    """Uniform author samples without replacement, reproducible per seed."""
    names = sorted(set(pool))
    if size < 1:
        raise ValueError("cohort size must be >= 1")
    if size > len(names):
        raise ValueError(f"cohort size {size} exceeds pool of {len(names)}")
    rng = random.Random(seed)
    return [
        AuthorCohort(
            cohort_id=f"random_sample:{i}",
            label="random_sample",
            members=frozenset(rng.sample(names, size)),
        )
        for i in range(count)
    ]


def sample_connected_cohorts(
    g: BipartiteAuthorshipGraph, size: int, count: int, seed: int
) -> list[AuthorCohort]:
    """Author groups grown by breadth-first search from random start nodes.

    The search runs over the authorship graph and collects only author
    nodes; when a component is exhausted before reaching `size`, it
    restarts from a random not-yet-visited author.
    """
    if size < 1:
        raise ValueError("cohort size must be >= 1")
    if size > g.author_count:
        raise ValueError(f"cohort size {size} exceeds {g.author_count} authors")
    rng = random.Random(seed)
    cohorts = []
    for i in range(count):
        collected: list[int] = []
        seen: set[int] = set()
        while len(collected) < size:
            remaining = [a for a in range(g.author_count) if a not in seen]
            start = rng.choice(remaining)
            queue = deque([start])
            seen.add(start)
            collected.append(start)
            visited_pubs: set[int] = set()
            while queue and len(collected) < size:
                u = queue.popleft()
                for p in g.neighbors(u):
                    p = int(p)
                    if p in visited_pubs:
                        continue
                    visited_pubs.add(p)
                    for b in g.neighbors(p):
                        b = int(b)
                        if b not in seen:
                            seen.add(b)
                            collected.append(b)
                            if len(collected) >= size:
                                break
                            queue.append(b)
                    if len(collected) >= size:
                        break
        cohorts.append(
            AuthorCohort(
                cohort_id=f"connected_sample:{i}",
                label="connected_sample",
                members=frozenset(g.author_names[a] for a in collected[:size]),
            )
        )
    return cohorts


def typical_seminar_size(cohorts: Sequence[AuthorCohort]) -> int:
    """Median attendee-cohort size, rounded to an integer (minimum 1)."""
    sizes = [len(c.members) for c in cohorts if c.label == "attendees"]
    if not sizes:
        raise ValueError("no attendee cohorts to take the median size from")
    return max(1, round(statistics.median(sizes)))


def seminar_cohorts(
    seminars: Sequence[SeminarRecord],
    known_authors: Iterable[str],
    min_absentees: int = 5,
) -> list[AuthorCohort]:
    """Attendee and absentee cohorts per seminar, restricted to invitees
    matched to a known author name. Absentee cohorts below `min_absentees`
    members are dropped (tiny groups make the ratios meaningless);
    attendee cohorts are dropped only when empty."""
    known = set(known_authors)
    by_seminar: dict[str, list[SeminarRecord]] = {}
    for rec in seminars:
        by_seminar.setdefault(rec.seminar_id, []).append(rec)
    cohorts = []
    for sid in sorted(by_seminar):
        recs = by_seminar[sid]
        year = recs[0].seminar_year
        attendees = frozenset(
            r.invitee_name for r in recs if r.attended and r.invitee_name in known
        )
        absentees = frozenset(
            r.invitee_name for r in recs if not r.attended and r.invitee_name in known
        )
        if attendees:
            cohorts.append(
                AuthorCohort(f"attendees:{sid}", "attendees", attendees, year)
            )
        if len(absentees) >= min_absentees:
            cohorts.append(
                AuthorCohort(f"absentees:{sid}", "absentees", absentees, year)
            )
    return cohorts


def classify_area_launchers(
    invitees_by_seminar: Mapping[str, set[str]],
    cover: CoverSet,
    threshold: float = 0.2,
) -> list[LauncherScore]:
    """Rank seminars by how weakly their invitees overlap with every
    conference's author set (ascending max overlap coefficient).

    Seminars under the threshold are flagged as area-launcher candidates;
    the final call stays with a human curator.
    """
    if not cover.sets:
        raise ValueError("cover has no conference sets")
    scores = []
    for sid in sorted(invitees_by_seminar):
        invitees = invitees_by_seminar[sid]
        if not invitees:
            log.warning("seminar %s has no matched invitees; skipped", sid)
            continue
        best_value = -1.0
        best_conf = ""
        for venue in sorted(cover.sets):
            value = overlap_coefficient(invitees, cover.sets[venue])
            if value > best_value:
                best_value = value
                best_conf = venue
        scores.append(
            LauncherScore(
                seminar_id=sid,
                max_overlap=best_value,
                best_conference=best_conf,
                is_candidate=best_value < threshold,
            )
        )
    scores.sort(key=lambda s: (s.max_overlap, s.seminar_id))
    return scores


def track_cohorts(
    seq: SnapshotSequence,
    cohorts: Sequence[AuthorCohort],
    measures: Sequence[str] = MEASURES,
) -> list[MeasureSeries]:
    """Evaluate each measure for each cohort on every snapshot.

    Snapshots are keyed by window-start year, shifted by the cohort's
    anchor year when present. A cohort absent from every snapshot yields
    empty series (with a warning); per-snapshot undefined values are kept
    as None markers.
    """
    for m in measures:
        if m not in MEASURES:
            raise ValueError(f"unknown measure {m!r}")
    out = []
    for cohort in cohorts:
        ever_present = any(
            any(name in snap.graph.author_ids() for name in cohort.members)
            for snap in seq.snapshots
        )
        if not ever_present:
            log.warning(
                "cohort %s has no member in any snapshot; series empty",
                cohort.cohort_id,
            )
        offset = cohort.anchor_year if cohort.anchor_year is not None else 0
        for m in measures:
            points = []
            if ever_present:
                for snap in seq.snapshots:
                    points.append((snap.start - offset, measure(snap.graph, cohort.members, m)))
            out.append(
                MeasureSeries(
                    cohort_id=cohort.cohort_id,
                    label=cohort.label,
                    measure=m,
                    points=points,
                )
            )
    return out


def first_publication_years(
    records: Sequence[PublicationRecord],
) -> dict[str, int]:
    """Earliest publication year per author name."""
    first: dict[str, int] = {}
    for rec in records:
        for name in rec.authors:
            if name not in first or rec.year < first[name]:
                first[name] = rec.year
    return first


def career_stage_split(
    authors: Iterable[str],
    first_years: Mapping[str, int],
    reference_year: int,
    thresholds: tuple[int, int] = (5, 15),
) -> tuple[set[str], set[str], set[str]]:
    """Split authors by career length at `reference_year` into buckets
    [0, t1], (t1, t2], (t2, inf). Authors with no publication history by
    the reference year are excluded with a warning."""
    t1, t2 = thresholds
    if not 0 <= t1 < t2:
        raise ValueError("thresholds must satisfy 0 <= t1 < t2")
    early: set[str] = set()
    mid: set[str] = set()
    late: set[str] = set()
    skipped = 0
    for name in authors:
        year = first_years.get(name)
        if year is None or year > reference_year:
            skipped += 1
            continue
        length = reference_year - year
        if length <= t1:
            early.add(name)
        elif length <= t2:
            mid.add(name)
        else:
            late.add(name)
    if skipped:
        log.warning(
            "%d authors had no publication history by %d and were excluded",
            skipped,
            reference_year,
        )
    return early, mid, late


def emit_boxplot_series(series: Sequence[MeasureSeries], stream) -> int:
    """Write long-format rows for external boxplot rendering.

    Columns: cohort_class, measure, relative_year, cohort_id, value.
    Undefined values become the literal token NA. Returns the number of
    data rows written.
    """
    writer = csv.writer(stream, quoting=csv.QUOTE_MINIMAL)
    writer.writerow(["cohort_class", "measure", "relative_year", "cohort_id", "value"])
    rows = 0
    for s in series:
        for year, value in s.points:
            writer.writerow(
                [s.label, s.measure, year, s.cohort_id, "NA" if value is None else repr(value)]
            )
            rows += 1
    return rows
