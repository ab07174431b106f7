"""Deterministic synthetic corpora for end-to-end and acceptance tests.

The planted corpus gives each venue its own author community with mostly
intra-community coauthorships, so venue membership is recoverable from
graph structure alone.
"""

from __future__ import annotations

import random
from xml.sax.saxutils import escape, quoteattr

from collabnet.ingest import PublicationRecord, SeminarRecord


def planted_corpus(
    n_venues: int = 12,
    authors_per_venue: int = 18,
    pubs_per_venue: int = 40,
    start_year: int = 2000,
    n_years: int = 6,
    solo_rate: float = 0.1,
    cross_rate: float = 0.05,
    seed: int = 0,
) -> list[PublicationRecord]:
    rng = random.Random(seed)
    venues = {
        f"conf{v:02d}": [f"author_{v:02d}_{i:02d}" for i in range(authors_per_venue)]
        for v in range(n_venues)
    }
    records = []
    for venue in sorted(venues):
        pool = venues[venue]
        for j in range(pubs_per_venue):
            year = start_year + rng.randrange(n_years)
            if rng.random() < solo_rate:
                authors = [rng.choice(pool)]
            else:
                authors = rng.sample(pool, rng.randint(2, 4))
                if rng.random() < cross_rate:
                    other = rng.choice(sorted(set(venues) - {venue}))
                    authors.append(rng.choice(venues[other]))
            records.append(
                PublicationRecord(
                    pub_key=f"{venue}/p{j:03d}",
                    title=f"Study {venue} {j}",
                    year=year,
                    venue_key=venue,
                    authors=tuple(dict.fromkeys(authors)),
                )
            )
    return records


def planted_seminars(
    records,
    n_seminars: int = 6,
    invitees_per: int = 12,
    attend_rate: float = 0.6,
    seed: int = 1,
) -> list[SeminarRecord]:
    """Seminars drawing invitees mostly from one venue community each,
    with one cross-community seminar per three."""
    rng = random.Random(seed)
    by_venue: dict[str, set[str]] = {}
    years = set()
    for rec in records:
        if rec.venue_key:
            by_venue.setdefault(rec.venue_key, set()).update(rec.authors)
        years.add(rec.year)
    venues = sorted(by_venue)
    all_authors = sorted(set().union(*by_venue.values()))
    mid_year = sorted(years)[len(years) // 2]
    rows = []
    for s in range(n_seminars):
        sid = f"sem{s:02d}"
        if s % 3 == 2:
            pool = all_authors  # cross-cutting seminar
        else:
            pool = sorted(by_venue[venues[s % len(venues)]])
        invitees = rng.sample(pool, min(invitees_per, len(pool)))
        for name in invitees:
            rows.append(
                SeminarRecord(
                    seminar_id=sid,
                    seminar_year=mid_year,
                    invitee_name=name,
                    attended=rng.random() < attend_rate,
                )
            )
    return rows


def records_to_xml(records) -> str:
    parts = ["<dblp>"]
    for rec in records:
        parts.append(f"<article key={quoteattr(rec.pub_key)}>")
        parts.append(f"<title>{escape(rec.title)}</title>")
        for name in rec.authors:
            parts.append(f"<author>{escape(name)}</author>")
        parts.append(f"<year>{rec.year}</year>")
        if rec.venue_key:
            parts.append(f"<booktitle>{escape(rec.venue_key)}</booktitle>")
        parts.append("</article>")
    parts.append("</dblp>")
    return "\n".join(parts)
