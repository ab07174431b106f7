"""Publication and seminar record ingestion.

Parses the two supported publication formats (an XML subset and a
tab-separated format) plus the seminar invitation CSV, normalizes author
names, and aligns seminar invitees with publication authors by exact
name match.
"""

from __future__ import annotations

import csv
import logging
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

log = logging.getLogger(__name__)

YEAR_MIN = 1900
YEAR_MAX = 2100

_RECORD_TAGS = ("article", "inproceedings")


class FormatError(Exception):
    """Input stream does not match the declared format."""


@dataclass(frozen=True)
class PublicationRecord:
    """One publication: key, title, year, optional venue, ordered authors."""

    pub_key: str
    title: str
    year: int
    venue_key: str
    authors: tuple[str, ...]


@dataclass(frozen=True)
class SeminarRecord:
    """One seminar invitation with the attendance outcome."""

    seminar_id: str
    seminar_year: int
    invitee_name: str
    attended: bool


@dataclass
class ParseResult:
    """Well-formed records plus one diagnostic string per skipped record."""

    records: list
    diagnostics: list[str] = field(default_factory=list)


@dataclass
class NameAlignment:
    """Invitee-to-author matching by normalized name."""

    matched: dict[str, str]
    match_fraction: float
    unmatched: list[str]


def normalize_name(raw: str) -> str:
    """Canonical form of a name: NFC, collapsed whitespace, stripped.

    Case is preserved. Idempotent.
    """
    return " ".join(unicodedata.normalize("NFC", raw).split())


def parse_publications(source, fmt: str) -> ParseResult:
    """Parse a publication stream in the given format ("xml" or "tsv").

    Well-formed records are returned in input order; malformed records are
    skipped, each leaving one diagnostic. Raises FormatError if the stream
    is not parseable at all or if more than half of the records are
    malformed (which usually means the wrong format flag).
    """
    if fmt == "xml":
        result = _parse_publications_xml(source)
    elif fmt == "tsv":
        result = _parse_publications_tsv(source)
    else:
        raise ValueError(f"unknown publication format {fmt!r}")
    total = len(result.records) + len(result.diagnostics)
    if total and 2 * len(result.diagnostics) > total:
        raise FormatError(
            f"{len(result.diagnostics)} of {total} records malformed; "
            f"is {fmt!r} the right format?"
        )
    return result


def _element_text(elem, tag: str) -> str | None:
    child = elem.find(tag)
    if child is None:
        return None
    return "".join(child.itertext())


def _publication_from_element(elem, ordinal: int):
    """Extract a record from an <article>/<inproceedings> element.

    Returns (record, None) or (None, diagnostic).
    """
    key = (elem.get("key") or "").strip()
    label = key or f"#{ordinal}"
    if not key:
        return None, f"record {label}: missing key attribute"
    title = _element_text(elem, "title")
    if title is None:
        return None, f"record {label}: missing <title>"
    year_text = _element_text(elem, "year")
    if year_text is None:
        return None, f"record {label}: missing <year>"
    try:
        year = int(year_text.strip())
    except ValueError:
        return None, f"record {label}: unparseable year {year_text.strip()!r}"
    if not YEAR_MIN <= year <= YEAR_MAX:
        return None, f"record {label}: implausible year {year}"
    authors = []
    for a in elem.iter("author"):
        name = normalize_name("".join(a.itertext()))
        if name and name not in authors:
            authors.append(name)
    if not authors:
        return None, f"record {label}: no authors"
    venue = _element_text(elem, "booktitle") or ""
    record = PublicationRecord(
        pub_key=key,
        title=title.strip(),
        year=year,
        venue_key=venue.strip(),
        authors=tuple(authors),
    )
    return record, None


def _parse_publications_xml(source) -> ParseResult:
    result = ParseResult(records=[])
    stream, owned = _open_stream(source, binary=True)
    try:
        root = None
        ordinal = 0
        for event, elem in ET.iterparse(stream, events=("start", "end")):
            if event == "start":
                if root is None:
                    root = elem
                continue
            if elem.tag not in _RECORD_TAGS:
                continue
            ordinal += 1
            record, problem = _publication_from_element(elem, ordinal)
            if record is None:
                result.diagnostics.append(problem)
                log.debug("skipped publication: %s", problem)
            else:
                result.records.append(record)
            # drop processed children so memory stays bounded on large dumps
            if root is not None:
                root.clear()
    except ET.ParseError as exc:
        # a zero-byte stream is an empty dataset, not a malformed one
        if not result.records and not result.diagnostics and exc.position == (1, 0):
            return result
        raise FormatError(f"not well-formed XML: {exc}") from exc
    finally:
        if owned:
            stream.close()
    return result


def _parse_publications_tsv(source) -> ParseResult:
    result = ParseResult(records=[])
    stream, owned = _open_stream(source, binary=False)
    try:
        for lineno, line in enumerate(stream, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                result.diagnostics.append(
                    f"line {lineno}: expected 4 tab-separated fields, got {len(parts)}"
                )
                continue
            key, year_text, venue, author_field = parts
            key = key.strip()
            if not key:
                result.diagnostics.append(f"line {lineno}: empty pub_key")
                continue
            try:
                year = int(year_text.strip())
            except ValueError:
                result.diagnostics.append(
                    f"line {lineno}: unparseable year {year_text.strip()!r}"
                )
                continue
            if not YEAR_MIN <= year <= YEAR_MAX:
                result.diagnostics.append(f"line {lineno}: implausible year {year}")
                continue
            authors = []
            for raw in author_field.split("|"):
                name = normalize_name(raw)
                if name and name not in authors:
                    authors.append(name)
            if not authors:
                result.diagnostics.append(f"line {lineno}: no authors")
                continue
            result.records.append(
                PublicationRecord(
                    pub_key=key,
                    title="",
                    year=year,
                    venue_key=venue.strip(),
                    authors=tuple(authors),
                )
            )
    finally:
        if owned:
            stream.close()
    return result


def parse_seminars(source) -> ParseResult:
    """Parse the seminar CSV (header: seminar_id,year,invitee,attended).

    Invitee names are normalized; duplicate (seminar_id, invitee) pairs
    keep the first occurrence and leave a diagnostic.
    """
    result = ParseResult(records=[])
    stream, owned = _open_stream(source, binary=False)
    try:
        reader = csv.DictReader(stream)
        required = {"seminar_id", "year", "invitee", "attended"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise FormatError(
                f"seminar CSV must have header columns {sorted(required)}, "
                f"got {reader.fieldnames}"
            )
        seen = set()
        for lineno, row in enumerate(reader, start=2):
            sid = (row["seminar_id"] or "").strip()
            invitee = normalize_name(row["invitee"] or "")
            if not sid or not invitee:
                result.diagnostics.append(f"line {lineno}: empty seminar_id or invitee")
                continue
            try:
                year = int((row["year"] or "").strip())
            except ValueError:
                result.diagnostics.append(f"line {lineno}: unparseable year")
                continue
            if not YEAR_MIN <= year <= YEAR_MAX:
                result.diagnostics.append(f"line {lineno}: implausible year {year}")
                continue
            attended_text = (row["attended"] or "").strip()
            if attended_text not in ("0", "1"):
                result.diagnostics.append(
                    f"line {lineno}: attended must be 0 or 1, got {attended_text!r}"
                )
                continue
            if (sid, invitee) in seen:
                result.diagnostics.append(
                    f"line {lineno}: duplicate invitation ({sid}, {invitee})"
                )
                continue
            seen.add((sid, invitee))
            result.records.append(
                SeminarRecord(
                    seminar_id=sid,
                    seminar_year=year,
                    invitee_name=invitee,
                    attended=attended_text == "1",
                )
            )
    finally:
        if owned:
            stream.close()
    return result


def align_names(authors: Iterable[str], invitees: Iterable[str]) -> NameAlignment:
    """Match invitee names against publication-author names.

    Matching is exact on normalized names; no fuzzy rules. The fraction is
    computed over distinct normalized invitee names.
    """
    author_set = {normalize_name(a) for a in authors}
    author_set.discard("")
    invitee_set = {normalize_name(i) for i in invitees}
    invitee_set.discard("")
    if not author_set or not invitee_set:
        raise ValueError("align_names requires nonempty author and invitee sets")
    hits = sorted(invitee_set & author_set)
    matched = {name: name for name in hits}
    unmatched = sorted(invitee_set - author_set)
    return NameAlignment(
        matched=matched,
        match_fraction=len(matched) / len(invitee_set),
        unmatched=unmatched,
    )


def _open_stream(source, binary: bool):
    """Return (stream, owned). Paths are opened; file objects pass through."""
    if isinstance(source, (str, Path)):
        mode = "rb" if binary else "r"
        kwargs = {} if binary else {"encoding": "utf-8", "newline": ""}
        return open(source, mode, **kwargs), True
    return source, False
