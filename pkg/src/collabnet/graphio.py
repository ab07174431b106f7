"""On-disk formats for intermediate artifacts.

Everything is tabular UTF-8 with a version header where ambiguity is
possible; all writers emit rows in a deterministic order so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
from collections import defaultdict
from pathlib import Path
from typing import Sequence

import numpy as np

from .clustering import Clustering, CoverSet
from .dynamics import AuthorCohort
from .graphs import (
    BipartiteAuthorshipGraph,
    CoauthorshipGraph,
    Snapshot,
    SnapshotSequence,
    _csr_from_pairs,
)
from .ingest import FormatError, PublicationRecord, SeminarRecord

GRAPH_MAGIC = "collabnet-graph"
GRAPH_VERSION = 1


def _clean(token: str) -> str:
    # tabs and newlines are structural in our formats
    return token.replace("\t", " ").replace("\n", " ").replace("\r", " ")


def write_records_tsv(records: Sequence[PublicationRecord], path) -> None:
    """Documented tabular publication format:
    pub_key<TAB>year<TAB>venue_key<TAB>author1|author2|..."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            authors = "|".join(_clean(a) for a in rec.authors)
            fh.write(
                f"{_clean(rec.pub_key)}\t{rec.year}\t{_clean(rec.venue_key)}\t{authors}\n"
            )


def write_seminars_csv(records: Sequence[SeminarRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seminar_id", "year", "invitee", "attended"])
        for rec in records:
            writer.writerow(
                [rec.seminar_id, rec.seminar_year, rec.invitee_name, int(rec.attended)]
            )


def _edge_pairs(indptr: np.ndarray, indices: np.ndarray):
    rows = np.repeat(np.arange(indptr.size - 1), np.diff(indptr))
    half = rows < indices
    return rows[half], indices[half]


def write_graph(g, path) -> None:
    """Serialize either graph model with a version header."""
    bipartite = isinstance(g, BipartiteAuthorshipGraph)
    kind = "bipartite" if bipartite else "simple"
    us, vs = _edge_pairs(g.indptr, g.indices)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{GRAPH_MAGIC} {GRAPH_VERSION} {kind}\n")
        if bipartite:
            fh.write(f"counts {g.author_count} {g.publication_count} {us.size}\n")
        else:
            fh.write(f"counts {g.node_count} {us.size}\n")
        for name in g.author_names:
            fh.write(_clean(name) + "\n")
        if bipartite:
            for key in g.pub_keys:
                fh.write(_clean(key) + "\n")
            # store author->publication pairs with the pub part re-based at 0
            off = g.author_count
            for u, v in zip(us, vs):
                fh.write(f"{u} {v - off}\n")
        else:
            for u, v in zip(us, vs):
                fh.write(f"{u} {v}\n")


def read_graph(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != GRAPH_MAGIC:
            raise FormatError(f"{path}: not a collabnet graph file")
        if int(header[1]) != GRAPH_VERSION:
            raise FormatError(f"{path}: unsupported graph version {header[1]}")
        kind = header[2]
        counts = fh.readline().split()
        if kind == "bipartite":
            if len(counts) != 4 or counts[0] != "counts":
                raise FormatError(f"{path}: bad counts line")
            n_authors, n_pubs, n_edges = (int(x) for x in counts[1:])
            author_names = [fh.readline().rstrip("\n") for _ in range(n_authors)]
            pub_keys = [fh.readline().rstrip("\n") for _ in range(n_pubs)]
            us = np.empty(n_edges, dtype=np.int64)
            vs = np.empty(n_edges, dtype=np.int64)
            for i in range(n_edges):
                a, p = fh.readline().split()
                us[i] = int(a)
                vs[i] = int(p) + n_authors
            indptr, indices = _csr_from_pairs(n_authors + n_pubs, us, vs)
            return BipartiteAuthorshipGraph(
                author_names=author_names,
                pub_keys=pub_keys,
                indptr=indptr,
                indices=indices,
            )
        if kind == "simple":
            if len(counts) != 3 or counts[0] != "counts":
                raise FormatError(f"{path}: bad counts line")
            n_nodes, n_edges = int(counts[1]), int(counts[2])
            author_names = [fh.readline().rstrip("\n") for _ in range(n_nodes)]
            us = np.empty(n_edges, dtype=np.int64)
            vs = np.empty(n_edges, dtype=np.int64)
            for i in range(n_edges):
                a, b = fh.readline().split()
                us[i] = int(a)
                vs[i] = int(b)
            indptr, indices = _csr_from_pairs(n_nodes, us, vs)
            return CoauthorshipGraph(
                author_names=author_names, indptr=indptr, indices=indices
            )
        raise FormatError(f"{path}: unknown graph kind {kind!r}")


def write_snapshots(seq: SnapshotSequence, directory) -> list[str]:
    """Write the snapshot sequence into a directory; returns the file
    names written (relative to the directory)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    windows = []
    written = []
    for i, snap in enumerate(seq.snapshots):
        name = f"snap_{i:04d}_{snap.start}_{snap.end}.graph"
        write_graph(snap.graph, directory / name)
        windows.append({"start": snap.start, "end": snap.end, "file": name})
        written.append(name)
    index = {
        "version": 1,
        "width": seq.width,
        "step": seq.step,
        "windows": windows,
    }
    with open(directory / "sequence.json", "w", encoding="utf-8") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append("sequence.json")
    return written


def read_snapshots(directory) -> SnapshotSequence:
    directory = Path(directory)
    with open(directory / "sequence.json", encoding="utf-8") as fh:
        index = json.load(fh)
    if index.get("version") != 1:
        raise FormatError(f"{directory}: unsupported snapshot index version")
    snapshots = []
    for win in index["windows"]:
        graph = read_graph(directory / win["file"])
        snapshots.append(Snapshot(start=win["start"], end=win["end"], graph=graph))
    return SnapshotSequence(width=index["width"], step=index["step"], snapshots=snapshots)


def write_cover_csv(cover: CoverSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["venue", "author"])
        for venue in sorted(cover.sets):
            for author in sorted(cover.sets[venue]):
                writer.writerow([venue, author])


def read_cover_csv(path) -> CoverSet:
    sets: defaultdict[str, set[str]] = defaultdict(set)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"venue", "author"}.issubset(reader.fieldnames):
            raise FormatError(f"{path}: expected venue,author header")
        for row in reader:
            if row["venue"] and row["author"]:
                sets[row["venue"]].add(row["author"])
    return CoverSet(sets=dict(sets))


def write_clusters_csv(clustering: Clustering, g: BipartiteAuthorshipGraph, path) -> None:
    """Node-to-cluster assignment; author and publication nodes are
    distinguished by the kind column."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "id", "cluster"])
        for v in range(g.author_count):
            writer.writerow(["author", g.author_names[v], int(clustering.assignment[v])])
        for j in range(g.publication_count):
            writer.writerow(
                ["pub", g.pub_keys[j], int(clustering.assignment[g.author_count + j])]
            )


def read_clusters_csv(path) -> tuple[dict[int, set[str]], set[str]]:
    """Returns (author members per cluster, full author universe)."""
    members: defaultdict[int, set[str]] = defaultdict(set)
    authors: set[str] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"kind", "id", "cluster"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise FormatError(f"{path}: expected kind,id,cluster header")
        for row in reader:
            if row["kind"] == "author":
                members[int(row["cluster"])].add(row["id"])
                authors.add(row["id"])
    return dict(members), authors


def write_cohorts_csv(cohorts: Sequence[AuthorCohort], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cohort_id", "label", "anchor_year", "member"])
        for cohort in cohorts:
            anchor = "" if cohort.anchor_year is None else cohort.anchor_year
            for member in sorted(cohort.members):
                writer.writerow([cohort.cohort_id, cohort.label, anchor, member])


def read_cohorts_csv(path) -> list[AuthorCohort]:
    rows: dict[str, dict] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"cohort_id", "label", "anchor_year", "member"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise FormatError(f"{path}: expected cohort_id,label,anchor_year,member header")
        for row in reader:
            entry = rows.setdefault(
                row["cohort_id"],
                {
                    "label": row["label"],
                    "anchor": int(row["anchor_year"]) if row["anchor_year"] else None,
                    "members": set(),
                },
            )
            entry["members"].add(row["member"])
    return [
        AuthorCohort(
            cohort_id=cid,
            label=entry["label"],
            members=frozenset(entry["members"]),
            anchor_year=entry["anchor"],
        )
        for cid, entry in rows.items()
    ]


def write_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
