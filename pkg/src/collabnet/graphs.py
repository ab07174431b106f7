"""Graph models: bipartite authorship graph, coauthorship projection,
and the yearly snapshot sequence.

Node identifiers are dense integers assigned in first-seen order; name
tables map back to author names and publication keys. Adjacency is CSR
(indptr/indices) with neighbor lists sorted ascending.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .ingest import PublicationRecord


def _csr_from_pairs(n: int, us: np.ndarray, vs: np.ndarray):
    """Build undirected CSR from unique edge pairs (each edge listed once)."""
    src = np.concatenate([us, vs])
    dst = np.concatenate([vs, us])
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst.astype(np.int64)


@dataclass
class BipartiteAuthorshipGraph:
    """Two-part graph linking authors to the publications they wrote.

    Combined node ids: authors occupy [0, author_count), publications
    occupy [author_count, author_count + publication_count).
    """

    author_names: list[str]
    pub_keys: list[str]
    indptr: np.ndarray
    indices: np.ndarray
    _author_ids: dict[str, int] | None = field(default=None, repr=False, compare=False)

    @property
    def author_count(self) -> int:
        return len(self.author_names)

    @property
    def publication_count(self) -> int:
        return len(self.pub_keys)

    @property
    def node_count(self) -> int:
        return len(self.author_names) + len(self.pub_keys)

    @property
    def edge_count(self) -> int:
        return self.indices.size // 2

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def author_ids(self) -> dict[str, int]:
        if self._author_ids is None:
            self._author_ids = {name: i for i, name in enumerate(self.author_names)}
        return self._author_ids


@dataclass
class CoauthorshipGraph:
    """Simple undirected graph over authors; an edge joins coauthors."""

    author_names: list[str]
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def node_count(self) -> int:
        return len(self.author_names)

    @property
    def edge_count(self) -> int:
        return self.indices.size // 2

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)


@dataclass
class Snapshot:
    """One window [start, end] (inclusive on both ends) of the sequence."""

    start: int
    end: int
    graph: BipartiteAuthorshipGraph


@dataclass
class SnapshotSequence:
    """Sliding-window graphs: publications windowed, authors accumulated."""

    width: int
    step: int
    snapshots: list[Snapshot]


def build_authorship_graph(
    records: Sequence[PublicationRecord],
    authors: Sequence[str] | None = None,
) -> BipartiteAuthorshipGraph:
    """Build the bipartite authorship graph from publication records.

    One publication node per record, one author node per distinct author
    name, one edge per authorship. `authors`, when given, fixes the author
    part (ids follow list positions); it must contain every author that
    appears in `records`. This is how snapshot graphs keep accumulated
    authors that have no publication inside the window.
    """
    if authors is None:
        if not records:
            raise ValueError("cannot build a graph from zero records")
        author_names: list[str] = []
        ids: dict[str, int] = {}
        for rec in records:
            for name in rec.authors:
                if name not in ids:
                    ids[name] = len(author_names)
                    author_names.append(name)
    else:
        author_names = list(authors)
        ids = {name: i for i, name in enumerate(author_names)}
        if len(ids) != len(author_names):
            raise ValueError("author list contains duplicates")
    n_authors = len(author_names)
    pub_keys = [rec.pub_key for rec in records]
    us = []
    vs = []
    for j, rec in enumerate(records):
        pub_node = n_authors + j
        for name in dict.fromkeys(rec.authors):  # guard against in-record dupes
            try:
                a = ids[name]
            except KeyError:
                raise ValueError(f"author {name!r} missing from fixed author list")
            us.append(a)
            vs.append(pub_node)
    n = n_authors + len(pub_keys)
    indptr, indices = _csr_from_pairs(
        n, np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)
    )
    return BipartiteAuthorshipGraph(
        author_names=author_names, pub_keys=pub_keys, indptr=indptr, indices=indices
    )


def project_coauthorship(g: BipartiteAuthorshipGraph) -> CoauthorshipGraph:
    """Project the authorship graph onto authors.

    An (unweighted) edge joins two authors iff some publication node is
    adjacent to both. All author nodes are kept, so authors without any
    collaboration remain as isolated nodes.
    """
    n_authors = g.author_count
    edges: set[tuple[int, int]] = set()
    for j in range(g.publication_count):
        coauthors = g.neighbors(n_authors + j)
        k = coauthors.size
        for x in range(k):
            a = int(coauthors[x])
            for y in range(x + 1, k):
                edges.add((a, int(coauthors[y])))
    if edges:
        pairs = np.array(sorted(edges), dtype=np.int64)
        us, vs = pairs[:, 0], pairs[:, 1]
    else:
        us = vs = np.empty(0, dtype=np.int64)
    indptr, indices = _csr_from_pairs(n_authors, us, vs)
    return CoauthorshipGraph(
        author_names=list(g.author_names), indptr=indptr, indices=indices
    )


def build_time_resolved(
    records: Sequence[PublicationRecord], width: int, step: int
) -> SnapshotSequence:
    """Build the sliding-window snapshot sequence.

    Windows are closed intervals [y, y+width] starting at the minimum
    publication year and advancing by `step` while the start does not
    exceed the maximum year. Each snapshot holds exactly the publications
    dated inside its window, while its author part accumulates every
    author with any publication dated at or before the window end
    (retained as degree-0 nodes when inactive).
    """
    if width < 1 or step < 1:
        raise ValueError("window width and step must be >= 1")
    if not records:
        raise ValueError("cannot build snapshots from zero records")
    recs = sorted(records, key=lambda r: r.year)  # stable: keeps input order per year
    years = np.array([r.year for r in recs], dtype=np.int64)
    y_min = int(years[0])
    y_max = int(years[-1])

    # author first-seen order and, per distinct year, how many authors have
    # appeared in records dated <= that year
    author_order: list[str] = []
    seen: set[str] = set()
    year_bounds: list[int] = []
    prefix_counts: list[int] = []
    current_year = None
    for rec in recs:
        if current_year is not None and rec.year != current_year:
            year_bounds.append(current_year)
            prefix_counts.append(len(author_order))
        current_year = rec.year
        for name in rec.authors:
            if name not in seen:
                seen.add(name)
                author_order.append(name)
    year_bounds.append(current_year)
    prefix_counts.append(len(author_order))
    bounds = np.array(year_bounds, dtype=np.int64)

    def authors_through(year: int) -> list[str]:
        pos = int(np.searchsorted(bounds, year, side="right"))
        if pos == 0:
            return []
        return author_order[: prefix_counts[pos - 1]]

    snapshots = []
    for start in range(y_min, y_max + 1, step):
        end = start + width
        lo = int(np.searchsorted(years, start, side="left"))
        hi = int(np.searchsorted(years, end, side="right"))
        window_records = recs[lo:hi]
        graph = build_authorship_graph(window_records, authors=authors_through(end))
        snapshots.append(Snapshot(start=start, end=end, graph=graph))
    return SnapshotSequence(width=width, step=step, snapshots=snapshots)
