"""Shared graph-construction helpers for the test suite."""

from __future__ import annotations

import random

import numpy as np

from collabnet.graphs import CoauthorshipGraph, _csr_from_pairs
from collabnet.ingest import PublicationRecord


def simple_graph(n: int, edges) -> CoauthorshipGraph:
    """Undirected simple graph over nodes 0..n-1 from an edge list."""
    pairs = sorted({(min(u, v), max(u, v)) for u, v in edges})
    if pairs:
        us = np.array([p[0] for p in pairs], dtype=np.int64)
        vs = np.array([p[1] for p in pairs], dtype=np.int64)
    else:
        us = vs = np.empty(0, dtype=np.int64)
    indptr, indices = _csr_from_pairs(n, us, vs)
    return CoauthorshipGraph([f"v{i}" for i in range(n)], indptr, indices)


def random_simple_graph(rng: random.Random, n: int, p: float) -> CoauthorshipGraph:
    edges = [
        (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p
    ]
    return simple_graph(n, edges)


def records_of(*pubs, start_year: int = 2000) -> list[PublicationRecord]:
    """Records from (key, year, venue, authors) tuples or plain author tuples."""
    out = []
    for i, pub in enumerate(pubs):
        if isinstance(pub, tuple) and pub and isinstance(pub[0], str) and len(pub) == 4:
            key, year, venue, authors = pub
        else:
            key, year, venue, authors = f"p{i}", start_year, "", pub
        out.append(
            PublicationRecord(
                pub_key=key,
                title=f"title {i}",
                year=year,
                venue_key=venue,
                authors=tuple(authors),
            )
        )
    return out


def random_records(
    rng: random.Random,
    n_records: int,
    n_authors: int,
    max_per_pub: int = 4,
    years=(2000,),
) -> list[PublicationRecord]:
    names = [f"a{i}" for i in range(n_authors)]
    out = []
    for i in range(n_records):
        k = rng.randint(1, min(max_per_pub, n_authors))
        authors = tuple(rng.sample(names, k))
        out.append(
            PublicationRecord(
                pub_key=f"p{i}",
                title="",
                year=rng.choice(list(years)),
                venue_key="",
                authors=authors,
            )
        )
    return out
