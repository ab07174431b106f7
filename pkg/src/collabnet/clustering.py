"""Modularity scoring, multilevel greedy clustering with refinement, and
overlap validation against venue-based ground-truth author sets.

The clusterer follows the classic two-phase scheme: seeded node-move
passes until no pass gains more than PASS_EPSILON, then contraction of
clusters into supernodes (keeping aggregated edge weights and
self-loops), repeated until no merge happens. Refinement projects the
coarsest clustering back down the hierarchy, re-running node-move passes
at every level, which can only increase modularity.
"""

from __future__ import annotations

import logging
import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ingest import PublicationRecord

log = logging.getLogger(__name__)

PASS_EPSILON = 1e-9


@dataclass
class Clustering:
    """Disjoint partition of the node set; ids are contiguous from 0."""

    assignment: np.ndarray
    n_clusters: int

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.n_clusters)


@dataclass
class CoverSet:
    """Possibly-overlapping named author sets (one per conference venue)."""

    sets: dict[str, set[str]]


@dataclass
class OverlapMatrix:
    """Cluster-vs-ground-truth overlap values in [0, 1]."""

    values: np.ndarray
    row_labels: list[int]
    col_labels: list[str]
    measure: str


class _LevelGraph:
    """Weighted undirected multigraph view used inside the hierarchy.

    `neighbors[v]` maps each neighbor to the aggregated edge weight;
    self-loops live in `loops` and are counted once in the total weight
    but twice in a node's strength.
    """

    def __init__(self, n: int, neighbors: list[dict[int, float]], loops: np.ndarray):
        self.n = n
        self.neighbors = neighbors
        self.loops = loops
        self.strength = np.array(
            [sum(nbrs.values()) for nbrs in neighbors], dtype=np.float64
        )
        self.strength += 2.0 * loops
        self.total_weight = (
            sum(sum(nbrs.values()) for nbrs in neighbors) / 2.0 + loops.sum()
        )

    @classmethod
    def from_csr(cls, n: int, indptr: np.ndarray, indices: np.ndarray) -> "_LevelGraph":
        neighbors = [
            {int(w): 1.0 for w in indices[indptr[v] : indptr[v + 1]]} for v in range(n)
        ]
        return cls(n, neighbors, np.zeros(n))


@dataclass
class LouvainLevel:
    """One hierarchy level: the graph clustered there and the resulting
    node-to-supernode assignment (contiguous ids)."""

    graph: _LevelGraph
    assignment: np.ndarray


@dataclass
class LouvainHierarchy:
    levels: list[LouvainLevel]
    coarsest: _LevelGraph
    seed: int


def modularity(g, clustering: Clustering) -> float:
    """Intra-cluster edge fraction minus its degree-model expectation:

        sum_C |E(C)|/|E|  -  sum_C (sum_{v in C} deg(v))^2 / (2|E|)^2
    """
    m = g.edge_count
    if m == 0:
        raise ValueError("modularity is undefined on an edgeless graph")
    a = clustering.assignment
    if a.size != g.node_count:
        raise ValueError("clustering does not cover the node set")
    deg = np.diff(g.indptr)
    rows = np.repeat(np.arange(g.node_count), deg)
    half = rows < g.indices  # each undirected edge once
    intra = int(np.count_nonzero(a[rows[half]] == a[g.indices[half]]))
    deg_sums = np.bincount(a, weights=deg, minlength=clustering.n_clusters)
    return intra / m - float(np.sum(deg_sums**2)) / (4.0 * m * m)


def _weighted_modularity(lg: _LevelGraph, assignment: np.ndarray) -> float:
    m = lg.total_weight
    intra = float(lg.loops.sum())
    for v in range(lg.n):
        av = assignment[v]
        for u, w in lg.neighbors[v].items():
            if u > v and assignment[u] == av:
                intra += w
    tot = defaultdict(float)
    for v in range(lg.n):
        tot[int(assignment[v])] += lg.strength[v]
    expectation = sum(t * t for t in tot.values()) / (4.0 * m * m)
    return intra / m - expectation


def _relabel(labels: np.ndarray) -> tuple[np.ndarray, int]:
    """Compact labels to contiguous ids in first-appearance order."""
    mapping: dict[int, int] = {}
    out = np.empty(labels.size, dtype=np.int64)
    for i, raw in enumerate(labels):
        raw = int(raw)
        if raw not in mapping:
            mapping[raw] = len(mapping)
        out[i] = mapping[raw]
    return out, len(mapping)


def _move_passes(lg: _LevelGraph, assign: np.ndarray, rng: random.Random) -> bool:
    """Greedy node moves until a full pass gains less than PASS_EPSILON.

    Candidate targets are the clusters of the node's neighbors plus a
    fresh singleton; a move happens only on a strict gain, equal-gain
    candidates resolve to the lowest cluster id (fresh singletons always
    carry the highest id, so existing clusters win ties). Mutates
    `assign`; returns whether any move was made.
    """
    m = lg.total_weight
    two_m = 2.0 * m
    tot: defaultdict[int, float] = defaultdict(float)
    for v in range(lg.n):
        tot[int(assign[v])] += lg.strength[v]
    next_fresh = int(assign.max()) + 1 if assign.size else 0
    moved_any = False
    while True:
        pass_gain = 0.0
        order = list(range(lg.n))
        rng.shuffle(order)
        for v in order:
            c = int(assign[v])
            s_v = lg.strength[v]
            k_in: defaultdict[int, float] = defaultdict(float)
            for u, w in lg.neighbors[v].items():
                k_in[int(assign[u])] += w
            tot[c] -= s_v
            stay_score = k_in.get(c, 0.0) - tot[c] * s_v / two_m
            best_score = 0.0  # fresh singleton
            best_cluster = next_fresh
            for d in sorted(k_in):
                if d == c:
                    continue
                score = k_in[d] - tot[d] * s_v / two_m
                if score > best_score or (score == best_score and d < best_cluster):
                    best_score = score
                    best_cluster = d
            if best_score > stay_score:
                if best_cluster == next_fresh:
                    next_fresh += 1
                assign[v] = best_cluster
                tot[best_cluster] += s_v
                pass_gain += (best_score - stay_score) / m
                moved_any = True
            else:
                tot[c] += s_v
        if pass_gain < PASS_EPSILON:
            break
    return moved_any


def _contract(lg: _LevelGraph, assignment: np.ndarray, k: int) -> _LevelGraph:
    """Merge clusters into supernodes, aggregating weights and loops."""
    loops = np.zeros(k)
    neighbors: list[dict[int, float]] = [dict() for _ in range(k)]
    for v in range(lg.n):
        cv = int(assignment[v])
        loops[cv] += lg.loops[v]
        for u, w in lg.neighbors[v].items():
            if u < v:
                continue
            cu = int(assignment[u])
            if cu == cv:
                loops[cv] += w
            else:
                neighbors[cv][cu] = neighbors[cv].get(cu, 0.0) + w
                neighbors[cu][cv] = neighbors[cu].get(cv, 0.0) + w
    return _LevelGraph(k, neighbors, loops)


def louvain(g, seed: int) -> tuple[Clustering, LouvainHierarchy]:
    """Multilevel greedy modularity clustering, deterministic per seed.

    Returns the flat clustering induced on the original graph plus the
    level hierarchy for later refinement.
    """
    if g.edge_count == 0:
        raise ValueError("clustering is undefined on an edgeless graph")
    rng = random.Random(seed)
    lg = _LevelGraph.from_csr(g.node_count, g.indptr, g.indices)
    levels: list[LouvainLevel] = []
    while True:
        assign = np.arange(lg.n, dtype=np.int64)
        _move_passes(lg, assign, rng)
        labels, k = _relabel(assign)
        if k == lg.n:
            break
        levels.append(LouvainLevel(graph=lg, assignment=labels))
        lg = _contract(lg, labels, k)
    hierarchy = LouvainHierarchy(levels=levels, coarsest=lg, seed=seed)
    if levels:
        flat = levels[0].assignment.copy()
        for level in levels[1:]:
            flat = level.assignment[flat]
    else:
        flat = np.arange(g.node_count, dtype=np.int64)
    labels, k = _relabel(flat)
    return Clustering(assignment=labels, n_clusters=k), hierarchy


def refine(g, hierarchy: LouvainHierarchy) -> Clustering:
    """Project the coarsest clustering down the hierarchy, re-running
    node-move passes at every level. Never decreases modularity."""
    rng = random.Random(hierarchy.seed + 1)
    labels = np.arange(hierarchy.coarsest.n, dtype=np.int64)
    for level in reversed(hierarchy.levels):
        labels = labels[level.assignment]
        _move_passes(level.graph, labels, rng)
    labels, k = _relabel(labels)
    return Clustering(assignment=labels, n_clusters=k)


def topical_clusters(
    records: Sequence[PublicationRecord], min_authors: int = 10
) -> CoverSet:
    """One author set per venue: everyone with a publication there.

    Venues below `min_authors` distinct authors are dropped. The sets may
    overlap and need not cover all authors.
    """
    venues: defaultdict[str, set[str]] = defaultdict(set)
    for rec in records:
        if rec.venue_key:
            venues[rec.venue_key].update(rec.authors)
    kept = {v: s for v, s in venues.items() if len(s) >= min_authors}
    if not kept:
        log.warning("no venues with at least %d authors; cover is empty", min_authors)
    return CoverSet(sets=kept)


def jaccard(a: set, b: set) -> float:
    """|A n B| / |A u B|; favors exact match of the two sets."""
    union = len(a | b)
    if union == 0:
        raise ValueError("Jaccard index is undefined for two empty sets")
    return len(a & b) / union


def overlap_coefficient(a: set, b: set) -> float:
    """|A n B| / min(|A|, |B|); treats containment as a strong match."""
    if not a or not b:
        raise ValueError("overlap coefficient is undefined for an empty set")
    return len(a & b) / min(len(a), len(b))


_MEASURES = {"jaccard": jaccard, "overlap": overlap_coefficient}


def author_clusters(
    clustering: Clustering, g, top_n: int | None = None
) -> tuple[list[int], list[set[str]]]:
    """Author-name membership of each cluster, publication nodes dropped.

    Returns (cluster ids, author sets) for the `top_n` clusters with the
    most author members (all nonempty clusters when top_n is None), ids
    ordered by descending author count with ties by cluster id.
    """
    members: defaultdict[int, set[str]] = defaultdict(set)
    for v in range(g.author_count):
        members[int(clustering.assignment[v])].add(g.author_names[v])
    ranked = sorted(members, key=lambda c: (-len(members[c]), c))
    if top_n is not None:
        ranked = ranked[:top_n]
    return ranked, [members[c] for c in ranked]


def overlap_matrix(
    rows: Sequence[set[str]],
    cover: CoverSet,
    measure: str,
    row_labels: Sequence[int] | None = None,
) -> OverlapMatrix:
    """Pairwise overlap of cluster rows against ground-truth columns."""
    fn = _MEASURES[measure]
    col_labels = sorted(cover.sets)
    values = np.zeros((len(rows), len(col_labels)))
    for i, row in enumerate(rows):
        for j, venue in enumerate(col_labels):
            values[i, j] = fn(row, cover.sets[venue])
    labels = list(row_labels) if row_labels is not None else list(range(len(rows)))
    return OverlapMatrix(
        values=values, row_labels=labels, col_labels=col_labels, measure=measure
    )


def mean_max_overlap(rows: Sequence[set[str]], cover: CoverSet, measure: str) -> float:
    """Mean over cluster rows of the best overlap with any ground-truth set."""
    rows = [r for r in rows if r]
    if not rows:
        raise ValueError("no nonempty cluster rows to compare")
    if not cover.sets:
        raise ValueError("cover has no ground-truth sets")
    matrix = overlap_matrix(rows, cover, measure)
    return float(matrix.values.max(axis=1).mean())


def random_baseline(
    rows: Sequence[set[str]], top_n: int, pool: Iterable[str], seed: int
) -> list[set[str]]:
    """Random clusters copying the size distribution of the `top_n`
    largest rows: disjoint uniform author sets drawn from the pool."""
    if top_n > len(rows):
        raise ValueError(f"top_n={top_n} exceeds the {len(rows)} available clusters")
    sizes = sorted((len(r) for r in rows), reverse=True)[:top_n]
    pool_sorted = sorted(set(pool))
    needed = sum(sizes)
    if needed > len(pool_sorted):
        raise ValueError(
            f"pool of {len(pool_sorted)} authors cannot fill {needed} random slots"
        )
    drawn = random.Random(seed).sample(pool_sorted, needed)
    out = []
    at = 0
    for size in sizes:
        out.append(set(drawn[at : at + size]))
        at += size
    return out
