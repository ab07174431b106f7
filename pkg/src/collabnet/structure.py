"""Structural statistics: connected components, k-core decomposition,
degree distribution with power-law fit, and sampled average distance.

All functions accept any graph exposing node_count / indptr / indices
(both graph models from collabnet.graphs qualify).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np


@dataclass
class ComponentLabeling:
    """Connected components, relabeled so component 0 is the largest."""

    component_id: np.ndarray
    sizes: list[int]
    giant_fraction: float
    isolated_fraction: float


@dataclass
class CoreDecomposition:
    core_number: np.ndarray


@dataclass
class PowerLawFit:
    gamma: float
    xmin: int


def connected_components(g) -> ComponentLabeling:
    """Label components by BFS; ids are ordered by size (descending),
    ties broken by discovery order."""
    n = g.node_count
    comp = np.full(n, -1, dtype=np.int64)
    sizes: list[int] = []
    indptr, indices = g.indptr, g.indices
    for src in range(n):
        if comp[src] >= 0:
            continue
        label = len(sizes)
        comp[src] = label
        queue = [src]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in indices[indptr[u] : indptr[u + 1]]:
                if comp[v] < 0:
                    comp[v] = label
                    queue.append(int(v))
        sizes.append(len(queue))
    if n == 0:
        return ComponentLabeling(comp, [], 0.0, 0.0)
    order = sorted(range(len(sizes)), key=lambda c: (-sizes[c], c))
    remap = np.empty(len(sizes), dtype=np.int64)
    for new, old in enumerate(order):
        remap[old] = new
    comp = remap[comp]
    sizes_desc = [sizes[c] for c in order]
    isolated = int(np.count_nonzero(np.diff(indptr) == 0))
    return ComponentLabeling(
        component_id=comp,
        sizes=sizes_desc,
        giant_fraction=sizes_desc[0] / n,
        isolated_fraction=isolated / n,
    )


def core_numbers(g) -> CoreDecomposition:
    """Peeling decomposition: repeatedly remove minimum-degree nodes,
    assigning each node the running degree bound when it is removed."""
    n = g.node_count
    if n == 0:
        return CoreDecomposition(np.empty(0, dtype=np.int64))
    indptr, indices = g.indptr, g.indices
    deg = np.diff(indptr).astype(np.int64)
    core = deg.copy()
    max_deg = int(deg.max())
    # bucket sort nodes by degree (Batagelj-Zaversnik layout)
    bin_count = np.bincount(deg, minlength=max_deg + 1)
    bin_start = np.zeros(max_deg + 1, dtype=np.int64)
    np.cumsum(bin_count[:-1], out=bin_start[1:])
    pos = np.empty(n, dtype=np.int64)
    vert = np.empty(n, dtype=np.int64)
    fill = bin_start.copy()
    for v in range(n):
        pos[v] = fill[deg[v]]
        vert[pos[v]] = v
        fill[deg[v]] += 1
    for i in range(n):
        v = vert[i]
        for w in indices[indptr[v] : indptr[v + 1]]:
            w = int(w)
            if core[w] > core[v]:
                dw = core[w]
                pw = pos[w]
                ps = bin_start[dw]
                u = vert[ps]
                if u != w:
                    vert[pw] = u
                    vert[ps] = w
                    pos[w] = ps
                    pos[u] = pw
                bin_start[dw] += 1
                core[w] -= 1
    return CoreDecomposition(core_number=core)


def degree_histogram(g) -> dict[int, int]:
    """Exact degree frequencies, including degree 0."""
    deg = np.diff(g.indptr)
    if deg.size == 0:
        return {}
    counts = np.bincount(deg)
    return {int(k): int(c) for k, c in enumerate(counts) if c > 0}


def fit_power_law(hist: dict[int, int], xmin: int = 1) -> PowerLawFit:
    """Discrete maximum-likelihood exponent for the tail k >= xmin:

        gamma = 1 + n_tail / sum(count(k) * ln(k / (xmin - 0.5)))
    """
    if xmin < 1:
        raise ValueError("xmin must be >= 1")
    tail = {k: c for k, c in hist.items() if k >= xmin and c > 0}
    if len(tail) < 2:
        raise ValueError("power-law fit needs at least 2 distinct tail degrees")
    n_tail = sum(tail.values())
    log_sum = sum(c * math.log(k / (xmin - 0.5)) for k, c in tail.items())
    return PowerLawFit(gamma=1.0 + n_tail / log_sum, xmin=xmin)


def sample_average_distance(g, n_source_samples: int, seed: int) -> float:
    """Mean shortest-path length over all (source, target) pairs reached by
    breadth-first search from sources sampled uniformly from the largest
    component. If the sample budget covers the whole component, every node
    is used as a source."""
    if n_source_samples < 1:
        raise ValueError("need at least one source sample")
    if g.indices.size == 0:
        raise ValueError("average distance is undefined on an edgeless graph")
    comp = connected_components(g)
    giant = [int(v) for v in np.flatnonzero(comp.component_id == 0)]
    if n_source_samples >= len(giant):
        sources = giant
    else:
        sources = random.Random(seed).sample(giant, n_source_samples)
    indptr, indices = g.indptr, g.indices
    total = 0
    pairs = 0
    dist = np.empty(g.node_count, dtype=np.int64)
    for src in sources:
        dist.fill(-1)
        dist[src] = 0
        queue = [src]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            du = dist[u]
            for v in indices[indptr[u] : indptr[u + 1]]:
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue.append(int(v))
        total += int(dist[dist > 0].sum())
        pairs += len(queue) - 1
    if pairs == 0:
        raise ValueError("sampled sources reach no other node")
    return total / pairs
