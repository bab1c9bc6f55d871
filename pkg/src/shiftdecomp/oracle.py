"""Brute-force reference for the shifted-shortest-path assignment.

Everything here is deliberately naive (one full BFS per vertex, O(nm)) and
shares no code with the engine beyond the graph container and plain BFS.
Intended for graphs up to a couple of thousand vertices.
"""
from __future__ import annotations

import math

import numpy as np

from .engine import Decomposition
from .graph import Graph, GraphError, bfs_distances
from .shifts import ShiftAssignment

__all__ = ["oracle_assign", "piece_strong_diameter", "midpoint_witness_check", "INF"]

INF = math.inf


def oracle_assign(g: Graph, s: ShiftAssignment) -> Decomposition:
    """Assign each v to ``argmin_u dist(u, v) - shift_u``, ties by smaller tie-break key."""
    if s.n != g.n:
        raise ValueError(f"{s.n} shifts for a graph with {g.n} vertices")
    shift = s.effective_shifts().tolist()
    key = s.tiebreak.tolist()
    best: list[tuple[float, float] | None] = [None] * g.n
    owner = [-1] * g.n
    for u in range(g.n):
        dist = bfs_distances(g, u).tolist()
        for v, d in enumerate(dist):
            if d < 0:
                continue
            cand = (d - shift[u], key[u])
            if best[v] is None or cand < best[v]:
                best[v] = cand
                owner[v] = u
    return Decomposition(np.asarray(owner, dtype=np.int64))


def _induced_bfs(g: Graph, members: set[int], source: int) -> dict[int, int]:
    dist = {source: 0}
    frontier = [source]
    off, nb = g.offsets, g.neighbors
    while frontier:
        nxt = []
        for u in frontier:
            for v in nb[off[u] : off[u + 1]].tolist():
                if v in members and v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def piece_strong_diameter(g: Graph, piece) -> float:
    """Largest intra-piece shortest-path distance; ``INF`` if the piece is disconnected."""
    members = {int(v) for v in piece}
    if not members:
        raise ValueError("empty piece")
    if min(members) < 0 or max(members) >= g.n:
        raise GraphError("piece contains a vertex outside the graph")
    diam = 0
    for u in members:
        dist = _induced_bfs(g, members, u)
        if len(dist) != len(members):
            return INF
        diam = max(diam, max(dist.values()))
    return diam


def midpoint_witness_check(g: Graph, s: ShiftAssignment, d: Decomposition) -> list[tuple]:
    """Cut edges whose owners are not both within 1 of the best shifted distance to the edge midpoint.

    Returns ``(a, b, owner, excess)`` tuples; empty for a genuine assignment.
    Distances to the midpoint are kept doubled (odd integers) so the 1/2 is exact.
    """
    shift = s.effective_shifts()
    owner = d.owner
    src, dst = g.edges()
    cache: dict[int, np.ndarray] = {}

    def dist_from(x: int) -> np.ndarray:
        if x not in cache:
            dd = bfs_distances(g, x).astype(np.float64)
            dd[dd < 0] = np.inf
            cache[x] = dd
        return cache[x]

    bad = []
    for a, b in zip(src.tolist(), dst.tolist()):
        oa, ob = int(owner[a]), int(owner[b])
        if oa == ob:
            continue
        twice = 2 * np.minimum(dist_from(a), dist_from(b)) + 1
        shifted = twice / 2 - shift
        best = shifted.min()
        for o in (oa, ob):
            if not 0 <= o < g.n:
                bad.append((a, b, o, INF))
                continue
            excess = shifted[o] - (best + 1)
            if excess > 1e-9:
                bad.append((a, b, o, float(excess)))
    return bad
