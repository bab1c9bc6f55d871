"""Delayed-start, level-synchronous BFS that assigns every vertex to the
center minimizing its shifted distance.

Vertex u enters the search at round ``floor(delta_max - delta[u])`` if nothing
has claimed it yet.  A vertex claimed in round R offers its center to its
unvisited neighbors in round R + 1.  Competing offers for one vertex within a
round are resolved by a min-reduction on the center's tie-break key, so the
result never depends on how a round's frontier is split up.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .graph import Graph
from .shifts import TIEBREAK_MODES, ShiftAssignment, TieBreak, rng_for, sample_shifts

__all__ = [
    "Decomposition",
    "RunConfig",
    "RunReport",
    "partition_once",
    "partition",
    "block_decomposition",
    "surviving_cut_counts",
    "cut_mask",
]

# frontiers smaller than this are expanded on the calling thread
PARALLEL_MIN_FRONTIER = 1024


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Per-vertex owner (center id).

    ``parent`` is the BFS predecessor that delivered the winning claim
    (-1 for centers); ``hops`` is the hop distance to the center.  Both are
    None for decompositions that did not come from the engine.
    """

    owner: np.ndarray
    parent: np.ndarray | None = None
    hops: np.ndarray | None = None
    _pieces: dict | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.owner)

    @property
    def centers(self) -> np.ndarray:
        v = np.arange(self.n)
        return v[self.owner == v]

    @property
    def pieces(self) -> dict[int, np.ndarray]:
        """center -> sorted member array."""
        if self._pieces is None:
            order = np.argsort(self.owner, kind="stable")
            keys, starts = np.unique(self.owner[order], return_index=True)
            groups = np.split(order, starts[1:])
            object.__setattr__(
                self, "_pieces", {int(k): g for k, g in zip(keys.tolist(), groups)}
            )
        return self._pieces

    def labels_text(self) -> str:
        return "".join(f"{v} {c}\n" for v, c in enumerate(self.owner.tolist()))


@dataclass(frozen=True)
class RunConfig:
    beta: float
    seed: int = 0
    tiebreak: TieBreak = "fractional"
    max_retries: int = 10
    diam_threshold: float | None = None  # default 4 ln(n) / beta
    cut_threshold: float | None = None  # default 2 beta m

    def __post_init__(self):
        if not 0 < self.beta <= 0.5:
            raise ValueError(f"beta must lie in (0, 1/2], got {self.beta}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.tiebreak not in TIEBREAK_MODES:
            raise ValueError(f"unknown tie-break mode {self.tiebreak!r}")
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")
        for name in ("diam_threshold", "cut_threshold"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ValueError(f"{name} must be positive, got {val}")

    def thresholds(self, g: Graph) -> tuple[float, float]:
        """``(diam_threshold, cut_threshold)`` resolved for ``g``."""
        diam = self.diam_threshold
        if diam is None:
            diam = 4.0 * math.log(g.n) / self.beta
        cut = self.cut_threshold
        if cut is None:
            cut = 2.0 * self.beta * g.m
        return diam, cut


@dataclass(frozen=True)
class RunReport:
    n: int
    m: int
    retries: int
    levels: int
    edge_touches: int
    cut_edges: int
    max_piece_radius: int
    delta_max: float
    pieces: int
    beta: float | None = None
    seed: int | None = None
    thresholds_met: bool | None = None
    diam_threshold: float | None = None
    cut_threshold: float | None = None

    @property
    def cut_fraction(self) -> float:
        return self.cut_edges / self.m if self.m else 0.0

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "beta": self.beta,
            "seed": self.seed,
            "retries": self.retries,
            "cut_edges": self.cut_edges,
            "cut_fraction": self.cut_fraction,
            "delta_max": self.delta_max,
            "max_piece_radius": self.max_piece_radius,
            "levels": self.levels,
            "edge_touches": self.edge_touches,
            "pieces": self.pieces,
            "thresholds_met": self.thresholds_met,
            "diam_threshold": self.diam_threshold,
            "cut_threshold": self.cut_threshold,
        }


def cut_mask(g: Graph, owner: np.ndarray) -> np.ndarray:
    """Boolean mask over ``g.edges()`` marking edges whose endpoints differ in owner."""
    src, dst = g.edges()
    return owner[src] != owner[dst]


def _expand(g: Graph, frontier: np.ndarray, owner: np.ndarray, key: np.ndarray):
    """Offers from ``frontier`` to its unvisited neighbors: (target, via, key, center, touched)."""
    starts = g.offsets[frontier]
    counts = g.offsets[frontier + 1] - starts
    total = int(counts.sum())
    via = np.repeat(frontier, counts)
    base = np.repeat(starts - (np.cumsum(counts) - counts), counts)
    tgt = g.neighbors[base + np.arange(total)]
    free = owner[tgt] < 0
    tgt, via = tgt[free], via[free]
    center = owner[via]
    return tgt, via, key[center], center, total


def partition_once(
    g: Graph, s: ShiftAssignment, threads: int | None = None
) -> tuple[Decomposition, RunReport]:
    n = g.n
    if s.n != n:
        raise ValueError(f"{s.n} shifts for a graph with {n} vertices")
    threads = (os.cpu_count() or 1) if threads is None else max(1, int(threads))

    level = s.start_levels()
    key = s.tiebreak.astype(np.float64)

    # sources grouped by start round
    by_level = np.argsort(level, kind="stable")
    src_rounds, src_starts = np.unique(level[by_level], return_index=True)
    src_groups = np.split(by_level, src_starts[1:])

    owner = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    hops = np.full(n, -1, dtype=np.int64)
    slot = np.full(n, np.inf)  # per-vertex claim slot: best key offered this round
    slot_via = np.full(n, n, dtype=np.int64)

    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    frontier = np.empty(0, dtype=np.int64)
    remaining = n
    touches = 0
    rnd = 0
    last_round = -1
    gi = 0
    empty = np.empty(0, dtype=np.int64)
    try:
        while remaining:
            if not len(frontier):
                # nothing propagating: jump to the next round that releases a source
                while gi < len(src_rounds) and not np.any(owner[src_groups[gi]] < 0):
                    gi += 1
                rnd = max(rnd, int(src_rounds[gi]))

            parts = []
            if len(frontier):
                if pool is not None and len(frontier) >= PARALLEL_MIN_FRONTIER:
                    chunks = np.array_split(frontier, threads)
                    parts = list(pool.map(lambda f: _expand(g, f, owner, key), chunks))
                else:
                    parts = [_expand(g, frontier, owner, key)]
                touches += sum(p[4] for p in parts)

            while gi < len(src_rounds) and src_rounds[gi] < rnd:
                gi += 1  # every vertex of a passed round is already claimed
            if gi < len(src_rounds) and src_rounds[gi] == rnd:
                srcs = src_groups[gi]
                srcs = srcs[owner[srcs] < 0]
                touches += len(srcs)
                parts.append((srcs, np.full(len(srcs), -1, dtype=np.int64), key[srcs], srcs, 0))
                gi += 1

            tgt = np.concatenate([p[0] for p in parts]) if parts else empty
            via = np.concatenate([p[1] for p in parts]) if parts else empty
            ckey = np.concatenate([p[2] for p in parts]) if parts else np.empty(0)
            cen = np.concatenate([p[3] for p in parts]) if parts else empty

            # min-reduction over offers; keys are distinct per center
            np.minimum.at(slot, tgt, ckey)
            win = ckey == slot[tgt]
            tgt, via, cen = tgt[win], via[win], cen[win]
            # one center may reach a target through several predecessors: keep the smallest id
            np.minimum.at(slot_via, tgt, via)
            claimed = np.unique(tgt)
            owner[tgt] = cen
            parent[claimed] = slot_via[claimed]
            hops[claimed] = rnd - level[owner[claimed]]
            slot[claimed] = np.inf
            slot_via[claimed] = n

            remaining -= len(claimed)
            if len(claimed):
                last_round = rnd
            frontier = claimed
            rnd += 1
    finally:
        if pool is not None:
            pool.shutdown()

    cut = int(np.count_nonzero(cut_mask(g, owner)))
    d = Decomposition(owner, parent, hops)
    report = RunReport(
        n=n,
        m=g.m,
        retries=1,
        levels=last_round + 1,
        edge_touches=touches,
        cut_edges=cut,
        max_piece_radius=int(hops.max()),
        delta_max=s.delta_max,
        pieces=int(np.count_nonzero(owner == np.arange(n))),
        beta=s.beta,
    )
    return d, report


def partition(
    g: Graph, cfg: RunConfig, threads: int | None = None
) -> tuple[Decomposition, RunReport]:
    """Resample shifts until both thresholds hold or ``cfg.max_retries`` attempts are used.

    On success the successful attempt is returned; otherwise the attempt with
    the fewest cut edges, with ``report.thresholds_met`` False.
    """
    diam_thr, cut_thr = cfg.thresholds(g)
    best = None
    for attempt in range(cfg.max_retries):
        s = sample_shifts(g.n, cfg.beta, rng_for(cfg.seed, attempt), cfg.tiebreak)
        d, rep = partition_once(g, s, threads)
        ok = rep.cut_edges <= cut_thr and 2 * rep.max_piece_radius <= diam_thr
        rep = replace(
            rep,
            retries=attempt + 1,
            seed=int(cfg.seed),
            thresholds_met=ok,
            diam_threshold=diam_thr,
            cut_threshold=cut_thr,
        )
        if ok:
            return d, rep
        if best is None or rep.cut_edges < best[1].cut_edges:
            best = (d, rep)
    d, rep = best
    return d, replace(rep, retries=cfg.max_retries)


def _round_seed(seed: int, i: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=(i,))
    return int(ss.generate_state(1, np.uint64)[0])


def block_decomposition(
    g: Graph,
    rounds: int,
    seed: int,
    tiebreak: TieBreak = "fractional",
    threads: int | None = None,
) -> list[Decomposition]:
    """Iterate beta = 1/2 decompositions, each on the edges cut by every earlier round."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    src, dst = g.edges()
    alive = np.ones(g.m, dtype=bool)
    out = []
    for i in range(rounds):
        sub = g.edge_subgraph(alive)
        cfg = RunConfig(beta=0.5, seed=_round_seed(seed, i), tiebreak=tiebreak)
        d, _ = partition(sub, cfg, threads)
        out.append(d)
        alive &= d.owner[src] != d.owner[dst]
    return out


def surviving_cut_counts(g: Graph, decomps: list[Decomposition]) -> list[int]:
    """Edges still inter-piece after each round of a block decomposition."""
    alive = np.ones(g.m, dtype=bool)
    counts = []
    for d in decomps:
        alive &= cut_mask(g, d.owner)
        counts.append(int(alive.sum()))
    return counts
