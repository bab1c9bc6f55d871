"""Immutable undirected, unweighted graphs in compressed adjacency (CSR) form.

Vertices are dense 0-based integers.  Each neighbor list is stored sorted so
iteration order is deterministic.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

__all__ = [
    "Graph",
    "GraphError",
    "ParseError",
    "from_edges",
    "grid",
    "path",
    "complete",
    "gnp",
    "gen",
    "load_edgelist",
    "save_edgelist",
    "bfs_distances",
]


class GraphError(ValueError):
    """Invalid graph input (bad vertex id, self-loop, bad generator params)."""


class ParseError(GraphError):
    """Malformed edge-list text."""

    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    offsets: np.ndarray  # int64, shape (n+1,)
    neighbors: np.ndarray  # int64, shape (2m,)
    _edges: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.offsets.setflags(write=False)
        self.neighbors.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.neighbors) // 2

    def degree(self) -> np.ndarray:
        return np.diff(self.offsets)

    def adj(self, u: int) -> np.ndarray:
        return self.neighbors[self.offsets[u] : self.offsets[u + 1]]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Canonical edge arrays ``(src, dst)`` with ``src < dst``, sorted."""
        if self._edges is None:
            src = np.repeat(np.arange(self.n, dtype=np.int64), self.degree())
            keep = src < self.neighbors
            e = (src[keep], self.neighbors[keep])
            for a in e:
                a.setflags(write=False)
            object.__setattr__(self, "_edges", e)
        return self._edges

    def edge_subgraph(self, mask: np.ndarray) -> Graph:
        """Same vertex set, keeping only the canonical edges selected by ``mask``."""
        src, dst = self.edges()
        mask = np.asarray(mask, dtype=bool)
        return _from_arrays(self.n, src[mask], dst[mask])

    def check(self) -> None:
        """Raise GraphError if the CSR arrays break symmetry/dedup invariants."""
        off, nb = self.offsets, self.neighbors
        if len(off) != self.n + 1 or off[0] != 0 or off[-1] != len(nb):
            raise GraphError("offsets inconsistent with neighbor array")
        if np.any(np.diff(off) < 0):
            raise GraphError("offsets not monotone")
        if len(nb) % 2:
            raise GraphError("odd number of directed entries")
        if len(nb) and (nb.min() < 0 or nb.max() >= self.n):
            raise GraphError("neighbor id out of range")
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degree())
        if np.any(src == nb):
            raise GraphError("self-loop")
        # sorted + strictly increasing within each row <=> no duplicates
        same_row = src[1:] == src[:-1]
        if np.any(nb[1:][same_row] <= nb[:-1][same_row]):
            raise GraphError("neighbor lists not sorted/deduplicated")
        fwd = src * self.n + nb
        rev = np.sort(nb * self.n + src)
        if not np.array_equal(fwd, rev):
            raise GraphError("adjacency not symmetric")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.neighbors, other.neighbors)
        )

    def __hash__(self):
        return hash((self.n, self.neighbors.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _from_arrays(n: int, src: np.ndarray, dst: np.ndarray) -> Graph:
    # src/dst already validated, may contain duplicates in either orientation
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    keys = np.unique(lo * n + hi) if len(lo) else np.empty(0, dtype=np.int64)
    lo, hi = keys // n, keys % n
    a = np.concatenate([lo, hi])
    b = np.concatenate([hi, lo])
    order = np.lexsort((b, a))
    a, b = a[order], b[order]
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(a, minlength=n), out=offsets[1:])
    return Graph(n, offsets, b.astype(np.int64, copy=False))


def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    if n < 1:
        raise GraphError(f"vertex count must be >= 1, got {n}")
    arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    src, dst = arr[:, 0], arr[:, 1]
    bad = (src < 0) | (src >= n) | (dst < 0) | (dst >= n)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise GraphError(f"edge {tuple(arr[i])} has vertex outside [0, {n})")
    loops = src == dst
    if loops.any():
        i = int(np.flatnonzero(loops)[0])
        raise GraphError(f"self-loop at vertex {src[i]}")
    return _from_arrays(n, src, dst)


# -- generators ---------------------------------------------------------------


def _positive(**kw: int) -> None:
    for name, val in kw.items():
        if int(val) != val or val < 1:
            raise GraphError(f"{name} must be a positive integer, got {val!r}")


def grid(rows: int, cols: int) -> Graph:
    """4-neighbor grid; vertex ``(i, j)`` has id ``i * cols + j``."""
    _positive(rows=rows, cols=cols)
    ids = np.arange(rows * cols, dtype=np.int64).reshape(rows, cols)
    src = np.concatenate([ids[:, :-1].ravel(), ids[:-1, :].ravel()])
    dst = np.concatenate([ids[:, 1:].ravel(), ids[1:, :].ravel()])
    return _from_arrays(rows * cols, src, dst)


def path(n: int) -> Graph:
    _positive(n=n)
    v = np.arange(n - 1, dtype=np.int64)
    return _from_arrays(n, v, v + 1)


def complete(n: int) -> Graph:
    _positive(n=n)
    src, dst = np.triu_indices(n, k=1)
    return _from_arrays(n, src.astype(np.int64), dst.astype(np.int64))


def gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p).  Row by row: binomial count, then distinct targets."""
    _positive(n=n)
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    src, dst = [], []
    for u in range(n - 1):
        k = rng.binomial(n - u - 1, p)
        if k:
            t = rng.choice(n - u - 1, size=k, replace=False) + u + 1
            src.append(np.full(k, u, dtype=np.int64))
            dst.append(t.astype(np.int64))
    if not src:
        return _from_arrays(n, np.empty(0, np.int64), np.empty(0, np.int64))
    return _from_arrays(n, np.concatenate(src), np.concatenate(dst))


def gen(kind: str, **params) -> Graph:
    """Dispatch by name: ``grid(rows, cols)``, ``path(n)``, ``complete(n)``, ``gnp(n, p, seed)``."""
    makers = {"grid": grid, "path": path, "complete": complete, "gnp": gnp}
    try:
        maker = makers[kind]
    except KeyError:
        raise GraphError(f"unknown graph kind {kind!r}") from None
    try:
        return maker(**params)
    except TypeError as e:
        raise GraphError(f"bad parameters for {kind}: {e}") from None


# -- edge-list text format ----------------------------------------------------


def load_edgelist(stream: IO[str]) -> Graph:
    """Read ``p <n> <m>`` followed by exactly m ``<u> <v>`` lines; ``#`` lines are comments."""
    header = None
    edges: list[tuple[int, int]] = []
    lineno = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 3 or parts[0] != "p":
                raise ParseError(lineno, f"expected 'p <n> <m>' header, got {line!r}")
            try:
                header = (int(parts[1]), int(parts[2]))
            except ValueError:
                raise ParseError(lineno, f"non-integer header field in {line!r}") from None
            if header[0] < 1 or header[1] < 0:
                raise ParseError(lineno, f"invalid counts in header {line!r}")
            continue
        if len(parts) != 2:
            raise ParseError(lineno, f"expected '<u> <v>', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(lineno, f"non-integer vertex in {line!r}") from None
        if not (0 <= u < header[0] and 0 <= v < header[0]):
            raise ParseError(lineno, f"vertex out of range [0, {header[0]}) in {line!r}")
        if u == v:
            raise ParseError(lineno, f"self-loop {line!r}")
        edges.append((u, v))
    if header is None:
        raise ParseError(lineno, "missing 'p <n> <m>' header")
    n, m = header
    if len(edges) != m:
        raise ParseError(lineno, f"declared {m} edges, found {len(edges)}")
    g = from_edges(n, edges)
    if g.m != m:
        raise ParseError(lineno, f"declared {m} edges, {m - g.m} are duplicates")
    return g


def save_edgelist(g: Graph, stream: IO[str]) -> None:
    src, dst = g.edges()
    stream.write(f"p {g.n} {g.m}\n")
    if g.m:
        stream.write("\n".join(f"{u} {v}" for u, v in zip(src.tolist(), dst.tolist())))
        stream.write("\n")


# -- distances ----------------------------------------------------------------


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distances from ``source``; unreachable vertices get -1."""
    dist = [-1] * g.n
    dist[source] = 0
    off, nb = g.offsets.tolist(), g.neighbors.tolist()
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for v in nb[off[u] : off[u + 1]]:
            if dist[v] < 0:
                dist[v] = du
                q.append(v)
    return np.asarray(dist, dtype=np.int64)
