"""Exponential shifts and the tie-break keys derived from them.

Each vertex u draws ``delta[u] ~ Exp(beta)``.  Its BFS start time is
``delta_max - delta[u]``; the integer part is the start round and the
tie-break key orders claims that arrive in the same round.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Literal

import numpy as np

__all__ = [
    "ShiftAssignment",
    "TieBreak",
    "exponential",
    "sample_shifts",
    "order_statistic_gaps",
    "rng_for",
    "dump_shifts",
    "load_shifts",
]

TieBreak = Literal["fractional", "permutation"]
TIEBREAK_MODES = ("fractional", "permutation")

# redraws allowed on an exact fractional-key collision before giving up
_MAX_REDRAWS = 16


def rng_for(seed, *stream: int) -> np.random.Generator:
    """Generator for substream ``stream`` of a 64-bit ``seed``."""
    if isinstance(seed, np.random.Generator):
        if stream:
            raise ValueError("substreams need an integer seed")
        return seed
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(stream)))


def exponential(rng: np.random.Generator, beta: float, size) -> np.ndarray:
    """Inverse-CDF sampling: ``-ln(U)/beta`` with U uniform on (0, 1]."""
    u = 1.0 - rng.random(size)
    return -np.log(u) / beta


@dataclass(frozen=True, eq=False)
class ShiftAssignment:
    beta: float
    delta: np.ndarray
    tiebreak: np.ndarray
    mode: TieBreak = "fractional"

    def __post_init__(self):
        self.delta.setflags(write=False)
        self.tiebreak.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.delta)

    @property
    def delta_max(self) -> float:
        return float(self.delta.max())

    def start_times(self) -> np.ndarray:
        return self.delta_max - self.delta

    def start_levels(self) -> np.ndarray:
        return np.floor(self.start_times()).astype(np.int64)

    def effective_shifts(self) -> np.ndarray:
        """Shift magnitudes the assignment actually ranks by.

        Fractional mode ranks by the real ``delta``.  Permutation mode only
        keeps the integer start round, so the effective shift is
        ``delta_max - floor(delta_max - delta)``; the rank breaks the ties.
        """
        if self.mode == "fractional":
            return np.asarray(self.delta, dtype=np.float64)
        return self.delta_max - self.start_levels().astype(np.float64)

    @classmethod
    def from_deltas(
        cls,
        delta,
        beta: float = 1.0,
        mode: TieBreak = "fractional",
        seed: int = 0,
    ) -> ShiftAssignment:
        """Wrap explicit shifts.  ``seed`` only matters for permutation ranks."""
        delta = np.array(delta, dtype=np.float64)
        if delta.ndim != 1 or len(delta) == 0:
            raise ValueError("need a non-empty 1-d array of shifts")
        if not np.all(np.isfinite(delta)) or np.any(delta < 0):
            raise ValueError("shifts must be finite and non-negative")
        if mode not in TIEBREAK_MODES:
            raise ValueError(f"unknown tie-break mode {mode!r}")
        if mode == "fractional":
            t = delta.max() - delta
            key = t - np.floor(t)
            if len(np.unique(key)) != len(key):
                raise ValueError("fractional tie-break keys collide")
        else:
            key = rng_for(seed, 1).permutation(len(delta)).astype(np.int64)
        return cls(float(beta), delta, key, mode)


def sample_shifts(n: int, beta: float, seed, mode: TieBreak = "fractional") -> ShiftAssignment:
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if mode not in TIEBREAK_MODES:
        raise ValueError(f"unknown tie-break mode {mode!r}")
    rng = rng_for(seed)
    for _ in range(_MAX_REDRAWS):
        delta = exponential(rng, beta, n)
        if mode == "permutation":
            key = rng.permutation(n).astype(np.int64)
            return ShiftAssignment(float(beta), delta, key, mode)
        t = delta.max() - delta
        key = t - np.floor(t)
        if len(np.unique(key)) == n:
            return ShiftAssignment(float(beta), delta, key, mode)
    raise RuntimeError("could not draw distinct tie-break keys")


def order_statistic_gaps(samples) -> np.ndarray:
    """``X(1), X(2)-X(1), ..., X(n)-X(n-1)`` along the last axis."""
    x = np.sort(np.asarray(samples, dtype=np.float64), axis=-1)
    if x.size == 0 or x.shape[-1] == 0:
        raise ValueError("need at least one sample")
    return np.diff(x, axis=-1, prepend=0.0)


def dump_shifts(s: ShiftAssignment, stream: IO[str]) -> None:
    for v, d in enumerate(s.delta.tolist()):
        stream.write(f"{v} {d!r}\n")


def load_shifts(stream: IO[str], n: int | None = None) -> np.ndarray:
    """Parse ``<vertex> <delta>`` lines into a dense shift array."""
    vals: dict[int, float] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<vertex> <delta>', got {line!r}")
        try:
            v, d = int(parts[0]), float(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from None
        if v in vals:
            raise ValueError(f"line {lineno}: duplicate vertex {v}")
        vals[v] = d
    size = n if n is not None else len(vals)
    if sorted(vals) != list(range(size)):
        raise ValueError(f"shifts must cover vertices 0..{size - 1} exactly once")
    return np.array([vals[v] for v in range(size)], dtype=np.float64)
