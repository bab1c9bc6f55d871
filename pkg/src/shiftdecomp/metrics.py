"""Decomposition validation and Monte Carlo experiments on the shift guarantees."""
from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .engine import Decomposition, RunConfig, cut_mask, partition, partition_once
from .graph import Graph, bfs_distances
from .shifts import TieBreak, exponential, order_statistic_gaps, rng_for, sample_shifts

__all__ = [
    "ValidationReport",
    "validate",
    "CutStats",
    "cut_probability_experiment",
    "harmonic",
    "max_shift_samples",
    "max_shift_experiment",
    "order_gap_means",
    "midpoint_distances",
    "close_probability_experiment",
    "SweepRow",
    "SweepStats",
    "sweep",
    "SWEEP_BETAS",
]

# beta grid for the grid-decomposition sweep
SWEEP_BETAS = (0.002, 0.005, 0.01, 0.02, 0.05, 0.1)

# pieces larger than this get the 2 * center-eccentricity bound instead of an exact diameter
EXACT_DIAMETER_LIMIT = 5000
_SOURCE_CHUNK = 256


def _mean(xs) -> float:
    xs = list(xs)
    return math.fsum(xs) / len(xs)


def _std(xs) -> float:
    xs = list(xs)
    return statistics.stdev(xs) if len(xs) > 1 else 0.0


def _stderr(xs) -> float:
    xs = list(xs)
    return _std(xs) / math.sqrt(len(xs))


# -- validation ---------------------------------------------------------------


@dataclass
class ValidationReport:
    is_partition: bool
    pieces_connected: bool
    cut_edges: int
    cut_fraction: float
    max_strong_diameter: float
    diameter_exact: bool
    pass_cut: bool
    pass_diam: bool
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.is_partition and self.pieces_connected and self.pass_cut and self.pass_diam


def _adjacency(g: Graph, keep: np.ndarray | None = None) -> csr_matrix:
    src = np.repeat(np.arange(g.n), g.degree())
    dst = g.neighbors
    if keep is not None:
        src, dst = src[keep], dst[keep]
    return csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(g.n, g.n))


def _bfs_rows(sub: csr_matrix, idx) -> np.ndarray:
    return shortest_path(sub, method="D", unweighted=True, directed=False, indices=idx)


def _exact_diameter(sub: csr_matrix, root: int, root_dist: np.ndarray) -> float:
    """Exact diameter of a connected graph by iterative fringe upper bounds.

    Vertices at BFS level < i from ``root`` are pairwise within 2(i-1), so only
    eccentricities of the deepest levels need computing.
    """
    depth = int(root_dist.max())
    lb = float(depth)
    by_level = np.argsort(root_dist, kind="stable")
    level_start = np.searchsorted(root_dist[by_level], np.arange(depth + 2))
    for i in range(depth, 0, -1):
        fringe = by_level[level_start[i] : level_start[i + 1]]
        for lo in range(0, len(fringe), _SOURCE_CHUNK):
            lb = max(lb, float(_bfs_rows(sub, fringe[lo : lo + _SOURCE_CHUNK]).max()))
        if lb > 2 * (i - 1):
            break
    return lb


def _max_piece_diameter(adj: csr_matrix, pieces: dict, exact_limit: int) -> tuple[float, bool]:
    """Largest strong diameter over connected pieces, and whether it is exact.

    Pieces above ``exact_limit`` vertices contribute 2 * eccentricity of their
    center.  Pieces whose center bound cannot beat the running maximum are
    skipped.
    """
    cand = []
    for c, members in pieces.items():
        if len(members) == 1:
            continue
        sub = adj[members][:, members]
        root = int(np.searchsorted(members, c))
        rd = _bfs_rows(sub, [root])[0].astype(np.int64)
        cand.append((2 * int(rd.max()), len(members) <= exact_limit, sub, root, rd))
    cand.sort(key=lambda t: -t[0])
    best, exact = 0.0, True
    for ub, small, sub, root, rd in cand:
        if ub <= best:
            break
        if small:
            best = max(best, _exact_diameter(sub, root, rd))
        else:
            best, exact = float(ub), False
    return best, exact


def validate(
    g: Graph,
    d: Decomposition,
    beta: float,
    diam_threshold: float,
    cut_threshold: float | None = None,
    exact_limit: int = EXACT_DIAMETER_LIMIT,
) -> ValidationReport:
    """Check ``d`` against the (beta, diam_threshold) decomposition definition.

    ``cut_threshold`` defaults to ``beta * m``.  Structural problems are
    reported as violations, never raised.
    """
    if cut_threshold is None:
        cut_threshold = beta * g.m
    owner = np.asarray(d.owner, dtype=np.int64)
    violations = []
    if len(owner) != g.n:
        violations.append(f"owner array has {len(owner)} entries for {g.n} vertices")
        return ValidationReport(False, False, 0, 0.0, math.inf, False, False, False, violations)

    in_range = (owner >= 0) & (owner < g.n)
    for v in np.flatnonzero(~in_range)[:20].tolist():
        violations.append(f"vertex {v} has invalid owner {owner[v]}")
    safe = np.where(in_range, owner, 0)
    non_center = in_range & (owner[safe] != safe)
    for v in np.flatnonzero(non_center)[:20].tolist():
        violations.append(f"vertex {v} owned by {owner[v]}, which is not a center")
    is_partition = bool(in_range.all() and not non_center.any())

    cut = cut_mask(g, owner)
    cut_edges = int(cut.sum())
    cut_fraction = cut_edges / g.m if g.m else 0.0

    connected = False
    diam = math.inf
    exact = False
    if is_partition:
        src = np.repeat(np.arange(g.n), g.degree())
        intra = owner[src] == owner[g.neighbors]
        adj = _adjacency(g, intra)
        _, comp = connected_components(adj, directed=False)
        pairs = np.unique(np.stack([owner, comp]), axis=1)
        split = np.unique(pairs[0], return_counts=True)
        broken = split[0][split[1] > 1]
        connected = len(broken) == 0
        for c in broken[:20].tolist():
            violations.append(f"piece centered at {c} is disconnected")
        if connected:
            diam, exact = _max_piece_diameter(adj, d.pieces, exact_limit)

    pass_cut = cut_edges <= cut_threshold
    pass_diam = diam <= diam_threshold
    if not pass_cut:
        violations.append(f"{cut_edges} cut edges exceed threshold {cut_threshold:g}")
    if is_partition and connected and not pass_diam:
        violations.append(f"diameter {diam:g} exceeds threshold {diam_threshold:g}")
    return ValidationReport(
        is_partition, connected, cut_edges, cut_fraction, diam, exact, pass_cut, pass_diam, violations
    )


# -- cut probability ----------------------------------------------------------


@dataclass
class CutStats:
    trials: int
    mean_cut_fraction: float
    std_cut_fraction: float
    stderr: float
    max_edge_frequency: float
    edge_frequency: np.ndarray
    bound: float  # 1 - exp(-beta)


def cut_probability_experiment(
    g: Graph, beta: float, trials: int, seed: int, tiebreak: TieBreak = "fractional"
) -> CutStats:
    """Fresh shifts per trial, one engine pass each; no retries."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    counts = np.zeros(g.m, dtype=np.int64)
    fracs = []
    for t in range(trials):
        s = sample_shifts(g.n, beta, rng_for(seed, t), tiebreak)
        d, rep = partition_once(g, s, threads=1)
        if g.m:
            counts += cut_mask(g, d.owner)
        fracs.append(rep.cut_fraction)
    freq = counts / trials
    return CutStats(
        trials=trials,
        mean_cut_fraction=_mean(fracs),
        std_cut_fraction=_std(fracs),
        stderr=_stderr(fracs),
        max_edge_frequency=float(freq.max()) if g.m else 0.0,
        edge_frequency=freq,
        bound=1.0 - math.exp(-beta),
    )


# -- shift statistics ---------------------------------------------------------


def harmonic(n: int) -> float:
    return math.fsum(1.0 / k for k in range(1, n + 1))


def max_shift_samples(n: int, beta: float, trials: int, seed: int) -> np.ndarray:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return np.array([sample_shifts(n, beta, rng_for(seed, t)).delta_max for t in range(trials)])


def max_shift_experiment(n: int, beta: float, trials: int, seed: int) -> float:
    """Mean of the maximum of n Exp(beta) shifts; compare with ``harmonic(n) / beta``."""
    return _mean(max_shift_samples(n, beta, trials, seed).tolist())


def order_gap_means(n: int, beta: float, trials: int, seed: int) -> np.ndarray:
    """Mean of each order-statistic gap over ``trials`` independent samples of size n."""
    x = exponential(rng_for(seed), beta, (trials, n))
    return order_statistic_gaps(x).mean(axis=0)


def midpoint_distances(g: Graph, a: int, b: int) -> np.ndarray:
    """Distance from every vertex to the midpoint of edge ab (inf if unreachable)."""
    da = bfs_distances(g, a).astype(np.float64)
    db = bfs_distances(g, b).astype(np.float64)
    da[da < 0] = np.inf
    db[db < 0] = np.inf
    return np.minimum(da, db) + 0.5


def close_probability_experiment(
    dists, beta: float, c: float, trials: int, seed: int
) -> tuple[float, float]:
    """Frequency that the two smallest ``dist_i - delta_i`` are within ``c``; returns (freq, stderr)."""
    dists = np.asarray(dists, dtype=np.float64)
    dists = dists[np.isfinite(dists)]
    if len(dists) < 2:
        return 0.0, 0.0
    rng = rng_for(seed)
    hits = 0
    done = 0
    batch = max(1, min(trials, 2_000_000 // len(dists)))
    while done < trials:
        k = min(batch, trials - done)
        vals = dists - exponential(rng, beta, (k, len(dists)))
        two = np.partition(vals, 1, axis=1)[:, :2]
        hits += int(np.count_nonzero(two[:, 1] - two[:, 0] <= c))
        done += k
    p = hits / trials
    return p, math.sqrt(p * (1 - p) / trials)


# -- sweeps -------------------------------------------------------------------


@dataclass
class SweepRow:
    beta: float
    trials: int
    mean_cut_fraction: float
    std_cut_fraction: float
    mean_max_diameter: float
    mean_delta_max: float
    mean_retries: float
    stderr_cut_fraction: float = 0.0
    stderr_max_diameter: float = 0.0


CSV_COLUMNS = (
    "beta",
    "trials",
    "mean_cut_fraction",
    "std_cut_fraction",
    "mean_max_diameter",
    "mean_delta_max",
    "mean_retries",
)


@dataclass
class SweepStats:
    rows: list[SweepRow]
    examples: dict[float, Decomposition] = field(default_factory=dict, repr=False)

    @property
    def betas(self) -> list[float]:
        return [r.beta for r in self.rows]

    def monotonicity(self) -> dict[str, bool]:
        """Trend flags in increasing-beta order.

        ``*_strict`` compare means directly; ``*_within_noise`` forgive
        reversals smaller than 3 combined standard errors.
        """
        rows = sorted(self.rows, key=lambda r: r.beta)
        out = {
            "cut_increasing_strict": True,
            "diameter_decreasing_strict": True,
            "cut_increasing_within_noise": True,
            "diameter_decreasing_within_noise": True,
        }
        for a, b in zip(rows, rows[1:]):
            se_c = 3 * math.hypot(a.stderr_cut_fraction, b.stderr_cut_fraction)
            se_d = 3 * math.hypot(a.stderr_max_diameter, b.stderr_max_diameter)
            if not b.mean_cut_fraction > a.mean_cut_fraction:
                out["cut_increasing_strict"] = False
                if a.mean_cut_fraction - b.mean_cut_fraction > se_c:
                    out["cut_increasing_within_noise"] = False
            if not b.mean_max_diameter < a.mean_max_diameter:
                out["diameter_decreasing_strict"] = False
                if b.mean_max_diameter - a.mean_max_diameter > se_d:
                    out["diameter_decreasing_within_noise"] = False
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([repr(getattr(r, c)) for c in CSV_COLUMNS])
        return buf.getvalue()


def sweep(
    g: Graph,
    betas,
    trials: int,
    seed: int,
    tiebreak: TieBreak = "fractional",
    exact_limit: int = EXACT_DIAMETER_LIMIT,
    threads: int | None = None,
) -> SweepStats:
    """Run ``trials`` retried partitions per beta; first trial of each beta is kept in ``examples``."""
    betas = list(betas)
    if not betas:
        raise ValueError("need at least one beta")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    examples = {}
    for bi, beta in enumerate(betas):
        if not 0 < beta <= 0.5:
            raise ValueError(f"beta must lie in (0, 1/2], got {beta}")
        fracs, diams, dmax, retries = [], [], [], []
        for t in range(trials):
            cfg = RunConfig(beta=beta, seed=_cell_seed(seed, bi, t), tiebreak=tiebreak)
            d, rep = partition(g, cfg, threads)
            diam_thr, cut_thr = cfg.thresholds(g)
            v = validate(g, d, beta, diam_thr, cut_thr, exact_limit=exact_limit)
            fracs.append(rep.cut_fraction)
            diams.append(v.max_strong_diameter)
            dmax.append(rep.delta_max)
            retries.append(rep.retries)
            if t == 0:
                examples[beta] = d
        rows.append(
            SweepRow(
                beta=beta,
                trials=trials,
                mean_cut_fraction=_mean(fracs),
                std_cut_fraction=_std(fracs),
                mean_max_diameter=_mean(diams),
                mean_delta_max=_mean(dmax),
                mean_retries=_mean(retries),
                stderr_cut_fraction=_stderr(fracs),
                stderr_max_diameter=_stderr(diams),
            )
        )
    return SweepStats(rows, examples)


def _cell_seed(seed: int, bi: int, t: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=(bi, t))
    return int(ss.generate_state(1, np.uint64)[0])
