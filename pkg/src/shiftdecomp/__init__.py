"""Parallel low-diameter graph decomposition via exponentially shifted shortest paths."""
from .engine import (
    Decomposition,
    RunConfig,
    RunReport,
    block_decomposition,
    partition,
    partition_once,
    surviving_cut_counts,
)
from .graph import Graph, GraphError, ParseError, from_edges, gen, load_edgelist, save_edgelist
from .metrics import ValidationReport, validate
from .oracle import midpoint_witness_check, oracle_assign, piece_strong_diameter
from .shifts import ShiftAssignment, order_statistic_gaps, sample_shifts

__version__ = "0.1.0"

__all__ = [
    "Decomposition",
    "Graph",
    "GraphError",
    "ParseError",
    "RunConfig",
    "RunReport",
    "ShiftAssignment",
    "ValidationReport",
    "block_decomposition",
    "from_edges",
    "gen",
    "load_edgelist",
    "midpoint_witness_check",
    "oracle_assign",
    "order_statistic_gaps",
    "partition",
    "partition_once",
    "piece_strong_diameter",
    "sample_shifts",
    "save_edgelist",
    "surviving_cut_counts",
    "validate",
]
