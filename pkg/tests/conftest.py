import itertools
import math

import pytest
from hypothesis import settings, strategies as st

from shiftdecomp import graph as gm

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record():
    """Log one PASS/FAIL line per acceptance criterion, then assert it."""

    def _record(num: int, name: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _record


def brute_force_owner(n, edges, shift, key):
    """Floyd-Warshall distances, then argmin of (dist - shift, key) per vertex.

    Independent of the package's BFS and engine.
    """
    d = [[math.inf] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = 0
    for u, v in edges:
        d[u][v] = d[v][u] = 1
    for k, i, j in itertools.product(range(n), repeat=3):
        if d[i][k] + d[k][j] < d[i][j]:
            d[i][j] = d[i][k] + d[k][j]
    return [
        min((u for u in range(n) if d[u][v] < math.inf), key=lambda u: (d[u][v] - shift[u], key[u]))
        for v in range(n)
    ]


@st.composite
def small_graphs(draw, max_n=24):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if not pairs:
        return gm.from_edges(n, [])
    edges = draw(st.lists(st.sampled_from(pairs), max_size=min(len(pairs), 3 * n)))
    return gm.from_edges(n, edges)


@st.composite
def generated_graphs(draw, max_n=64):
    kind = draw(st.sampled_from(["grid", "path", "complete", "gnp"]))
    if kind == "grid":
        r = draw(st.integers(1, 8))
        c = draw(st.integers(1, max_n // r))
        return gm.grid(r, c)
    if kind == "path":
        return gm.path(draw(st.integers(1, max_n)))
    if kind == "complete":
        return gm.complete(draw(st.integers(1, 20)))
    n = draw(st.integers(1, max_n))
    return gm.gnp(n, draw(st.floats(0.0, 0.3)), draw(st.integers(0, 2**32)))
