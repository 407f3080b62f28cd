"""Seeded graph generators for fixtures, benchmarks and the ``gen`` subcommand."""

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from pivotcert.errors import GraphError
from pivotcert.graph import Graph, complement, partial_complement

logger = logging.getLogger(__name__)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise GraphError(message)


def gnp(n: int, p: float, seed: Optional[int] = None) -> Graph:
    """Erdős–Rényi G(n, p)."""
    _require(n >= 0, f"n must be non-negative, got {n}")
    _require(0 <= p <= 1, f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    coins = np.triu(rng.random((n, n)) < p, k=1)
    us, vs = np.nonzero(coins)
    return Graph.from_edges(n, zip(us.tolist(), vs.tolist()))


def path(n: int) -> Graph:
    _require(n >= 1, f"path needs at least one vertex, got {n}")
    return Graph.from_edges(n, ((v, v + 1) for v in range(n - 1)))


def long_cycle(n: int) -> Graph:
    _require(n >= 3, f"cycle needs at least 3 vertices, got {n}")
    return Graph.from_edges(n, ((v, (v + 1) % n) for v in range(n)))


def anti_hole(n: int) -> Graph:
    """Complement of C_n; vertex order 0..n-1 is the anti-hole order."""
    _require(n >= 5, f"anti-hole needs at least 5 vertices, got {n}")
    return complement(long_cycle(n))


def st_cycle(s: int, t: int) -> Graph:
    """C_s on 0..s-1 with the run 0..t-1 partially complemented."""
    _require(0 <= t <= s, f"t must lie in 0..{s}, got {t}")
    return partial_complement(long_cycle(s), range(t))


def fan(intervals: Sequence[int]) -> Graph:
    """
    Generalized fan with the given interval lengths.

    The main path is 0..sum(intervals) and the center is the last vertex,
    adjacent to both path ends and to every interval boundary.
    """
    _require(len(intervals) >= 1, "fan needs at least one interval")
    _require(all(a >= 1 for a in intervals), f"intervals must be positive, got {list(intervals)}")
    length = sum(intervals)
    center = length + 1
    edges = [(v, v + 1) for v in range(length)]
    position = 0
    edges.append((center, 0))
    for a in intervals:
        position += a
        edges.append((center, position))
    return Graph.from_edges(length + 2, edges)


def caterpillar(n: int, max_leaf: int, seed: Optional[int] = None) -> Graph:
    """
    Random caterpillar on n vertices.

    The spine is 0..t-1; each spine vertex receives up to ``max_leaf``
    pendant leaves, numbered after the spine in spine order.
    """
    _require(n >= 1, f"caterpillar needs at least one vertex, got {n}")
    _require(max_leaf >= 0, f"max_leaf must be non-negative, got {max_leaf}")
    rng = np.random.default_rng(seed)
    counts: list[int] = []
    remaining = n
    while remaining > 0:
        c = min(int(rng.integers(0, max_leaf + 1)), remaining - 1)
        counts.append(c)
        remaining -= 1 + c
    spine = len(counts)
    edges = [(v, v + 1) for v in range(spine - 1)]
    leaf = spine
    for v, c in enumerate(counts):
        for _ in range(c):
            edges.append((v, leaf))
            leaf += 1
    logger.debug(f"Caterpillar with spine {spine} and {n - spine} leaves")
    return Graph.from_edges(n, edges)


def _add_random_edges(
    rows: list[int], degree: list[int], pool: Sequence[int], attempts: int, d: int, rng
) -> None:
    if len(pool) < 2:
        return
    picks = rng.integers(0, len(pool), size=(attempts, 2))
    for a, b in picks.tolist():
        u, v = pool[a], pool[b]
        if u == v or rows[u] >> v & 1 or degree[u] >= d or degree[v] >= d:
            continue
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        degree[u] += 1
        degree[v] += 1


def bounded_degree(n: int, d: int, seed: Optional[int] = None) -> Graph:
    """Random graph with maximum degree at most ``d``, built by rejecting edges at full vertices."""
    _require(n >= 1, f"n must be positive, got {n}")
    _require(d >= 0, f"d must be non-negative, got {d}")
    rng = np.random.default_rng(seed)
    rows = [0] * n
    degree = [0] * n
    _add_random_edges(rows, degree, range(n), 2 * n * d, d, rng)
    return Graph(n, tuple(rows))


def planted_path(n: int, s: int, d: int, seed: Optional[int] = None) -> Graph:
    """
    Random graph of maximum degree <= d in which 0..s-1 is a dominating induced path.

    Every off-path vertex gets one or two path neighbours (spread so path
    vertices stay within the degree bound) and random edges among the
    off-path vertices fill in the rest.
    """
    _require(1 <= s <= n, f"path length must lie in 1..{n}, got {s}")
    _require(d >= 3, f"d must be at least 3, got {d}")
    _require(n - s <= s * (d - 2), f"{n - s} off-path vertices cannot attach to {s} path vertices at degree {d}")
    rng = np.random.default_rng(seed)
    rows = [0] * n
    degree = [0] * n

    def link(u: int, v: int) -> None:
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        degree[u] += 1
        degree[v] += 1

    for v in range(s - 1):
        link(v, v + 1)
    for u in range(s, n):
        open_slots = [v for v in range(s) if degree[v] < d]
        link(u, open_slots[int(rng.integers(0, len(open_slots)))])
    for u in range(s, n):
        if rng.random() < 0.5:
            open_slots = [v for v in range(s) if degree[v] < d and not rows[u] >> v & 1]
            if open_slots:
                link(u, open_slots[int(rng.integers(0, len(open_slots)))])
    _add_random_edges(rows, degree, range(s, n), n - s, d, rng)
    return Graph(n, tuple(rows))


GENERATORS = {
    "gnp": gnp,
    "path": path,
    "cycle": long_cycle,
    "anti-hole": anti_hole,
    "st-cycle": st_cycle,
    "fan": fan,
    "caterpillar": caterpillar,
    "bounded-degree": bounded_degree,
    "planted-path": planted_path,
}
