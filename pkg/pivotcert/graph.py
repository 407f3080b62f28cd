"""
Dense bitset graphs and the structural queries every other module builds on.

A Graph stores one Python int per vertex; bit ``w`` of ``rows[v]`` is set iff
``v`` and ``w`` are adjacent. Graphs are immutable values, and every operation
here returns a new one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Optional, Sequence

from pivotcert.errors import FormatError, GraphError, SizeCapError

VertexSet = frozenset


def bit(v: int) -> int:
    return 1 << v


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the positions of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


@dataclass(frozen=True)
class Graph:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError(f"vertex count must be non-negative, got {self.n}")
        if len(self.rows) != self.n:
            raise GraphError(f"expected {self.n} adjacency rows, got {len(self.rows)}")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.rows):
            if row < 0 or row & ~full:
                raise GraphError(f"row {v} references vertices outside 0..{self.n - 1}")
            if row >> v & 1:
                raise GraphError(f"loop at vertex {v}")
            for w in iter_bits(row):
                if not self.rows[w] >> v & 1:
                    raise GraphError(f"asymmetric adjacency between {v} and {w}")

    @classmethod
    def trusted(cls, n: int, rows: tuple[int, ...]) -> "Graph":
        """Build without validation; for rows derived from an already valid graph."""
        g = object.__new__(cls)
        object.__setattr__(g, "n", n)
        object.__setattr__(g, "rows", rows)
        return g

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << v) for v in range(n)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {u}-{v} out of range for n={n}")
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def neighbors(self, v: int) -> int:
        return self.rows[v]

    def neighbor_list(self, v: int) -> list[int]:
        return list(iter_bits(self.rows[v]))

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [row.bit_count() for row in self.rows]

    def max_degree(self) -> int:
        return max((row.bit_count() for row in self.rows), default=0)

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, row in enumerate(self.rows):
            for v in iter_bits(row >> (u + 1)):
                yield u, u + 1 + v

    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range for n={self.n}")

    def check_set(self, vertices: Iterable[int]) -> int:
        mask = 0
        for v in vertices:
            self.check_vertex(v)
            mask |= 1 << v
        return mask


class PairKind(str, enum.Enum):
    COMPLETE = "complete"
    ANTICOMPLETE = "anticomplete"

    def flipped(self) -> "PairKind":
        return PairKind.ANTICOMPLETE if self is PairKind.COMPLETE else PairKind.COMPLETE


@dataclass(frozen=True)
class PurePair:
    a: frozenset[int]
    b: frozenset[int]
    kind: PairKind

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": "pure_pair",
            "a": sorted(self.a),
            "b": sorted(self.b),
            "kind": self.kind.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PurePair":
        try:
            a = frozenset(int(v) for v in data["a"])
            b = frozenset(int(v) for v in data["b"])
            kind = PairKind(data["kind"])
        except KeyError as exc:
            raise FormatError(f"pure pair is missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise FormatError(f"malformed pure pair: {exc}") from exc
        return cls(a, b, kind)

    def mapped(self, keep: Sequence[int], flip: bool = False) -> "PurePair":
        """Translate ids through a remapping table, optionally flipping the kind."""
        kind = self.kind.flipped() if flip else self.kind
        return PurePair(
            frozenset(keep[v] for v in self.a),
            frozenset(keep[v] for v in self.b),
            kind,
        )


def check_pure_pair(g: Graph, pair: PurePair) -> list[str]:
    """Return the reasons ``pair`` is not a pure pair of ``g``; empty when it is."""
    failures: list[str] = []
    if not pair.a or not pair.b:
        failures.append("pure pair sides must be nonempty")
    bad = [v for v in pair.a | pair.b if not 0 <= v < g.n]
    if bad:
        failures.append(f"vertices out of range: {sorted(bad)}")
        return failures
    overlap = pair.a & pair.b
    if overlap:
        failures.append(f"sides overlap on {sorted(overlap)}")
    b_mask = mask_of(pair.b)
    for u in sorted(pair.a):
        across = g.rows[u] & b_mask
        if pair.kind is PairKind.ANTICOMPLETE and across:
            w = next(iter_bits(across))
            failures.append(f"cross edge {u}-{w} violates anticomplete")
            break
        if pair.kind is PairKind.COMPLETE and across != b_mask & ~(1 << u):
            w = next(iter_bits(b_mask & ~across & ~(1 << u)))
            failures.append(f"missing cross edge {u}-{w} violates complete")
            break
    return failures


def complement(g: Graph) -> Graph:
    full = g.full_mask
    return Graph.trusted(g.n, tuple(~row & full & ~(1 << v) for v, row in enumerate(g.rows)))


def partial_complement(g: Graph, s: Iterable[int]) -> Graph:
    """Toggle adjacency on every pair with both ends in ``s`` (the graph G ⊕ S)."""
    s_mask = g.check_set(s)
    rows = list(g.rows)
    for v in iter_bits(s_mask):
        rows[v] ^= s_mask & ~(1 << v)
    return Graph.trusted(g.n, tuple(rows))


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """
    Restrict ``g`` to ``s``.

    Returns:
        The induced graph on vertices 0..|s|-1 and the keep table mapping each
        new id to its id in ``g`` (sorted ascending).
    """
    keep = tuple(sorted(set(s)))
    if not keep:
        raise GraphError("induced subgraph of an empty vertex set")
    g.check_set(keep)
    position = {v: i for i, v in enumerate(keep)}
    rows = []
    keep_mask = mask_of(keep)
    for v in keep:
        row = 0
        for w in iter_bits(g.rows[v] & keep_mask):
            row |= 1 << position[w]
        rows.append(row)
    return Graph.trusted(len(keep), tuple(rows)), keep


def delete_vertices(g: Graph, s: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    s_mask = g.check_set(s)
    return induced_subgraph(g, [v for v in range(g.n) if not s_mask >> v & 1])


def component_masks(g: Graph, within: Optional[int] = None) -> list[int]:
    """Connected components of ``g[within]`` as bitmasks, ordered by smallest member."""
    remaining = g.full_mask if within is None else within
    found: list[int] = []
    while remaining:
        seed = remaining & -remaining
        comp = seed
        frontier = seed
        while frontier:
            reach = 0
            for v in iter_bits(frontier):
                reach |= g.rows[v]
            frontier = reach & remaining & ~comp
            comp |= frontier
        found.append(comp)
        remaining &= ~comp
    return found


def components(g: Graph) -> list[frozenset[int]]:
    return [frozenset(iter_bits(mask)) for mask in component_masks(g)]


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(component_masks(g)) == 1


def is_bipartite(g: Graph) -> bool:
    side = [-1] * g.n
    for start in range(g.n):
        if side[start] != -1:
            continue
        side[start] = 0
        stack = [start]
        while stack:
            v = stack.pop()
            for w in iter_bits(g.rows[v]):
                if side[w] == -1:
                    side[w] = 1 - side[v]
                    stack.append(w)
                elif side[w] == side[v]:
                    return False
    return True


def _check_sequence(g: Graph, order: Sequence[int]) -> None:
    for v in order:
        g.check_vertex(v)
    if len(set(order)) != len(order):
        raise GraphError(f"repeated vertices in {list(order)}")


def is_induced_path(g: Graph, order: Sequence[int]) -> bool:
    """True iff consecutive vertices are adjacent and no other pair is."""
    _check_sequence(g, order)
    if not order:
        raise GraphError("a path needs at least one vertex")
    seen = 0
    previous = None
    for v in order:
        expected = 0 if previous is None else 1 << previous
        if g.rows[v] & seen != expected:
            return False
        seen |= 1 << v
        previous = v
    return True


def is_induced_cycle(g: Graph, order: Sequence[int]) -> bool:
    """True iff ``order`` (closed up) is an induced cycle of ``g``."""
    _check_sequence(g, order)
    if len(order) < 3:
        raise GraphError(f"a cycle needs at least 3 vertices, got {len(order)}")
    cycle_mask = mask_of(order)
    m = len(order)
    for i, v in enumerate(order):
        expected = (1 << order[i - 1]) | (1 << order[(i + 1) % m])
        if g.rows[v] & cycle_mask != expected:
            return False
    return True


def is_cycle_graph(g: Graph, k: int) -> bool:
    """Single cycle on exactly ``k`` vertices: connected, every degree 2, n = k."""
    return k >= 3 and g.n == k and all(d == 2 for d in g.degrees()) and is_connected(g)


def find_induced_cycle(g: Graph, k: int) -> Optional[list[int]]:
    """
    Search for an induced cycle of length exactly ``k``.

    The cycle is grown as an induced path from its smallest vertex; a new
    vertex may touch only the current end, except on the closing step where it
    must also touch the start.
    """
    if k < 3 or k > g.n:
        return None
    rows = g.rows

    def extend(path: list[int], path_mask: int) -> Optional[list[int]]:
        start, last = path[0], path[-1]
        closing = len(path) == k - 1
        want = (1 << last) | ((1 << start) if closing else 0)
        candidates = rows[last] & ~path_mask & ~((1 << (start + 1)) - 1)
        for x in iter_bits(candidates):
            if rows[x] & path_mask != want:
                continue
            if closing:
                if path[1] < x:
                    return path + [x]
                continue
            found = extend(path + [x], path_mask | (1 << x))
            if found:
                return found
        return None

    for start in range(g.n):
        found = extend([start], 1 << start)
        if found:
            return found
    return None


def _refine(rows: Sequence[int], colors: list[int]) -> list[int]:
    """Colour refinement to the coarsest equitable partition finer than ``colors``."""
    n = len(rows)
    count = -1
    while True:
        signatures = [
            (colors[v], tuple(sorted(colors[w] for w in iter_bits(rows[v]))))
            for v in range(n)
        ]
        ranking = {sig: r for r, sig in enumerate(sorted(set(signatures)))}
        colors = [ranking[sig] for sig in signatures]
        if len(ranking) == count:
            return colors
        count = len(ranking)


def _twins(rows: Sequence[int], a: int, b: int) -> bool:
    return rows[a] & ~(1 << b) == rows[b] & ~(1 << a)


def canonical_form(g: Graph) -> tuple[int, tuple[int, ...]]:
    """
    Canonical code of ``g``: equal codes iff the graphs are isomorphic.

    Individualization-refinement over degree-refined colourings; the code is the
    lexicographically least relabelled row tuple over all leaves. Branches on
    twins inside the target cell are skipped since swapping twins is an
    automorphism fixing every individualized vertex.
    """
    rows = g.rows
    n = g.n
    best: list[Optional[tuple[int, ...]]] = [None]

    def leaf(colors: list[int]) -> None:
        order = sorted(range(n), key=colors.__getitem__)
        position = [0] * n
        for i, v in enumerate(order):
            position[v] = i
        code = tuple(mask_of(position[w] for w in iter_bits(rows[v])) for v in order)
        if best[0] is None or code < best[0]:
            best[0] = code

    def search(colors: list[int]) -> None:
        if len(set(colors)) == n:
            leaf(colors)
            return
        sizes: dict[int, int] = {}
        for c in colors:
            sizes[c] = sizes.get(c, 0) + 1
        target = min(c for c, size in sizes.items() if size > 1)
        cell = [v for v in range(n) if colors[v] == target]
        branches: list[int] = []
        for v in cell:
            if not any(_twins(rows, v, w) for w in branches):
                branches.append(v)
        for v in branches:
            split = [2 * c + 1 for c in colors]
            split[v] = 2 * colors[v]
            search(_refine(rows, split))

    if n == 0:
        return 0, ()
    search(_refine(rows, [0] * n))
    assert best[0] is not None
    return n, best[0]


def small_isomorphic(g: Graph, h: Graph, cap: int = 12) -> bool:
    """Isomorphism test for small graphs; cheap invariants first, then canonical codes."""
    if max(g.n, h.n) > cap:
        raise SizeCapError(f"isomorphism capped at {cap} vertices, got {g.n} and {h.n}")
    if g.n != h.n or g.edge_count() != h.edge_count():
        return False
    if sorted(g.degrees()) != sorted(h.degrees()):
        return False
    if is_cycle_graph(g, g.n) or is_cycle_graph(h, h.n):
        return is_cycle_graph(g, g.n) and is_cycle_graph(h, h.n)
    return canonical_form(g) == canonical_form(h)
