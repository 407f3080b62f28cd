"""
Pivoting, pivot-minor witnesses and the exhaustive pivot-orbit oracle.

Witness ops are recorded in source numbering. Replay keeps the full vertex
range and a live mask, so deleting a vertex never shifts any id.
"""

from __future__ import annotations

import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence, Union

from pivotcert.errors import FormatError, GraphError, SizeCapError, WitnessError
from pivotcert.formats import fingerprint, graph6_decode, graph6_encode
from pivotcert.graph import (
    Graph,
    canonical_form,
    find_induced_cycle,
    induced_subgraph,
    is_bipartite,
    is_cycle_graph,
    iter_bits,
    small_isomorphic,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Pivot:
    u: int
    v: int

    def to_dict(self) -> dict[str, Any]:
        return {"pivot": [self.u, self.v]}


@dataclass(frozen=True)
class Delete:
    v: int

    def to_dict(self) -> dict[str, Any]:
        return {"delete": self.v}


Op = Union[Pivot, Delete]


def op_from_dict(data: Any) -> Op:
    if not isinstance(data, dict) or len(data) != 1:
        raise FormatError(f"an op must be {{'pivot': [u, v]}} or {{'delete': v}}, got {data!r}")
    if "pivot" in data:
        pair = data["pivot"]
        if not isinstance(pair, list) or len(pair) != 2 or not all(isinstance(x, int) for x in pair):
            raise FormatError(f"pivot op needs two integer vertices, got {pair!r}")
        return Pivot(pair[0], pair[1])
    if "delete" in data:
        v = data["delete"]
        if not isinstance(v, int) or isinstance(v, bool):
            raise FormatError(f"delete op needs an integer vertex, got {v!r}")
        return Delete(v)
    raise FormatError(f"unknown op {data!r}")


def _swap_bits(mask: int, u: int, v: int) -> int:
    if (mask >> u ^ mask >> v) & 1:
        mask ^= (1 << u) | (1 << v)
    return mask


def _pivot_rows(rows: list[int], live: int, u: int, v: int) -> None:
    """Pivot ``uv`` in place on the live part of ``rows``."""
    nu = rows[u] & live & ~(1 << v)
    nv = rows[v] & live & ~(1 << u)
    v1 = nu & nv
    v2 = nu & ~nv
    v3 = nv & ~nu
    for w in iter_bits(v1):
        rows[w] ^= v2 | v3
    for w in iter_bits(v2):
        rows[w] ^= v1 | v3
    for w in iter_bits(v3):
        rows[w] ^= v1 | v2
    rows[u], rows[v] = rows[v], rows[u]
    for w in range(len(rows)):
        rows[w] = _swap_bits(rows[w], u, v)


def pivot(g: Graph, u: int, v: int) -> Graph:
    """
    Pivot the edge ``uv``: toggle adjacency across the classes
    N(u)∩N(v), N(u)−N(v)−{v}, N(v)−N(u)−{u}, then swap the labels of u and v.
    """
    g.check_vertex(u)
    g.check_vertex(v)
    if not g.adjacent(u, v):
        raise GraphError(f"cannot pivot non-edge {u}-{v}")
    rows = list(g.rows)
    _pivot_rows(rows, g.full_mask, u, v)
    return Graph.trusted(g.n, tuple(rows))


class Replayer:
    """Applies pivot/delete steps to a working copy of a source graph, recording them."""

    def __init__(self, source: Graph):
        self.source = source
        self._rows = list(source.rows)
        self.live = source.full_mask
        self.ops: list[Op] = []

    def is_live(self, v: int) -> bool:
        return 0 <= v < self.source.n and bool(self.live >> v & 1)

    def neighbors(self, v: int) -> int:
        return self._rows[v] & self.live

    def adjacent(self, u: int, v: int) -> bool:
        return bool((self._rows[u] & self.live) >> v & 1)

    def pivot(self, u: int, v: int) -> None:
        step = len(self.ops)
        for x in (u, v):
            if not self.is_live(x):
                raise WitnessError(f"pivot references dead or unknown vertex {x}", step)
        if not self.adjacent(u, v):
            raise WitnessError(f"pivot on non-edge {u}-{v}", step)
        _pivot_rows(self._rows, self.live, u, v)
        self.ops.append(Pivot(u, v))

    def delete(self, v: int) -> None:
        if not self.is_live(v):
            raise WitnessError(f"delete references dead or unknown vertex {v}", len(self.ops))
        self.live &= ~(1 << v)
        self.ops.append(Delete(v))

    def delete_all(self, vertices: Iterable[int]) -> None:
        for v in sorted(set(vertices)):
            self.delete(v)

    def delete_outside(self, keep: Iterable[int]) -> None:
        keep_mask = 0
        for v in keep:
            keep_mask |= 1 << v
        self.delete_all(iter_bits(self.live & ~keep_mask))

    def apply(self, op: Op) -> None:
        if isinstance(op, Pivot):
            self.pivot(op.u, op.v)
        else:
            self.delete(op.v)

    def current(self) -> Graph:
        """The working graph over the full id range, dead vertices isolated."""
        live = self.live
        rows = tuple(
            row & live if live >> v & 1 else 0 for v, row in enumerate(self._rows)
        )
        return Graph.trusted(self.source.n, rows)

    def result(self) -> tuple[Graph, tuple[int, ...]]:
        """The live part as a graph on 0..m-1, with its keep table."""
        if not self.live:
            return Graph.empty(0), ()
        return induced_subgraph(self.current(), iter_bits(self.live))


@dataclass(frozen=True)
class Witness:
    source: str
    fingerprint: str
    k: int
    ops: tuple[Op, ...] = field(default_factory=tuple)

    @classmethod
    def for_graph(cls, g: Graph, k: int, ops: Iterable[Op]) -> "Witness":
        return cls(graph6_encode(g), fingerprint(g), k, tuple(ops))

    def source_graph(self) -> Graph:
        return graph6_decode(self.source)

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": "witness",
            "source": self.source,
            "fingerprint": self.fingerprint,
            "k": self.k,
            "ops": [op.to_dict() for op in self.ops],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Witness":
        for key in ("source", "k", "ops"):
            if key not in data:
                raise FormatError(f"witness is missing field {key!r}")
        if not isinstance(data["source"], str):
            raise FormatError("witness source must be a graph6 string")
        if not isinstance(data["k"], int) or isinstance(data["k"], bool):
            raise FormatError(f"witness k must be an integer, got {data['k']!r}")
        if not isinstance(data["ops"], list):
            raise FormatError("witness ops must be a list")
        source = data["source"]
        digest = data.get("fingerprint") or fingerprint(graph6_decode(source))
        return cls(source, digest, data["k"], tuple(op_from_dict(op) for op in data["ops"]))


def apply_witness(g: Graph, w: Witness) -> tuple[Graph, tuple[int, ...]]:
    """Replay ``w`` on ``g``; returns the surviving graph and its keep table."""
    if fingerprint(g) != w.fingerprint:
        raise WitnessError("fingerprint mismatch: witness was built for a different graph")
    replay = Replayer(g)
    for op in w.ops:
        replay.apply(op)
    return replay.result()


def witness_problems(g: Graph, w: Witness) -> list[str]:
    """Reasons ``w`` fails to certify C_k in ``g``; empty when it verifies."""
    try:
        result, _ = apply_witness(g, w)
    except WitnessError as exc:
        return [str(exc)]
    if not is_cycle_graph(result, w.k):
        degrees = sorted(set(result.degrees()))
        return [
            f"replay ends with {result.n} vertices and degrees {degrees}, not a single cycle of length {w.k}"
        ]
    return []


def verify_ck_witness(g: Graph, w: Witness) -> bool:
    problems = witness_problems(g, w)
    for problem in problems:
        logger.info(f"Witness rejected: {problem}")
    return not problems


def _replay_result(g: Graph, ops: Iterable[Op]) -> Graph:
    replay = Replayer(g)
    for op in ops:
        replay.apply(op)
    return replay.result()[0]


def normalize_witness(w: Witness, iso_cap: int = 12) -> Witness:
    """
    Reorder ``w`` so every pivot precedes every delete.

    Deleting w commutes with pivoting uv for w outside {u, v}, so both
    orders end on the same graph. Results of at most ``iso_cap`` vertices
    are compared up to isomorphism, larger ones label for label.

    Raises:
        WitnessError: ``w`` does not replay, or the reordered replay ends elsewhere
    """
    g = w.source_graph()
    before = _replay_result(g, w.ops)
    pivots = [op for op in w.ops if isinstance(op, Pivot)]
    deletes = [op for op in w.ops if isinstance(op, Delete)]
    normal = Witness(w.source, w.fingerprint, w.k, tuple(pivots + deletes))
    after = _replay_result(g, normal.ops)
    if max(before.n, after.n) <= iso_cap:
        same = small_isomorphic(before, after, cap=iso_cap)
    else:
        same = before == after
    if not same:
        raise WitnessError("reordered witness replays to a different graph")
    return normal


@dataclass
class _Member:
    graph: Graph
    parent: Optional[tuple[int, tuple[int, ...]]]
    op: Optional[Pivot]


def _expand(graph: Graph) -> list[tuple[Pivot, Graph, tuple[int, tuple[int, ...]]]]:
    children = []
    for u, v in graph.edges():
        child = pivot(graph, u, v)
        children.append((Pivot(u, v), child, canonical_form(child)))
    return children


class OrbitIndex:
    """
    Breadth-first enumeration of the pivot orbit of a seed graph.

    One labelled representative is kept per isomorphism class together with
    the pivot that first produced it, so every representative can be traced
    back to the seed as a pivot sequence in seed numbering.
    """

    def __init__(self, seed: Graph, max_size: int = 1_000_000, threads: int = 1):
        self.seed = seed
        self.max_size = max_size
        self.threads = threads
        seed_key = canonical_form(seed)
        self.members: dict[tuple[int, tuple[int, ...]], _Member] = {
            seed_key: _Member(seed, None, None)
        }
        self._frontier: deque = deque([seed_key])
        self.complete = False

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, key: object) -> bool:
        return key in self.members

    def path_to(self, key: tuple[int, tuple[int, ...]]) -> list[Pivot]:
        ops: list[Pivot] = []
        member = self.members[key]
        while member.parent is not None:
            assert member.op is not None
            ops.append(member.op)
            member = self.members[member.parent]
        ops.reverse()
        return ops

    def _merge(self, parent_key, children) -> list:
        added = []
        for op, child, key in children:
            if key in self.members:
                continue
            if len(self.members) >= self.max_size:
                raise SizeCapError(f"pivot orbit exceeds {self.max_size} members")
            self.members[key] = _Member(child, parent_key, op)
            self._frontier.append(key)
            added.append(key)
        return added

    def grow(self) -> list:
        """Expand one breadth-first layer; returns keys of newly found members."""
        layer = list(self._frontier)
        self._frontier.clear()
        graphs = [self.members[key].graph for key in layer]
        if self.threads > 1 and len(layer) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                expansions = list(pool.map(_expand, graphs))
        else:
            expansions = map(_expand, graphs)
        added = []
        for key, children in zip(layer, expansions):
            added.extend(self._merge(key, children))
        if not self._frontier:
            self.complete = True
            logger.debug(f"Pivot orbit closed with {len(self.members)} classes")
        return added

    def enumerate(self) -> "OrbitIndex":
        while not self.complete:
            self.grow()
        return self

    def _cycle_in(self, key, k: int) -> Optional[tuple[list[Pivot], list[int]]]:
        cycle = find_induced_cycle(self.members[key].graph, k)
        if cycle is None:
            return None
        return self.path_to(key), cycle

    def find_cycle(self, k: int) -> Optional[tuple[list[Pivot], list[int]]]:
        """First member (breadth-first) with an induced C_k: its pivot path and the cycle."""
        for key in list(self.members):
            found = self._cycle_in(key, k)
            if found:
                return found
        while not self.complete:
            for key in self.grow():
                found = self._cycle_in(key, k)
                if found:
                    return found
        return None

    def cycle_lengths(self) -> set[int]:
        """Every k such that some orbit member has an induced C_k."""
        self.enumerate()
        lengths = set()
        for k in range(3, self.seed.n + 1):
            if any(find_induced_cycle(m.graph, k) for m in self.members.values()):
                lengths.add(k)
        return lengths


@dataclass(frozen=True)
class PivotMinorResult:
    found: bool
    witness: Optional[Witness]
    orbit_size: int

    def __bool__(self) -> bool:
        return self.found


def has_pivot_minor(
    g: Graph,
    k: int,
    max_n: int = 10,
    max_orbit: int = 1_000_000,
    threads: int = 1,
    orbit: Optional[OrbitIndex] = None,
) -> PivotMinorResult:
    """
    Exhaustive test for C_k as a pivot-minor of ``g``.

    Searches the normal form "pivots first, then deletions": every pivot-orbit
    member is checked for an induced C_k. A found cycle becomes a witness made
    of the member's pivot path followed by deleting every other vertex.

    Args:
        g: Graph to search
        k: Target cycle length (at least 3)
        max_n: Vertex cap
        max_orbit: Orbit size cap
        threads: Worker threads for frontier expansion
        orbit: A previously built index for ``g`` to reuse across several k

    Raises:
        SizeCapError: ``g`` is above ``max_n`` or the orbit outgrows ``max_orbit``
    """
    if k < 3:
        raise GraphError(f"cycle length must be at least 3, got {k}")
    if g.n > max_n:
        raise SizeCapError(f"pivot-minor oracle capped at {max_n} vertices, got {g.n}")
    if k > g.n:
        return PivotMinorResult(False, None, 0)
    if k % 2 == 1 and is_bipartite(g):
        logger.debug("Bipartite host cannot have an odd cycle as a pivot-minor")
        return PivotMinorResult(False, None, 0)

    index = orbit or OrbitIndex(g, max_size=max_orbit, threads=threads)
    found = index.find_cycle(k)
    if found is None:
        return PivotMinorResult(False, None, len(index))

    pivots, cycle = found
    replay = Replayer(g)
    for op in pivots:
        replay.pivot(op.u, op.v)
    replay.delete_outside(cycle)
    witness = Witness.for_graph(g, k, replay.ops)
    if not verify_ck_witness(g, witness):
        raise WitnessError("oracle produced a witness that does not replay to C_k")
    return PivotMinorResult(True, witness, len(index))


def lift_ops(ops: Sequence[Op], keep: Sequence[int]) -> list[Op]:
    """Translate ops on an induced subgraph back to the ids of its host."""
    lifted: list[Op] = []
    for op in ops:
        if isinstance(op, Pivot):
            lifted.append(Pivot(keep[op.u], keep[op.v]))
        else:
            lifted.append(Delete(keep[op.v]))
    return lifted
