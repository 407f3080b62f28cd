"""
Constructive extractors: long same-parity cycles, anti-holes and strongly
k-good fans each yield a verified witness for C_k as a pivot-minor.

Every extractor drives a Replayer, so each recorded step is applied to the
live graph immediately and the structure it promises is re-checked there.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from pivotcert.errors import ConstructionError, GraphError, PreconditionError
from pivotcert.graph import Graph, is_induced_cycle, is_induced_path, mask_of
from pivotcert.pivot import Op, Replayer, Witness, witness_problems

logger = logging.getLogger(__name__)


def antihole_bound(k: int) -> int:
    """Smallest anti-hole length the extractor accepts for C_k: ceil(3k/2) + 6."""
    return (3 * k + 1) // 2 + 6


def _verified(host: Graph, k: int, ops: Sequence[Op]) -> Witness:
    witness = Witness.for_graph(host, k, ops)
    problems = witness_problems(host, witness)
    if problems:
        raise ConstructionError(f"extracted witness does not verify: {problems[0]}")
    return witness


def _reduce_cycle(replay: Replayer, cycle: Sequence[int], k: int) -> None:
    """Delete everything off ``cycle``, then shorten it by two per round down to k."""
    cycle = list(cycle)
    if len(cycle) < k or (len(cycle) - k) % 2:
        raise ConstructionError(f"cannot reduce a {len(cycle)}-cycle to C_{k}")
    if not is_induced_cycle(replay.current(), cycle):
        raise ConstructionError(f"{cycle} is not an induced cycle of the working graph")
    replay.delete_outside(cycle)
    while len(cycle) > k:
        x, y = cycle[0], cycle[1]
        replay.pivot(x, y)
        replay.delete(x)
        replay.delete(y)
        cycle = cycle[2:]
        if not is_induced_cycle(replay.current(), cycle):
            raise ConstructionError(f"round left no induced {len(cycle)}-cycle")
        logger.debug(f"Cycle shortened to length {len(cycle)}")


def cycle_reduce(host: Graph, cycle_order: Sequence[int], k: int) -> Witness:
    """
    Witness for C_k from an induced cycle of length m >= k with m ≡ k (mod 2).

    Each round pivots a cycle edge and deletes both ends, which leaves an
    induced cycle two shorter.
    """
    problems = []
    m = len(cycle_order)
    if k < 3:
        problems.append(f"k must be at least 3, got {k}")
    if m < k:
        problems.append(f"cycle length {m} is below k={k}")
    if (m - k) % 2:
        problems.append(f"parity mismatch: cycle length {m}, k={k}")
    try:
        if m >= 3 and not is_induced_cycle(host, cycle_order):
            problems.append("order is not an induced cycle of the host")
    except GraphError as exc:
        problems.append(str(exc))
    if problems:
        raise PreconditionError(problems)

    replay = Replayer(host)
    _reduce_cycle(replay, cycle_order, k)
    return _verified(host, k, replay.ops)


@dataclass(frozen=True)
class STCycleEmbedding:
    """An (s,t)-cycle: C_s on ``order`` with the first ``t`` vertices partially complemented."""

    host: Graph
    order: tuple[int, ...]
    t: int

    @classmethod
    def from_order(cls, host: Graph, order: Sequence[int], t: int) -> "STCycleEmbedding":
        embedding = cls(host, tuple(order), t)
        problems = embedding.check()
        if problems:
            raise PreconditionError(problems)
        return embedding

    @property
    def s(self) -> int:
        return len(self.order)

    def check(self) -> list[str]:
        failures: list[str] = []
        s = self.s
        if s < 3:
            return [f"an (s,t)-cycle needs s >= 3, got {s}"]
        if not 0 <= self.t <= s:
            return [f"t={self.t} outside 0..{s}"]
        if len(set(self.order)) != s:
            return ["repeated vertices in order"]
        if any(not 0 <= v < self.host.n for v in self.order):
            return ["order references vertices outside the host"]
        order_mask = mask_of(self.order)
        x_mask = mask_of(self.order[: self.t])
        for i, v in enumerate(self.order):
            ring = (1 << self.order[i - 1]) | (1 << self.order[(i + 1) % s])
            expected = ring ^ (x_mask & ~(1 << v)) if i < self.t else ring
            if self.host.rows[v] & order_mask != expected:
                failures.append(f"vertex {v} at position {i + 1} breaks the ({s},{self.t})-cycle pattern")
                break
        return failures


def st_cycle_reduce(e: STCycleEmbedding) -> tuple[list[Op], STCycleEmbedding]:
    """
    Turn an (s,t)-cycle with t >= 6 into an (s-2, t-6)-cycle.

    With v1..vs the order, pivot v2 v_{t-1} and delete both. The survivors
    form the cycle v1, v3, v4..v_{t-3}, v_{t-2}, v_t, v_{t+1}..v_s whose
    complemented run is v4..v_{t-3}; the returned order starts with that run.
    """
    problems = e.check()
    if e.t < 6:
        problems.append(f"t must be at least 6, got {e.t}")
    if problems:
        raise PreconditionError(problems)

    order, t = e.order, e.t
    u, v = order[1], order[t - 2]
    replay = Replayer(e.host)
    replay.pivot(u, v)
    replay.delete(u)
    replay.delete(v)
    new_order = (
        order[3 : t - 3] + (order[t - 3], order[t - 1]) + order[t:] + (order[0], order[2])
    )
    reduced = STCycleEmbedding(replay.current(), new_order, t - 6)
    failures = reduced.check()
    if failures:
        raise ConstructionError(f"(s,t)-cycle reduction broke the embedding: {failures[0]}")
    return replay.ops, reduced


def antihole_extract(host: Graph, antihole_order: Sequence[int], k: int) -> Witness:
    """
    Witness for C_k from an induced anti-hole of length m >= ceil(3k/2) + 6.

    ``i = ceil((k-2)/4)`` rounds of the (s,t)-cycle reduction leave an
    (m-2i, m-6i)-cycle; its uncomplemented run of 4i vertices closes through
    the two ends of the complemented run into an induced (4i+2)-cycle. Odd k
    pivots that cycle against a common neighbour inside the run first.
    """
    order = tuple(antihole_order)
    m = len(order)
    problems = []
    if k < 3:
        problems.append(f"k must be at least 3, got {k}")
    if m < antihole_bound(k):
        problems.append(f"anti-hole length {m} is below {antihole_bound(k)} required for k={k}")
    embedding = STCycleEmbedding(host, order, m)
    problems.extend(f"not an induced anti-hole: {p}" for p in embedding.check())
    if problems:
        raise PreconditionError(problems)

    rounds = (k + 1) // 4
    ops: list[Op] = []
    for _ in range(rounds):
        fragment, embedding = st_cycle_reduce(embedding)
        ops.extend(fragment)

    replay = Replayer(host)
    for op in ops:
        replay.apply(op)

    run = embedding.order[: embedding.t]
    rest = list(embedding.order[embedding.t :])
    y, x = run[0], run[-1]
    cycle = rest + [y, x]

    if k % 2 == 0:
        _reduce_cycle(replay, cycle, k)
        return _verified(host, k, replay.ops)

    current = replay.current()
    others = mask_of(cycle) & ~(1 << x) & ~(1 << y)
    candidates = [
        z
        for z in run[1:-1]
        if current.adjacent(z, x) and current.adjacent(z, y) and not current.rows[z] & others
    ]
    if not candidates:
        raise ConstructionError("no common neighbour of the run ends inside the run")
    z = min(candidates)
    replay.delete_outside(cycle + [z])
    replay.pivot(y, z)
    replay.delete(y)
    replay.delete(z)
    _reduce_cycle(replay, rest + [x], k)
    return _verified(host, k, replay.ops)


@dataclass(frozen=True)
class FanDescriptor:
    host: Graph
    center: int
    main_path: tuple[int, ...]
    intervals: tuple[int, ...]

    @property
    def attachments(self) -> list[int]:
        """Path positions adjacent to the center, in path order."""
        positions = [0]
        for a in self.intervals:
            positions.append(positions[-1] + a)
        return positions

    def is_k_good(self, k: int) -> bool:
        return self.intervals[0] >= k - 2 or self.intervals[-1] >= k - 2

    def is_strongly_k_good(self, k: int) -> bool:
        a = self.intervals
        if len(a) < 2:
            return False
        return (a[0] >= k - 2 and a[-1] % 2 == 1) or (a[-1] >= k - 2 and a[0] % 2 == 1)

    def reversed(self) -> "FanDescriptor":
        return FanDescriptor(
            self.host, self.center, self.main_path[::-1], self.intervals[::-1]
        )


def classify_fan(host: Graph, center: int, main_path: Sequence[int]) -> FanDescriptor:
    """Compute the interval lengths of a generalized fan, validating its shape."""
    path = tuple(main_path)
    problems = []
    if len(path) < 2:
        problems.append("main path needs at least one edge")
    if center in path:
        problems.append(f"center {center} lies on the main path")
    if problems:
        raise PreconditionError(problems)
    host.check_vertex(center)
    if not is_induced_path(host, path):
        problems.append("main path is not an induced path of host minus center")
    if not (host.adjacent(center, path[0]) and host.adjacent(center, path[-1])):
        problems.append("center is not adjacent to both ends of the main path")
    if problems:
        raise PreconditionError(problems)

    touching = [j for j, v in enumerate(path) if host.adjacent(center, v)]
    intervals = tuple(b - a for a, b in zip(touching, touching[1:]))
    return FanDescriptor(host, center, path, intervals)


def fan_extract(f: FanDescriptor, k: int) -> Witness:
    """
    Witness for C_k from a strongly k-good fan (k >= 5).

    The fan is oriented so the first interval is long and the last one odd,
    then repeatedly: close the first interval into a cycle if its parity fits;
    cut at an odd interior interval; shorten a long later interval by pivoting
    an internal edge; or pivot away the final length-1 interval.
    """
    problems = []
    if k < 5:
        problems.append(f"fan extraction needs k >= 5, got {k}")
    if not f.is_strongly_k_good(k):
        problems.append(f"fan with intervals {f.intervals} is not strongly {k}-good")
    if problems:
        raise PreconditionError(problems)
    a = f.intervals
    if not (a[0] >= k - 2 and a[-1] % 2 == 1):
        f = f.reversed()

    center = f.center
    path = list(f.main_path)
    replay = Replayer(f.host)
    replay.delete_outside([center] + path)

    while True:
        fan = classify_fan(replay.current(), center, path)
        a = fan.intervals
        s = len(a)
        touching = fan.attachments
        logger.debug(f"Fan step with intervals {a}")

        if a[0] % 2 == k % 2:
            _reduce_cycle(replay, [center] + path[: a[0] + 1], k)
            break

        odd = next((i for i in range(1, s - 1) if a[i] % 2 == 1), None)
        if odd is not None:
            cut = touching[odd + 1]
            replay.delete_all(path[cut + 1 :])
            path = path[: cut + 1]
            continue

        stretch = next((i for i in range(1, s) if a[i] >= 3), None)
        if stretch is not None:
            start = touching[stretch]
            u, v = path[start + 1], path[start + 2]
            replay.pivot(u, v)
            replay.delete(u)
            replay.delete(v)
            path = path[: start + 1] + path[start + 3 :]
            continue

        x, y = path[-2], path[-1]
        replay.pivot(x, y)
        replay.delete(x)
        replay.delete(y)
        if s == 2:
            _reduce_cycle(replay, [center] + path[:-2], k)
            break
        path = path[:-2]

    return _verified(f.host, k, replay.ops)
