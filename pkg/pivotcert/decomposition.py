"""
Structural decomposition tools: dominating skeletons, weighted-tree splits,
connected pieces, stable-set trimming and the degree-bounded restriction finder.
"""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Union

from pivotcert.errors import ConstructionError, GraphError, PreconditionError
from pivotcert.graph import (
    Graph,
    PairKind,
    PurePair,
    complement,
    component_masks,
    is_connected,
    iter_bits,
)

logger = logging.getLogger(__name__)

QUARTER = Fraction(1, 4)
Weight = Union[Fraction, float, int]


@dataclass(frozen=True)
class Skeleton:
    """
    Rooted tree over part of the host plus an assignment of every host vertex
    to an adjacent tree vertex.

    ``parent`` maps each tree vertex to its parent, the root to None.
    """

    host: Graph
    root: int
    parent: dict[int, Optional[int]]
    rmap: tuple[int, ...]

    @property
    def tree_vertices(self) -> frozenset[int]:
        return frozenset(self.parent)

    def children(self) -> dict[int, list[int]]:
        kids: dict[int, list[int]] = {v: [] for v in self.parent}
        for v, p in self.parent.items():
            if p is not None:
                kids[p].append(v)
        for v in kids:
            kids[v].sort()
        return kids

    def root_path(self, v: int) -> list[int]:
        path = [v]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        path.reverse()
        return path

    def preimage(self, nodes) -> frozenset[int]:
        """Host vertices assigned to any of ``nodes``."""
        nodes = set(nodes)
        return frozenset(u for u, t in enumerate(self.rmap) if t in nodes)

    def weighted_tree(self) -> "WeightedTree":
        """The tree weighted by the share of host vertices assigned to each node."""
        counts = {v: 0 for v in self.parent}
        for t in self.rmap:
            counts[t] += 1
        n = self.host.n
        return WeightedTree(
            self.root,
            dict(self.parent),
            {v: Fraction(c, n) for v, c in counts.items()},
        )

    def to_dict(self) -> dict[str, Any]:
        parent = [None] * self.host.n
        for v, p in self.parent.items():
            parent[v] = v if p is None else p
        return {
            "type": "skeleton",
            "root": self.root,
            "parent": parent,
            "rmap": list(self.rmap),
        }


def dominating_skeleton(g: Graph, root: int) -> Skeleton:
    """
    Build a dominating skeleton by territory recursion.

    Processing a tree vertex t with territory C assigns every neighbour of t in
    C to t, splits the rest of C into components, hands each component to its
    lowest-index adjacent connector, and makes every connector that received
    something a child of t with those components as its territory.
    """
    g.check_vertex(root)
    if not is_connected(g):
        raise GraphError("dominating skeleton needs a connected graph")

    rmap = [-1] * g.n
    rmap[root] = root
    parent: dict[int, Optional[int]] = {root: None}
    stack = [(root, g.full_mask & ~(1 << root))]
    while stack:
        t, territory = stack.pop()
        connectors = g.rows[t] & territory
        for x in iter_bits(connectors):
            rmap[x] = t
        handed: dict[int, int] = {}
        for comp in component_masks(g, territory & ~connectors):
            boundary = 0
            for w in iter_bits(comp):
                boundary |= g.rows[w]
            boundary &= connectors
            if not boundary:
                raise ConstructionError(f"territory component of {t} does not touch its neighbourhood")
            x = (boundary & -boundary).bit_length() - 1
            handed[x] = handed.get(x, 0) | comp
        for x in sorted(handed, reverse=True):
            parent[x] = t
            stack.append((x, handed[x]))

    logger.debug(f"Skeleton rooted at {root} spans {len(parent)} tree vertices")
    return Skeleton(g, root, parent, tuple(rmap))


def check_skeleton(sk: Skeleton) -> list[str]:
    """Reasons ``sk`` breaks the skeleton contract; empty when valid."""
    g = sk.host
    failures: list[str] = []
    if sk.parent.get(sk.root, 0) is not None:
        return [f"root {sk.root} must be a tree vertex without parent"]

    kids = sk.children()
    ancestors = {sk.root: 1 << sk.root}
    order = [sk.root]
    for v in order:
        for c in kids[v]:
            ancestors[c] = ancestors[v] | (1 << c)
            order.append(c)
    if len(order) != len(sk.parent):
        failures.append("parent map does not form a tree reachable from the root")
        return failures

    for v, p in sk.parent.items():
        if p is None:
            continue
        if not g.adjacent(v, p):
            failures.append(f"tree edge {p}-{v} is not a host edge")
        if g.rows[v] & ancestors[p] != 1 << p:
            failures.append(f"root path to {v} is not induced")

    if len(sk.rmap) != g.n:
        failures.append(f"rmap covers {len(sk.rmap)} vertices, host has {g.n}")
        return failures
    if sk.rmap[sk.root] != sk.root:
        failures.append("rmap(root) must be the root")
    for u, t in enumerate(sk.rmap):
        if u == sk.root:
            continue
        if t not in sk.parent:
            failures.append(f"rmap({u})={t} is not a tree vertex")
        elif not g.adjacent(u, t):
            failures.append(f"rmap({u})={t} is not a neighbour of {u}")
    if failures:
        return failures

    for x, y in g.edges():
        a, b = sk.rmap[x], sk.rmap[y]
        if not (ancestors[a] >> b & 1 or ancestors[b] >> a & 1):
            failures.append(f"edge {x}-{y} maps to unrelated tree vertices {a} and {b}")
    return failures


@dataclass(frozen=True)
class WeightedTree:
    root: int
    parent: dict[int, Optional[int]]
    weight: dict[int, Weight]

    def children(self) -> dict[int, list[int]]:
        kids: dict[int, list[int]] = {v: [] for v in self.parent}
        for v, p in self.parent.items():
            if p is not None:
                kids[p].append(v)
        for v in kids:
            kids[v].sort()
        return kids

    def preorder(self) -> list[int]:
        kids = self.children()
        order = [self.root]
        for v in order:
            order.extend(kids[v])
        return order

    def subtree(self, v: int) -> frozenset[int]:
        kids = self.children()
        nodes = [v]
        for x in nodes:
            nodes.extend(kids[x])
        return frozenset(nodes)

    def total(self, nodes) -> Weight:
        return sum((self.weight[v] for v in nodes), Fraction(0))

    def check(self) -> list[str]:
        failures: list[str] = []
        if set(self.parent) != set(self.weight):
            failures.append("parent and weight maps cover different nodes")
            return failures
        if self.parent.get(self.root, 0) is not None:
            failures.append(f"root {self.root} must have no parent")
            return failures
        if len(self.preorder()) != len(self.parent):
            failures.append("parent map is not a tree reachable from the root")
        negative = [v for v, w in self.weight.items() if w < 0]
        if negative:
            failures.append(f"negative weights on {sorted(negative)}")
        total = self.total(self.weight)
        exact = all(isinstance(w, (int, Fraction)) for w in self.weight.values())
        if (exact and total != 1) or (not exact and abs(float(total) - 1) > 1e-9):
            failures.append(f"weights sum to {total}, not 1")
        return failures


@dataclass(frozen=True)
class RootPath:
    nodes: tuple[int, ...]
    weight: Weight


@dataclass(frozen=True)
class UnrelatedSets:
    a: frozenset[int]
    b: frozenset[int]
    weight_a: Weight
    weight_b: Weight


def heavy_path_or_unrelated(tree: WeightedTree) -> Union[RootPath, UnrelatedSets]:
    """
    Either a root path of weight >= 1/4 or two unrelated node sets of weight >= 1/4 each.

    The heaviest root path is found first. Failing that, the nodes whose
    subtree weighs >= 1/4 form an ancestor-closed core: two core leaves give two
    disjoint subtrees; a single core leaf means the core is a light root path,
    and the subtrees hanging off it are packed greedily into one side.
    """
    failures = tree.check()
    if failures:
        raise PreconditionError(failures)
    kids = tree.children()
    order = tree.preorder()

    along: dict[int, Weight] = {}
    for v in order:
        p = tree.parent[v]
        along[v] = tree.weight[v] + (along[p] if p is not None else 0)
    heaviest = min(order, key=lambda v: (-along[v], v))
    if along[heaviest] >= QUARTER:
        nodes = []
        v: Optional[int] = heaviest
        while v is not None:
            nodes.append(v)
            v = tree.parent[v]
        return RootPath(tuple(reversed(nodes)), along[heaviest])

    below: dict[int, Weight] = {}
    for v in reversed(order):
        below[v] = tree.weight[v] + sum((below[c] for c in kids[v]), Fraction(0))
    core = {v for v in order if below[v] >= QUARTER}
    leaves = sorted(v for v in core if not any(c in core for c in kids[v]))
    if len(leaves) >= 2:
        a, b = tree.subtree(leaves[0]), tree.subtree(leaves[1])
        return UnrelatedSets(a, b, below[leaves[0]], below[leaves[1]])

    fringe = sorted(c for v in core for c in kids[v] if c not in core)
    side_a: set[int] = set()
    weight_a: Weight = Fraction(0)
    split = len(fringe)
    for i, c in enumerate(fringe):
        side_a |= tree.subtree(c)
        weight_a += below[c]
        if weight_a >= QUARTER:
            split = i + 1
            break
    side_b: set[int] = set()
    for c in fringe[split:]:
        side_b |= tree.subtree(c)
    return UnrelatedSets(frozenset(side_a), frozenset(side_b), weight_a, tree.total(side_b))


def check_tree_split(tree: WeightedTree, result: Union[RootPath, UnrelatedSets]) -> list[str]:
    """Reasons ``result`` is not a valid split of ``tree``; empty when valid."""
    failures: list[str] = []
    if isinstance(result, RootPath):
        nodes = result.nodes
        if not nodes or nodes[0] != tree.root:
            failures.append("path does not start at the root")
        for p, c in zip(nodes, nodes[1:]):
            if tree.parent.get(c) != p:
                failures.append(f"{c} is not a child of {p}")
        if tree.total(nodes) < QUARTER:
            failures.append(f"path weight {tree.total(nodes)} is below 1/4")
        return failures

    if not result.a or not result.b:
        failures.append("unrelated sets must be nonempty")
    if result.a & result.b:
        failures.append("unrelated sets overlap")
    for name, side in (("A", result.a), ("B", result.b)):
        if tree.total(side) < QUARTER:
            failures.append(f"side {name} weighs {tree.total(side)}, below 1/4")
    ancestors: dict[int, set[int]] = {}
    for v in tree.preorder():
        p = tree.parent[v]
        ancestors[v] = {v} | (ancestors[p] if p is not None else set())
    for x in result.a:
        related = ancestors[x] & result.b
        if related:
            failures.append(f"{x} in A is related to {min(related)} in B")
            break
    for y in result.b:
        related = ancestors[y] & result.a
        if related:
            failures.append(f"{y} in B is related to {min(related)} in A")
            break
    return failures


@dataclass(frozen=True)
class ConnectedPiece:
    vertices: frozenset[int]


def connected_or_purepair(g: Graph) -> Union[ConnectedPiece, PurePair]:
    """A connected induced piece on >= n/3 vertices, or an anticomplete pair with sides >= n/3."""
    if g.n < 1:
        raise GraphError("connected_or_purepair needs at least one vertex")
    comps = component_masks(g)
    largest = max(comps, key=lambda c: (c.bit_count(), -c))
    if 3 * largest.bit_count() >= g.n:
        return ConnectedPiece(frozenset(iter_bits(largest)))
    packed = 0
    for comp in comps:
        packed |= comp
        if 3 * packed.bit_count() >= g.n:
            break
    rest = g.full_mask & ~packed
    return PurePair(frozenset(iter_bits(packed)), frozenset(iter_bits(rest)), PairKind.ANTICOMPLETE)


def stable_trim(g: Graph, u, eps: Weight) -> frozenset[int]:
    """
    Keep the vertices of ``u`` whose degree inside g[u] is at most 2·eps·|u|.

    When g[u] spans at most eps·C(|u|,2) edges the kept set has at least |u|/2
    vertices and maximum degree at most 4·eps·|U'|. A violated precondition is
    logged and the trim is still returned.
    """
    eps = Fraction(eps)
    u_mask = g.check_set(u)
    size = u_mask.bit_count()
    if size == 0:
        return frozenset()
    inner = {v: (g.rows[v] & u_mask).bit_count() for v in iter_bits(u_mask)}
    edges = sum(inner.values()) // 2
    if edges > eps * size * (size - 1) / 2:
        logger.warning(f"stable_trim: {edges} edges exceed eps*C({size},2); set is not eps-stable")
    kept = frozenset(v for v, d in inner.items() if d <= 2 * eps * size)
    kept_mask = 0
    for v in kept:
        kept_mask |= 1 << v
    worst = max(((g.rows[v] & kept_mask).bit_count() for v in kept), default=0)
    if 2 * len(kept) < size or worst > 4 * eps * len(kept):
        logger.warning(
            f"stable_trim: kept {len(kept)} of {size} with max degree {worst}; trim guarantee not met"
        )
    return kept


class Side(str, enum.Enum):
    DIRECT = "direct"
    COMPLEMENT = "complement"


@dataclass(frozen=True)
class Restriction:
    vertices: frozenset[int]
    side: Side
    fraction: float


def _greedy_restriction(h: Graph, alpha: Fraction) -> int:
    alive = h.full_mask
    size = h.n
    degree = h.degrees()
    while size:
        top = max(iter_bits(alive), key=lambda v: (degree[v], -v))
        if degree[top] <= alpha * size:
            break
        alive &= ~(1 << top)
        size -= 1
        for w in iter_bits(h.rows[top] & alive):
            degree[w] -= 1
    return alive


def restriction_finder(g: Graph, alpha: Weight) -> Restriction:
    """
    Largest set found where g or its complement has maximum degree <= alpha·|U|.

    Both sides run the greedy "drop a maximum-degree vertex" loop concurrently;
    there is no size guarantee, so the achieved fraction is reported.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise PreconditionError([f"alpha must lie in (0, 1), got {alpha}"])
    if g.n < 1:
        raise GraphError("restriction_finder needs at least one vertex")
    views = {Side.DIRECT: g, Side.COMPLEMENT: complement(g)}
    with ThreadPoolExecutor(max_workers=2) as pool:
        found = dict(zip(views, pool.map(lambda h: _greedy_restriction(h, alpha), views.values())))
    side = max(views, key=lambda s: (found[s].bit_count(), s is Side.DIRECT))
    alive = found[side]
    h = views[side]
    size = alive.bit_count()
    worst = max((h.rows[v] & alive).bit_count() for v in iter_bits(alive))
    if worst > alpha * size:
        raise ConstructionError(f"restriction postcondition failed: degree {worst} > {alpha}*{size}")
    logger.info(f"Restriction kept {size}/{g.n} vertices on the {side.value} side")
    return Restriction(frozenset(iter_bits(alive)), side, size / g.n)
