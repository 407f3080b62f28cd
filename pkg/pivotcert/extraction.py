"""
Window sweeps along a dominating induced path.

Pivot mode returns a pure pair or a witness for C_k as a pivot-minor; hole
mode returns an anticomplete pair or a long hole. Both slide a window of
fixed width along the path, sort every off-path vertex by where its path
neighbours fall, and try the clauses in a fixed order. Every candidate is
verified before it is returned, and a candidate that fails is logged and
skipped.
"""

from __future__ import annotations

import logging
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence, Union

from pivotcert.constructions import classify_fan, cycle_reduce, fan_extract
from pivotcert.errors import (
    ConstructionError,
    FormatError,
    GraphError,
    PreconditionError,
    SweepFailure,
)
from pivotcert.graph import (
    Graph,
    PairKind,
    PurePair,
    check_pure_pair,
    component_masks,
    is_induced_cycle,
    is_induced_path,
    iter_bits,
    mask_of,
)
from pivotcert.pivot import Witness, witness_problems

logger = logging.getLogger(__name__)

HOLE_MIN_LENGTH = 5
RELAXED = "precondition relaxed"


@dataclass(frozen=True)
class Hole:
    order: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.order)

    def to_dict(self) -> dict[str, Any]:
        return {"type": "hole", "order": list(self.order), "length": len(self.order)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Hole":
        order = data.get("order")
        if not isinstance(order, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in order
        ):
            raise FormatError("hole order must be a list of integer vertices")
        return cls(tuple(order))


Certificate = Union[PurePair, Witness, Hole]


def verify_certificate(g: Graph, cert: Certificate, min_hole: int = HOLE_MIN_LENGTH) -> list[str]:
    """Reasons ``cert`` does not hold in ``g``; empty when it verifies."""
    if isinstance(cert, PurePair):
        return check_pure_pair(g, cert)
    if isinstance(cert, Witness):
        return witness_problems(g, cert)
    if isinstance(cert, Hole):
        try:
            if not is_induced_cycle(g, cert.order):
                return [f"order {list(cert.order)} is not an induced cycle"]
        except GraphError as exc:
            return [str(exc)]
        if len(cert) < min_hole:
            return [f"hole has length {len(cert)}, below {min_hole}"]
        return []
    return [f"unknown certificate type {type(cert).__name__}"]


def certificate_from_dict(data: Any) -> Certificate:
    if not isinstance(data, dict) or "type" not in data:
        raise FormatError("certificate must be a JSON object with a 'type' field")
    kind = data["type"]
    if kind == "pure_pair":
        return PurePair.from_dict(data)
    if kind == "witness":
        return Witness.from_dict(data)
    if kind == "hole":
        return Hole.from_dict(data)
    raise FormatError(f"unknown certificate type {kind!r}")


class _PathIndex:
    """Path labels 1..s and the sorted path-neighbour labels of every off-path vertex."""

    def __init__(self, g: Graph, p: Sequence[int]):
        self.g = g
        self.p = tuple(p)
        self.s = len(self.p)
        label = {v: j + 1 for j, v in enumerate(self.p)}
        path_mask = mask_of(self.p)
        self.off = [u for u in range(g.n) if not path_mask >> u & 1]
        self.labels = {
            u: sorted(label[w] for w in iter_bits(g.rows[u] & path_mask)) for u in self.off
        }

    def segment(self, lo: int, hi: int) -> list[int]:
        """Path vertices with labels lo..hi inclusive."""
        return list(self.p[lo - 1 : hi])


def _path_problems(g: Graph, p: Sequence[int]) -> list[str]:
    if not p:
        return ["path is empty"]
    try:
        if not is_induced_path(g, p):
            return ["p is not an induced path"]
    except GraphError as exc:
        return [str(exc)]
    path_mask = mask_of(p)
    stray = [u for u in range(g.n) if not path_mask >> u & 1 and not g.rows[u] & path_mask]
    if stray:
        return [f"p does not dominate vertices {stray[:5]}"]
    return []


@dataclass(frozen=True)
class SweepState:
    """
    Classes of the off-path vertices for window ``i``.

    With labels 1..s the window splits the path into U- = 1..i-1,
    U0 = i..i+width-1 and U+ = i+width..s. ``a`` touches U0; ``b`` touches
    both outer parts but not U0; ``c1``/``c2`` touch only U- and are split by
    the parity of m-; ``d1``/``d2`` touch only U+ and are split by whether
    m+ has the parity of k.
    """

    i: int
    width: int
    k: int
    a: frozenset[int]
    b: frozenset[int]
    c1: frozenset[int]
    c2: frozenset[int]
    d1: frozenset[int]
    d2: frozenset[int]
    m_minus: dict[int, int]
    m_plus: dict[int, int]

    @property
    def f(self) -> int:
        return len(self.c1) + len(self.c2)

    def c(self, j: int) -> frozenset[int]:
        return self.c1 if j == 1 else self.c2

    def d(self, j: int) -> frozenset[int]:
        return self.d1 if j == 1 else self.d2

    def classes(self) -> list[frozenset[int]]:
        return [self.a, self.b, self.c1, self.c2, self.d1, self.d2]


def _state(index: _PathIndex, i: int, k: int, width: int) -> SweepState:
    if not 1 <= i <= index.s - width + 1:
        raise PreconditionError([f"window index {i} outside 1..{index.s - width + 1}"])
    top = i + width
    groups: dict[str, list[int]] = {name: [] for name in ("a", "b", "c1", "c2", "d1", "d2")}
    m_minus: dict[int, int] = {}
    m_plus: dict[int, int] = {}
    for u in index.off:
        labels = index.labels[u]
        lo = bisect_left(labels, i)
        hi = bisect_left(labels, top)
        if lo:
            m_minus[u] = labels[lo - 1]
        if hi < len(labels):
            m_plus[u] = labels[hi]
        if hi > lo:
            groups["a"].append(u)
        elif lo and hi < len(labels):
            groups["b"].append(u)
        elif lo:
            groups["c1" if m_minus[u] % 2 else "c2"].append(u)
        elif hi < len(labels):
            groups["d1" if (m_plus[u] - k) % 2 == 0 else "d2"].append(u)
        else:
            raise PreconditionError([f"vertex {u} has no neighbour on the path"])
    state = SweepState(
        i, width, k, *(frozenset(groups[name]) for name in ("a", "b", "c1", "c2", "d1", "d2")),
        m_minus, m_plus,
    )
    covered = sum(len(part) for part in state.classes()) + index.s
    if covered != index.g.n:
        raise ConstructionError(f"window {i} classes cover {covered} of {index.g.n} vertices")
    return state


def build_sweep_state(
    g: Graph, p: Sequence[int], i: int, k: int, width: Optional[int] = None
) -> SweepState:
    """Classify every off-path vertex for window ``i`` (width defaults to ``k``)."""
    problems = _path_problems(g, p)
    if problems:
        raise PreconditionError(problems)
    return _state(_PathIndex(g, p), i, k, k if width is None else width)


class _Sweep:
    """Shared bookkeeping for one sweep: windows, thresholds, trace and candidate checks."""

    def __init__(
        self,
        g: Graph,
        p: Sequence[int],
        k: int,
        width: int,
        alpha: Fraction,
        eps: Fraction,
        min_hole: int,
        trace: list[str],
        anticomplete_only: bool = False,
    ):
        self.g = g
        self.n = g.n
        self.k = k
        self.width = width
        self.alpha = alpha
        self.eps = eps
        self.min_hole = min_hole
        self.trace = trace
        self.anticomplete_only = anticomplete_only
        self.need = max(Fraction(1), eps * g.n)
        self.index = _PathIndex(g, p)
        last = self.index.s - width + 1
        self.states = [_state(self.index, i, k, width) for i in range(1, last + 1)]

    def note(self, message: str) -> None:
        self.trace.append(message)
        logger.debug(message)

    def accept(self, cert: Certificate, clause: str) -> Optional[Certificate]:
        problems = verify_certificate(self.g, cert, min_hole=self.min_hole)
        if problems:
            self.note(f"{clause}: candidate rejected ({problems[0]})")
            return None
        self.note(f"{clause}: certificate found")
        return cert

    def pair(self, a: Iterable[int], b: Iterable[int], clause: str) -> Optional[PurePair]:
        a, b = frozenset(a), frozenset(b)
        if not a or not b or min(len(a), len(b)) < self.need:
            self.note(f"{clause}: sides {len(a)} and {len(b)} below {float(self.need):.3f}")
            return None
        b_mask = mask_of(b)
        touching = any(self.g.rows[x] & b_mask for x in a)
        if touching and self.anticomplete_only:
            self.note(f"{clause}: sides are joined by an edge")
            return None
        kind = PairKind.COMPLETE if touching else PairKind.ANTICOMPLETE
        return self.accept(PurePair(a, b, kind), clause)

    def cycle(self, order: Sequence[int], clause: str) -> Optional[Witness]:
        try:
            witness = cycle_reduce(self.g, order, self.k)
        except (PreconditionError, ConstructionError) as exc:
            self.note(f"{clause}: cycle candidate failed ({exc})")
            return None
        return self.accept(witness, clause)

    def fan(self, center: int, path: Sequence[int], clause: str) -> Optional[Witness]:
        if self.k < 5:
            self.note(f"{clause}: fan extraction needs k >= 5, skipped")
            return None
        try:
            witness = fan_extract(classify_fan(self.g, center, path), self.k)
        except (PreconditionError, ConstructionError, GraphError) as exc:
            self.note(f"{clause}: fan candidate failed ({exc})")
            return None
        return self.accept(witness, clause)

    def hole(self, order: Sequence[int], clause: str) -> Optional[Hole]:
        return self.accept(Hole(tuple(order)), clause)

    def path_halves(self) -> Optional[PurePair]:
        s = self.index.s
        if s < 2 * self.eps * self.n + 2:
            return None
        half = (s - 1) // 2
        p = self.index.p
        return self.pair(p[:half], p[half + 1 :], "path halves")

    def singletons(self) -> Optional[PurePair]:
        if self.eps * self.n > 1:
            return None
        if not self.anticomplete_only:
            return self.pair([0], [1], "single vertices")
        full = self.g.full_mask
        for u in range(self.n):
            miss = full & ~self.g.rows[u] & ~(1 << u)
            if miss:
                v = (miss & -miss).bit_length() - 1
                return self.pair([u], [v], "single vertices")
        self.note("single vertices: every pair is adjacent")
        return None

    def greedy_split(self, comps: list[int], clause: str) -> Optional[PurePair]:
        """Group pairwise anticomplete components into two sides of size >= need."""
        taken = 0
        for comp in comps:
            if taken.bit_count() >= self.need:
                break
            taken |= comp
        total = 0
        for comp in comps:
            total |= comp
        return self.pair(iter_bits(taken), iter_bits(total & ~taken), clause)


def _check_numbers(problems: list[str], strict: bool, what: str, trace: list[str]) -> None:
    if not problems:
        return
    if strict:
        raise PreconditionError(problems)
    for problem in problems:
        trace.append(f"{what} {RELAXED}: {problem}")
        logger.warning(f"{what} running best-effort: {problem}")


def relaxed_preconditions(trace: Iterable[str]) -> list[str]:
    """Trace lines recording a numeric precondition the sweep ran without."""
    return [line for line in trace if RELAXED in line]


def _validate(g: Graph, p: Sequence[int], k: int, alpha, eps) -> tuple[Fraction, Fraction]:
    problems = []
    if g.n < 2:
        problems.append(f"sweep needs at least 2 vertices, got {g.n}")
    if k < 3:
        problems.append(f"k must be at least 3, got {k}")
    alpha, eps = Fraction(alpha), Fraction(eps)
    if alpha <= 0:
        problems.append(f"alpha must be positive, got {alpha}")
    if eps <= 0:
        problems.append(f"eps must be positive, got {eps}")
    if problems:
        raise PreconditionError(problems)
    problems = _path_problems(g, p)
    if problems:
        raise PreconditionError(problems)
    return alpha, eps


def _measured_alpha(g: Graph, alpha: Fraction) -> Fraction:
    return max(alpha, Fraction(g.max_degree(), g.n))


def sweep_pivot_mode(
    g: Graph,
    p: Sequence[int],
    k: int,
    alpha,
    eps,
    strict: bool = True,
    trace: Optional[list[str]] = None,
) -> Certificate:
    """
    Sweep for a pure pair with sides >= eps·n or a witness for C_k.

    Clauses, first success wins:
      0. the path is long enough to split into two anticomplete halves, or
         eps·n <= 1 and any two vertices do;
      1. a B vertex whose two path arcs close a cycle of k's parity;
      2. a B vertex with opposite-parity neighbours on one side of the window
         spans a strongly k-good fan;
      3. a large B class either has an edge that spans a fan or cycle, or
         splits into two groups of components;
      4. at the first window where the C classes reach 6·eps·n, a C–D edge of
         equal index closes a cycle, or such a pair is itself large;
      5. components of C^j and D^(3-j) are either mixed (fan or cycle) or
         pure, and grouping them gives the pair.

    With ``strict`` false, numeric preconditions are logged and recorded in
    the trace rather than raised, and the measured degree ratio replaces a
    violated ``alpha``.

    Raises:
        PreconditionError: structural input problems, or numeric ones in strict mode
        SweepFailure: no clause produced a verified certificate
    """
    alpha, eps = _validate(g, p, k, alpha, eps)
    trace = trace if trace is not None else []
    numeric = []
    if g.max_degree() > alpha * g.n:
        numeric.append(f"max degree {g.max_degree()} exceeds alpha*n = {float(alpha * g.n):.3f}")
    if alpha >= Fraction(1, 2 * k):
        numeric.append(f"alpha {float(alpha):.4f} is not below 1/(2k)")
    if eps > (1 - (k + 3) * alpha) / 20:
        numeric.append(f"eps {float(eps):.4f} exceeds (1-(k+3)alpha)/20")
    if k < 5:
        numeric.append(f"k={k} below 5; fan clauses are skipped")
    _check_numbers(numeric, strict, "pivot sweep", trace)
    if not strict:
        alpha = _measured_alpha(g, alpha)

    run = _Sweep(g, p, k, k, alpha, eps, k, trace)
    found = run.path_halves() or run.singletons()
    if found:
        return found
    for clause in (_b_parity, _b_fans, _b_large, _c_d_window):
        found = clause(run)
        if found:
            logger.info(f"Pivot sweep returned a {type(found).__name__}")
            return found
    raise SweepFailure(f"pivot sweep found no certificate for k={k}", run.trace)


def _b_parity(run: _Sweep) -> Optional[Certificate]:
    for st in run.states:
        for u in sorted(st.b):
            lo, hi = st.m_minus[u], st.m_plus[u]
            if (hi - lo - run.k) % 2 == 0:
                found = run.cycle([u] + run.index.segment(lo, hi), f"B parity at window {st.i}")
                if found:
                    return found
    return None


def _b_fans(run: _Sweep) -> Optional[Certificate]:
    index = run.index
    for st in run.states:
        top = st.i + st.width
        for v in sorted(st.b):
            labels = index.labels[v]
            above = [x for x in labels if x >= top]
            for prev, b in zip(above, above[1:]):
                if (b - prev) % 2:
                    found = run.fan(v, index.segment(st.m_minus[v], b), f"upper fan at window {st.i}")
                    if found:
                        return found
                    break
            below = [x for x in labels if x < st.i][::-1]
            for nxt, a in zip(below, below[1:]):
                if (nxt - a) % 2:
                    found = run.fan(v, index.segment(a, st.m_plus[v]), f"lower fan at window {st.i}")
                    if found:
                        return found
                    break
    return None


def _b_edge(run: _Sweep, st: SweepState, u: int, v: int) -> Optional[Certificate]:
    seg = run.index.segment
    clause = f"B edge {u}-{v} at window {st.i}"
    if st.m_minus[u] != st.m_minus[v]:
        if st.m_minus[u] > st.m_minus[v]:
            u, v = v, u
        if st.m_plus[u] >= st.m_plus[v]:
            return run.fan(v, seg(st.m_minus[v], st.m_plus[u]) + [u], clause)
        return run.cycle(seg(st.m_minus[v], st.m_plus[u]) + [u, v], clause)
    if st.m_plus[u] == st.m_plus[v]:
        return None
    if st.m_plus[u] < st.m_plus[v]:
        u, v = v, u
    return run.fan(v, [u] + seg(st.m_minus[u], st.m_plus[v]), clause)


def _b_large(run: _Sweep) -> Optional[Certificate]:
    bound = 2 * (run.alpha + 2 * run.eps) * run.n
    rows = run.g.rows
    for st in run.states:
        if len(st.b) < bound:
            continue
        odd = [u for u in st.b if st.m_minus[u] % 2]
        even = [u for u in st.b if not st.m_minus[u] % 2]
        chosen = odd if len(odd) >= len(even) else even
        chosen_mask = mask_of(chosen)
        for u in sorted(chosen):
            for v in iter_bits(rows[u] & chosen_mask):
                if v > u:
                    found = _b_edge(run, st, u, v)
                    if found:
                        return found
        found = run.greedy_split(component_masks(run.g, chosen_mask), f"B components at window {st.i}")
        if found:
            return found
    return None


def _pick_window(run: _Sweep) -> Optional[SweepState]:
    if not run.states:
        return None
    low = 6 * run.eps * run.n
    high = (6 * run.eps + run.alpha) * run.n
    for st in run.states:
        if low <= st.f < high:
            return st
    run.note("no window has f in the expected band; using the first window past it")
    return next((st for st in run.states if st.f >= low), run.states[-1])


def _c_d_window(run: _Sweep) -> Optional[Certificate]:
    st = _pick_window(run)
    if st is None:
        return None
    rows = run.g.rows
    seg = run.index.segment
    for j in (1, 2):
        d_mask = mask_of(st.d(j))
        for u in sorted(st.c(j)):
            for v in iter_bits(rows[u] & d_mask):
                found = run.cycle(
                    [u] + seg(st.m_minus[u], st.m_plus[v]) + [v], f"C{j}-D{j} edge at window {st.i}"
                )
                if found:
                    return found
    for j in (1, 2):
        if min(len(st.c(j)), len(st.d(j))) >= run.need:
            found = run.pair(st.c(j), st.d(j), f"C{j}/D{j} at window {st.i}")
            if found:
                return found
    for j in sorted((1, 2), key=lambda j: -min(len(st.c(j)), len(st.d(3 - j)))):
        found = _components(run, st, j)
        if found:
            return found
    return None


def _mixed_c(run: _Sweep, st: SweepState, u: int, touch: int, comp: int) -> Optional[Certificate]:
    rows = run.g.rows
    seg = run.index.segment
    miss = comp & ~rows[u]
    for v in iter_bits(touch):
        far = rows[v] & miss
        if far:
            v2 = (far & -far).bit_length() - 1
            break
    else:
        return None
    clause = f"mixed C vertex {u} at window {st.i}"
    top = st.i + st.width
    mv = st.m_plus[v]
    odd = [x for x in run.index.labels[v] if x >= top and (x - mv) % 2]
    if odd:
        return run.fan(v, [u] + seg(st.m_minus[u], odd[0]), clause)
    if st.m_plus[v] <= st.m_plus[v2]:
        return run.fan(v, [u] + seg(st.m_minus[u], st.m_plus[v2]) + [v2], clause)
    return run.cycle([u] + seg(st.m_minus[u], st.m_plus[v2]) + [v2, v], clause)


def _mixed_d(run: _Sweep, st: SweepState, y: int, touch: int, comp: int) -> Optional[Certificate]:
    rows = run.g.rows
    seg = run.index.segment
    miss = comp & ~rows[y]
    for x in iter_bits(touch):
        far = rows[x] & miss
        if far:
            x2 = (far & -far).bit_length() - 1
            break
    else:
        return None
    clause = f"mixed D vertex {y} at window {st.i}"
    mx = st.m_minus[x]
    odd = [l for l in run.index.labels[x] if l < st.i and (mx - l) % 2]
    if odd:
        return run.fan(x, seg(odd[-1], st.m_plus[y]) + [y], clause)
    if st.m_minus[x] >= st.m_minus[x2]:
        return run.fan(x, [x2] + seg(st.m_minus[x2], st.m_plus[y]) + [y], clause)
    return run.cycle([x, x2] + seg(st.m_minus[x2], st.m_plus[y]) + [y], clause)


def _components(run: _Sweep, st: SweepState, j: int) -> Optional[Certificate]:
    c_mask = mask_of(st.c(j))
    d_mask = mask_of(st.d(3 - j))
    if not c_mask or not d_mask:
        return None
    rows = run.g.rows
    c_comps = component_masks(run.g, c_mask)
    d_comps = component_masks(run.g, d_mask)

    for u in iter_bits(c_mask):
        for comp in d_comps:
            touch = rows[u] & comp
            if touch and touch != comp:
                found = _mixed_c(run, st, u, touch, comp)
                if found:
                    return found
    for y in iter_bits(d_mask):
        for comp in c_comps:
            touch = rows[y] & comp
            if touch and touch != comp:
                found = _mixed_d(run, st, y, touch, comp)
                if found:
                    return found

    big_c = [c for c in c_comps if c.bit_count() >= run.need]
    big_d = [d for d in d_comps if d.bit_count() >= run.need]
    if big_c and big_d:
        found = run.pair(iter_bits(big_c[0]), iter_bits(big_d[0]), f"C{j}/D{3 - j} components")
        if found:
            return found
    sides = sorted((c_comps, d_comps), key=lambda comps: max(c.bit_count() for c in comps))
    for comps in sides:
        found = run.greedy_split(comps, f"grouped components at window {st.i}")
        if found:
            return found
    return None


def sweep_hole_mode(
    g: Graph,
    p: Sequence[int],
    L: int,
    alpha,
    eps,
    strict: bool = True,
    trace: Optional[list[str]] = None,
) -> Certificate:
    """
    Sweep for an anticomplete pair with sides >= eps·n or a hole of length >= L.

    The window has width L-2, so any B vertex closes a hole of length at
    least L+1 and any C–D edge one of length at least L+2. Without holes,
    the path halves or the first window with both C and D of size >= eps·n
    give the pair. Every pair returned here is anticomplete.
    """
    alpha, eps = _validate(g, p, 3, alpha, eps)
    trace = trace if trace is not None else []
    numeric = []
    if L < 3:
        raise PreconditionError([f"hole length bound must be at least 3, got {L}"])
    if g.max_degree() > alpha * g.n:
        numeric.append(f"max degree {g.max_degree()} exceeds alpha*n = {float(alpha * g.n):.3f}")
    if (L - 1) * alpha + 6 * eps > Fraction(1, 2):
        numeric.append("constants violate (L-1)*alpha + 6*eps <= 1/2")
    _check_numbers(numeric, strict, "hole sweep", trace)
    if not strict:
        alpha = _measured_alpha(g, alpha)

    run = _Sweep(g, p, L, L - 2, alpha, eps, L, trace, anticomplete_only=True)
    rows = g.rows
    seg = run.index.segment
    for st in run.states:
        for u in sorted(st.b):
            found = run.hole([u] + seg(st.m_minus[u], st.m_plus[u]), f"B hole at window {st.i}")
            if found:
                return found
        d_mask = mask_of(st.d1 | st.d2)
        for u in sorted(st.c1 | st.c2):
            for v in iter_bits(rows[u] & d_mask):
                found = run.hole(
                    [u] + seg(st.m_minus[u], st.m_plus[v]) + [v], f"C-D hole at window {st.i}"
                )
                if found:
                    return found

    found = run.path_halves() or run.singletons()
    if found:
        return found
    for st in run.states:
        c_side, d_side = st.c1 | st.c2, st.d1 | st.d2
        if min(len(c_side), len(d_side)) >= run.need:
            found = run.pair(c_side, d_side, f"C/D at window {st.i}")
            if found:
                logger.info("Hole sweep returned a pure pair")
                return found
    raise SweepFailure(f"hole sweep found no certificate for L={L}", run.trace)
