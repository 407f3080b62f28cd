"""
End-to-end certificate pipeline for graphs without C_k as a pivot-minor.

restriction -> connected piece -> dominating skeleton -> heavy path or
unrelated split -> window sweep -> (anti-hole extraction). Every stage
result is re-checked, and the final certificate is verified against the
input graph before a report is returned.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Any, Iterable, Optional, Sequence

from pivotcert.config import Settings
from pivotcert.constructions import antihole_bound, antihole_extract
from pivotcert.decomposition import (
    ConnectedPiece,
    Restriction,
    RootPath,
    Side,
    check_skeleton,
    check_tree_split,
    connected_or_purepair,
    dominating_skeleton,
    heavy_path_or_unrelated,
    restriction_finder,
    stable_trim,
)
from pivotcert.errors import ConstructionError, PreconditionError, SweepFailure
from pivotcert.extraction import (
    Certificate,
    Hole,
    relaxed_preconditions,
    sweep_hole_mode,
    sweep_pivot_mode,
    verify_certificate,
)
from pivotcert.formats import fingerprint
from pivotcert.graph import (
    Graph,
    PairKind,
    PurePair,
    complement,
    induced_subgraph,
    iter_bits,
    mask_of,
)
from pivotcert.pivot import Delete, Op, Witness, lift_ops

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConstantsBundle:
    k: int
    L: int
    alpha: Fraction
    alpha_hole: Fraction
    eps0: Fraction
    eps: Fraction
    delta: Fraction

    def check(self) -> list[str]:
        failures: list[str] = []
        if 4 * self.alpha > self.alpha_hole:
            failures.append("4*alpha exceeds the hole-mode alpha")
        if self.alpha >= Fraction(1, 8 * self.k):
            failures.append("alpha is not below 1/(8k)")
        bound = min(
            self.delta / 12,
            (1 - 4 * (self.k + 3) * self.alpha) * self.delta / 240,
            self.eps0 * self.delta / 12,
        )
        if not 0 < self.eps < bound:
            failures.append(f"eps {float(self.eps):.3g} is not below {float(bound):.3g}")
        if (self.L - 1) * self.alpha_hole + 6 * self.eps0 > Fraction(1, 2):
            failures.append("hole-mode constants violate (L-1)*alpha + 6*eps <= 1/2")
        return failures

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "L": self.L,
            "alpha": float(self.alpha),
            "alpha_hole": float(self.alpha_hole),
            "eps0": float(self.eps0),
            "eps": float(self.eps),
            "delta": float(self.delta),
        }


def make_constants(k: int, delta_measured=1) -> ConstantsBundle:
    """
    Constants for a run at cycle length ``k`` and measured restriction fraction ``delta``.

    ``alpha`` is the largest power of two with 4·alpha <= alpha_hole and
    alpha < 1/(8k); ``eps`` sits just below the smallest of its three bounds.
    """
    problems = []
    if k < 3:
        problems.append(f"k must be at least 3, got {k}")
    delta = Fraction(delta_measured)
    if not 0 < delta <= 1:
        problems.append(f"delta must lie in (0, 1], got {delta_measured}")
    if problems:
        raise PreconditionError(problems)

    L = antihole_bound(k)
    alpha_hole = Fraction(1, 8 * (L + 2))
    eps0 = Fraction(1, 48)
    alpha = Fraction(1, 2)
    while 4 * alpha > alpha_hole or alpha >= Fraction(1, 8 * k):
        alpha /= 2
    eps = Fraction(99, 100) * min(
        delta / 12,
        (1 - 4 * (k + 3) * alpha) * delta / 240,
        eps0 * delta / 12,
    )
    bundle = ConstantsBundle(k, L, alpha, alpha_hole, eps0, eps, delta)
    failures = bundle.check()
    if failures:
        raise ConstructionError(f"infeasible constants for k={k}: {failures[0]}")
    return bundle


@dataclass
class RunReport:
    fingerprint: str
    k: int
    n: int
    constants: Optional[ConstantsBundle]
    trace: list[str] = field(default_factory=list)
    certificate: Optional[Certificate] = None
    branch: str = ""
    sizes: dict[str, float] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.certificate is not None

    @property
    def status(self) -> str:
        return "certified" if self.ok else "failed"

    @property
    def preconditions_relaxed(self) -> bool:
        """True when a sweep ran without one of its numeric preconditions."""
        return bool(relaxed_preconditions(self.trace))

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": "run_report",
            "fingerprint": self.fingerprint,
            "k": self.k,
            "n": self.n,
            "status": self.status,
            "branch": self.branch,
            "preconditions_relaxed": self.preconditions_relaxed,
            "constants": self.constants.to_dict() if self.constants else None,
            "trace": list(self.trace),
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "sizes": dict(self.sizes),
            "wall_time": round(self.wall_time, 6),
        }


def _view(g: Graph, side: Side) -> Graph:
    return g if side is Side.DIRECT else complement(g)


def _restrict(g: Graph, alpha: float, trace: list[str]) -> Restriction:
    """Greedy restriction, replaced by a stable-set trim when one side is sparse enough to beat it."""
    found = restriction_finder(g, alpha)
    stable_eps = Fraction(alpha) / 4
    n = g.n
    for side in (Side.DIRECT, Side.COMPLEMENT):
        view = _view(g, side)
        if view.edge_count() > stable_eps * n * (n - 1) / 2:
            continue
        trimmed = stable_trim(view, range(n), stable_eps)
        kept = mask_of(trimmed)
        worst = max((view.rows[v] & kept).bit_count() for v in trimmed) if trimmed else 0
        if trimmed and worst <= Fraction(alpha) * len(trimmed) and len(trimmed) > len(found.vertices):
            found = Restriction(trimmed, side, len(trimmed) / n)
            trace.append(f"stable trim on the {side.value} side kept {len(trimmed)} vertices")
    trace.append(f"restriction: {len(found.vertices)}/{n} vertices on the {found.side.value} side")
    return found


def _pair_in_g(pair_a: Iterable[int], pair_b: Iterable[int], keep: Sequence[int], side: Side) -> PurePair:
    """An anticomplete pair of the side view, mapped to host ids and read in g's sense."""
    kind = PairKind.ANTICOMPLETE if side is Side.DIRECT else PairKind.COMPLETE
    return PurePair(frozenset(keep[v] for v in pair_a), frozenset(keep[v] for v in pair_b), kind)


def _map_pair(pair: PurePair, keep: Sequence[int], side: Side) -> PurePair:
    return pair.mapped(keep, flip=side is Side.COMPLEMENT)


def _lift_witness(g: Graph, w: Witness, keep: Sequence[int]) -> Witness:
    """Re-root a witness found on g[keep] at g: delete everything outside first."""
    kept = mask_of(keep)
    ops: list[Op] = [Delete(v) for v in range(g.n) if not kept >> v & 1]
    ops.extend(lift_ops(w.ops, keep))
    return Witness.for_graph(g, w.k, ops)


def _sizes(g: Graph, cert: Certificate, restriction: Optional[Restriction]) -> dict[str, float]:
    sizes: dict[str, float] = {}
    if restriction is not None:
        sizes["restriction"] = restriction.fraction
    if isinstance(cert, PurePair):
        sizes["a"] = len(cert.a) / g.n
        sizes["b"] = len(cert.b) / g.n
        sizes["achieved_eps"] = min(len(cert.a), len(cert.b)) / g.n
    elif isinstance(cert, Witness):
        sizes["witness_ops"] = float(len(cert.ops))
    return sizes


def strong_eh_pipeline(g: Graph, k: int, settings: Optional[Settings] = None) -> RunReport:
    """
    Produce a verified pure pair or C_k pivot-minor witness for ``g``.

    A run without a certificate is a legal outcome: the restriction stage
    has no size guarantee, so the report then carries the trace and no
    certificate.

    Raises:
        PreconditionError: k < 3 or fewer than two vertices
    """
    settings = settings or Settings()
    problems = []
    if k < 3:
        problems.append(f"k must be at least 3, got {k}")
    if g.n < 2:
        problems.append(f"pipeline needs at least 2 vertices, got {g.n}")
    if problems:
        raise PreconditionError(problems)

    started = time.perf_counter()
    report = RunReport(fingerprint(g), k, g.n, None)
    trace = report.trace
    if k < 5:
        trace.append(f"k={k} is below 5; running best-effort")

    restriction: Optional[Restriction] = None
    try:
        cert, restriction = _run(g, k, settings, report)
    except SweepFailure as exc:
        trace.append(f"failed: {exc}")
        cert = None
    if cert is not None:
        problems = verify_certificate(g, cert)
        if problems:
            trace.append(f"certificate rejected: {problems[0]}")
            cert = None
    if cert is not None:
        report.certificate = cert
        report.sizes = _sizes(g, cert, restriction)
        logger.info(f"Pipeline certified {type(cert).__name__} via {report.branch}")
    else:
        if restriction is not None:
            report.sizes = {"restriction": restriction.fraction}
        logger.warning(f"Pipeline found no certificate for k={k} on n={g.n}")
    report.wall_time = time.perf_counter() - started
    return report


def _run(g: Graph, k: int, settings: Settings, report: RunReport):
    trace = report.trace
    if g.n == 2:
        report.branch = "trivial"
        kind = PairKind.COMPLETE if g.adjacent(0, 1) else PairKind.ANTICOMPLETE
        return PurePair(frozenset({0}), frozenset({1}), kind), None

    restriction = _restrict(g, settings.restriction_alpha, trace)
    report.constants = constants = make_constants(k, restriction.fraction)
    side = restriction.side
    if len(restriction.vertices) < 2:
        raise SweepFailure("restriction kept fewer than two vertices", trace)

    g0, keep0 = induced_subgraph(_view(g, side), restriction.vertices)
    piece = connected_or_purepair(g0)
    if isinstance(piece, PurePair):
        report.branch = "components"
        trace.append("restricted graph splits into small components")
        return _map_pair(piece, keep0, side), restriction

    assert isinstance(piece, ConnectedPiece)
    if len(piece.vertices) < 2:
        # g0 is edgeless on at most three vertices
        report.branch = "trivial"
        return _pair_in_g([0], [1], keep0, side), restriction
    g1, keep1 = induced_subgraph(g0, piece.vertices)
    keep = [keep0[v] for v in keep1]
    trace.append(f"connected piece on {g1.n} vertices")

    skeleton = dominating_skeleton(g1, 0)
    failures = check_skeleton(skeleton)
    if failures:
        raise ConstructionError(f"skeleton check failed: {failures[0]}")
    tree = skeleton.weighted_tree()
    split = heavy_path_or_unrelated(tree)
    failures = check_tree_split(tree, split)
    if failures:
        raise ConstructionError(f"tree split check failed: {failures[0]}")

    if not isinstance(split, RootPath):
        report.branch = "unrelated"
        trace.append("skeleton split into two unrelated parts")
        return _pair_in_g(skeleton.preimage(split.a), skeleton.preimage(split.b), keep, side), restriction

    w_mask = 0
    for v in split.nodes:
        w_mask |= g1.rows[v] | (1 << v)
    g2, keep2 = induced_subgraph(g1, iter_bits(w_mask))
    position = {v: i for i, v in enumerate(keep2)}
    p2 = [position[v] for v in split.nodes]
    keep_total = [keep[v] for v in keep2]
    trace.append(f"heavy root path of {len(p2)} vertices dominating {g2.n}")

    if side is Side.COMPLEMENT:
        report.branch = "hole sweep"
        found = sweep_hole_mode(
            g2, p2, constants.L, constants.alpha_hole, constants.eps0,
            strict=settings.strict_sweeps, trace=trace,
        )
        if isinstance(found, Hole):
            order = [keep_total[v] for v in found.order]
            trace.append(f"anti-hole of length {len(order)} (needs {antihole_bound(k)})")
            report.branch = "anti-hole"
            return antihole_extract(g, order, k), restriction
        return _map_pair(found, keep_total, side), restriction

    report.branch = "pivot sweep"
    found = sweep_pivot_mode(
        g2, p2, k, 4 * constants.alpha, constants.eps,
        strict=settings.strict_sweeps, trace=trace,
    )
    if isinstance(found, Witness):
        return _lift_witness(g, found, keep_total), restriction
    return _map_pair(found, keep_total, side), restriction


CSV_FIELDS = [
    "fingerprint", "n", "k", "status", "branch", "certificate",
    "a", "b", "achieved_eps", "restriction", "preconditions_relaxed", "wall_time",
]


def report_row(report: RunReport, **extra: Any) -> dict[str, Any]:
    """One flat CSV row for ``report``; ``extra`` adds columns such as generator parameters."""
    row: dict[str, Any] = dict(extra)
    row.update(
        fingerprint=report.fingerprint,
        n=report.n,
        k=report.k,
        status=report.status,
        branch=report.branch,
        certificate=report.certificate.to_dict()["type"] if report.certificate else "",
        a=report.sizes.get("a", ""),
        b=report.sizes.get("b", ""),
        achieved_eps=report.sizes.get("achieved_eps", ""),
        restriction=report.sizes.get("restriction", ""),
        preconditions_relaxed=report.preconditions_relaxed,
        wall_time=round(report.wall_time, 6),
    )
    return row


def write_csv(rows: Sequence[dict[str, Any]], stream: IO[str]) -> None:
    extra = [key for row in rows for key in row if key not in CSV_FIELDS]
    fields = list(dict.fromkeys(extra)) + CSV_FIELDS
    writer = csv.DictWriter(stream, fieldnames=fields)
    writer.writeheader()
    writer.writerows(rows)
