#!/usr/bin/env python3
"""Command-line entry point: generate graphs, search pivot-minors, run the pipeline and verify certificates."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from tqdm import tqdm

from pivotcert.config import Settings, load_settings
from pivotcert.constructions import antihole_bound, antihole_extract, classify_fan, cycle_reduce, fan_extract
from pivotcert.decomposition import check_skeleton, dominating_skeleton
from pivotcert.errors import (
    ConfigError,
    FormatError,
    GraphError,
    PivotCertError,
    PreconditionError,
    SizeCapError,
    WitnessError,
)
from pivotcert.extraction import certificate_from_dict, verify_certificate
from pivotcert.formats import FORMATS, fingerprint, format_graphs, read_graph
from pivotcert.generators import (
    GENERATORS,
    anti_hole,
    bounded_degree,
    caterpillar,
    fan,
    gnp,
    long_cycle,
    path,
    planted_path,
    st_cycle,
)
from pivotcert.graph import Graph, complement, find_induced_cycle
from pivotcert.pipeline import report_row, strong_eh_pipeline, write_csv
from pivotcert.pivot import OrbitIndex, has_pivot_minor, normalize_witness, pivot

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNVERIFIED = 1
EXIT_PIPELINE = 2
EXIT_USAGE = 3

BENCH_FAMILIES = ("caterpillar", "anti-hole", "gnp", "bounded-degree")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with the usage status."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="graph6", help="Graph file format.")
    common.add_argument("--json-out", type=Path, help="Also write the JSON result to this file.")
    common.add_argument("--config", type=Path, help="Settings file (default: discover pivotcert.yaml).")
    common.add_argument("--log-level", help="Logging level, e.g. DEBUG or INFO.")
    common.add_argument("--threads", type=int, help="Worker threads for orbit expansion.")
    common.add_argument("--max-orbit", type=int, help="Cap on pivot-orbit size.")

    parser = _Parser(prog="pivotcert", description="Pivot-minor certificates for C_k.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="Generate a graph.")
    gen.add_argument("kind", choices=sorted(GENERATORS))
    gen.add_argument("--n", type=int, help="Vertex count (s for st-cycle).")
    gen.add_argument("--p", type=float, help="Edge probability for gnp.")
    gen.add_argument("--t", type=int, help="Complemented run length for st-cycle.")
    gen.add_argument("--s", type=int, help="Path length for planted-path.")
    gen.add_argument("--d", type=int, help="Degree bound for bounded-degree and planted-path.")
    gen.add_argument("--max-leaf", type=int, default=3, help="Leaves per spine vertex for caterpillar.")
    gen.add_argument("--intervals", type=_int_list, help="Comma-separated interval lengths for fan.")
    gen.add_argument("--seed", type=int, help="Random seed.")
    gen.set_defaults(handler=cmd_gen)

    piv = sub.add_parser("pivot", parents=[common], help="Pivot one or more edges in order.")
    piv.add_argument("graph", type=Path)
    piv.add_argument("--edge", type=int, nargs=2, action="append", required=True, metavar=("U", "V"))
    piv.set_defaults(handler=cmd_pivot)

    orbit = sub.add_parser("orbit", parents=[common], help="Enumerate the pivot orbit.")
    orbit.add_argument("graph", type=Path)
    orbit.set_defaults(handler=cmd_orbit)

    find = sub.add_parser("find-ck", parents=[common], help="Find C_k as a pivot-minor.")
    find.add_argument("graph", type=Path)
    find.add_argument("--k", type=int, required=True)
    find.add_argument("--method", choices=("oracle", "cycle", "antihole", "fan"), default="oracle")
    find.add_argument("--order", type=_int_list, help="Cycle, anti-hole or main-path order.")
    find.add_argument("--center", type=int, help="Fan center.")
    find.add_argument("--normalize", action="store_true", help="Reorder the witness so all pivots come first.")
    find.set_defaults(handler=cmd_find_ck)

    pure = sub.add_parser("pure-pair", parents=[common], help="Run the certificate pipeline.")
    pure.add_argument("graph", type=Path)
    pure.add_argument("--k", type=int, required=True)
    pure.add_argument("--strict", action="store_true", help="Enforce sweep preconditions.")
    pure.set_defaults(handler=cmd_pure_pair)

    verify = sub.add_parser("verify", parents=[common], help="Verify a certificate or report.")
    verify.add_argument("certificate", type=Path)
    verify.add_argument("graph", type=Path)
    verify.add_argument("--min-hole", type=int, default=5)
    verify.set_defaults(handler=cmd_verify)

    bench = sub.add_parser("bench", parents=[common], help="Run the pipeline over generated graphs.")
    bench.add_argument("--family", choices=BENCH_FAMILIES, default="caterpillar")
    bench.add_argument("--n", type=int, nargs="+", default=[100])
    bench.add_argument("--k", type=int, default=5)
    bench.add_argument("--p", type=float, default=0.1)
    bench.add_argument("--d", type=int, default=4)
    bench.add_argument("--trials", type=int, default=1)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--csv", type=Path, help="Write rows here instead of stdout.")
    bench.set_defaults(handler=cmd_bench)

    insp = sub.add_parser("inspect", parents=[common], help="Print the dominating skeleton.")
    insp.add_argument("graph", type=Path)
    insp.add_argument("--root", type=int, default=0)
    insp.set_defaults(handler=cmd_inspect)
    return parser


def _emit(args: argparse.Namespace, payload: dict[str, Any]) -> None:
    text = json.dumps(payload, indent=2)
    print(text)
    if args.json_out:
        args.json_out.write_text(text + "\n", encoding="utf-8")


def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name) is None]
    if missing:
        raise PreconditionError([f"gen {args.kind} needs {', '.join(missing)}"])


def _generate(args: argparse.Namespace) -> Graph:
    kind = args.kind
    if kind == "fan":
        _need(args, "intervals")
        return fan(args.intervals)
    _need(args, "n")
    if kind == "gnp":
        _need(args, "p")
        return gnp(args.n, args.p, args.seed)
    if kind == "path":
        return path(args.n)
    if kind == "cycle":
        return long_cycle(args.n)
    if kind == "anti-hole":
        return anti_hole(args.n)
    if kind == "st-cycle":
        _need(args, "t")
        return st_cycle(args.n, args.t)
    if kind == "caterpillar":
        return caterpillar(args.n, args.max_leaf, args.seed)
    if kind == "bounded-degree":
        _need(args, "d")
        return bounded_degree(args.n, args.d, args.seed)
    _need(args, "s", "d")
    return planted_path(args.n, args.s, args.d, args.seed)


def cmd_gen(args: argparse.Namespace, settings: Settings) -> int:
    sys.stdout.write(format_graphs([_generate(args)], args.format))
    return EXIT_OK


def cmd_pivot(args: argparse.Namespace, settings: Settings) -> int:
    g = read_graph(args.graph, args.format)
    for u, v in args.edge:
        g = pivot(g, u, v)
    sys.stdout.write(format_graphs([g], args.format))
    return EXIT_OK


def cmd_orbit(args: argparse.Namespace, settings: Settings) -> int:
    g = read_graph(args.graph, args.format)
    if g.n > settings.oracle_max_n:
        raise SizeCapError(f"orbit enumeration capped at {settings.oracle_max_n} vertices, got {g.n}")
    index = OrbitIndex(g, max_size=settings.max_orbit, threads=settings.threads)
    lengths = index.cycle_lengths()
    _emit(args, {
        "fingerprint": fingerprint(g),
        "n": g.n,
        "orbit_size": len(index),
        "cycle_lengths": sorted(lengths),
    })
    return EXIT_OK


def _default_cycle(g: Graph, k: int) -> list[int]:
    for m in range(k, g.n + 1, 2):
        found = find_induced_cycle(g, m)
        if found:
            return found
    raise PreconditionError([f"no induced cycle of length >= {k} with the parity of k"])


def _default_antihole(g: Graph, k: int) -> list[int]:
    view = complement(g)
    for m in range(g.n, antihole_bound(k) - 1, -1):
        found = find_induced_cycle(view, m)
        if found:
            return found
    raise PreconditionError([f"no induced anti-hole of length >= {antihole_bound(k)}"])


def cmd_find_ck(args: argparse.Namespace, settings: Settings) -> int:
    g = read_graph(args.graph, args.format)
    k = args.k
    if args.method == "oracle":
        result = has_pivot_minor(
            g, k,
            max_n=settings.oracle_max_n,
            max_orbit=settings.max_orbit,
            threads=settings.threads,
        )
        payload: dict[str, Any] = {"found": result.found, "k": k, "orbit_size": result.orbit_size}
        if result.witness is not None:
            payload["witness"] = result.witness.to_dict()
        _emit(args, payload)
        return EXIT_OK
    if args.method == "cycle":
        witness = cycle_reduce(g, args.order or _default_cycle(g, k), k)
    elif args.method == "antihole":
        witness = antihole_extract(g, args.order or _default_antihole(g, k), k)
    else:
        if args.center is None or not args.order:
            raise PreconditionError(["fan method needs --center and --order"])
        witness = fan_extract(classify_fan(g, args.center, args.order), k)
    if args.normalize:
        witness = normalize_witness(witness, iso_cap=settings.iso_cap)
    _emit(args, {"found": True, "k": k, "witness": witness.to_dict()})
    return EXIT_OK


def cmd_pure_pair(args: argparse.Namespace, settings: Settings) -> int:
    g = read_graph(args.graph, args.format)
    if args.strict:
        settings = dataclasses.replace(settings, strict_sweeps=True)
    report = strong_eh_pipeline(g, args.k, settings)
    _emit(args, report.to_dict())
    return EXIT_OK if report.ok else EXIT_PIPELINE


def _load_json(path: Path) -> Any:
    if not path.exists():
        raise FileNotFoundError(f"Missing certificate file: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from exc


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    data = _load_json(args.certificate)
    if isinstance(data, dict) and data.get("type") == "run_report":
        if data.get("certificate") is None:
            print("ERROR: report carries no certificate", file=sys.stderr)
            return EXIT_UNVERIFIED
        data = data["certificate"]
    if isinstance(data, dict) and "witness" in data and "type" not in data:
        data = data["witness"]
    cert = certificate_from_dict(data)
    g = read_graph(args.graph, args.format)
    problems = verify_certificate(g, cert, min_hole=args.min_hole)
    if problems:
        for problem in problems:
            print(f"ERROR: {problem}", file=sys.stderr)
        return EXIT_UNVERIFIED
    print(f"Verified {data['type']} against {args.graph}.")
    return EXIT_OK


def _bench_graph(args: argparse.Namespace, n: int, seed: int) -> Graph:
    if args.family == "caterpillar":
        return caterpillar(n, 3, seed)
    if args.family == "anti-hole":
        return anti_hole(n)
    if args.family == "gnp":
        return gnp(n, args.p, seed)
    return bounded_degree(n, args.d, seed)


def cmd_bench(args: argparse.Namespace, settings: Settings) -> int:
    jobs = [(n, args.seed + trial) for n in args.n for trial in range(args.trials)]
    rows = []
    for n, seed in tqdm(jobs, desc=f"bench {args.family}", unit="run"):
        g = _bench_graph(args, n, seed)
        report = strong_eh_pipeline(g, args.k, settings)
        rows.append(report_row(report, family=args.family, seed=seed, p=args.p, d=args.d))
    if args.csv:
        with args.csv.open("w", encoding="utf-8", newline="") as handle:
            write_csv(rows, handle)
        logger.info(f"Wrote {len(rows)} rows to {args.csv}")
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace, settings: Settings) -> int:
    g = read_graph(args.graph, args.format)
    skeleton = dominating_skeleton(g, args.root)
    payload = skeleton.to_dict()
    payload["problems"] = check_skeleton(skeleton)
    _emit(args, payload)
    return EXIT_OK if not payload["problems"] else EXIT_UNVERIFIED


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        settings = load_settings(
            args.config,
            overrides={
                "threads": args.threads,
                "max_orbit": args.max_orbit,
                "log_level": args.log_level,
            },
        )
    except ConfigError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper()),
        format="%(asctime)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        return args.handler(args, settings)
    except (FormatError, GraphError, PreconditionError, FileNotFoundError) as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WitnessError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_UNVERIFIED
    except PivotCertError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    raise SystemExit(main())
