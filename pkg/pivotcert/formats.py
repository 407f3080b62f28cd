"""graph6 and edge-list codecs, file helpers and graph fingerprints."""

from __future__ import annotations

import hashlib
import logging
from pathlib import Path
from typing import Iterable

import networkx as nx

from pivotcert.errors import FormatError, GraphError
from pivotcert.graph import Graph

logger = logging.getLogger(__name__)

GRAPH6_HEADER = ">>graph6<<"
FORMATS = ("graph6", "edgelist")


def to_networkx(g: Graph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from(g.edges())
    return graph


def from_networkx(graph: nx.Graph) -> Graph:
    """Convert with nodes relabelled 0..n-1 in the graph's node order."""
    if graph.is_directed() or graph.is_multigraph():
        raise GraphError("only simple undirected graphs are supported")
    index = {node: i for i, node in enumerate(graph.nodes)}
    return Graph.from_edges(len(index), ((index[u], index[v]) for u, v in graph.edges))


def graph6_encode(g: Graph) -> str:
    """Bit-exact graph6 text for ``g`` without header or trailing newline."""
    return nx.to_graph6_bytes(to_networkx(g), header=False).decode("ascii").strip()


def graph6_decode(text: str) -> Graph:
    data = text.strip()
    if data.startswith(GRAPH6_HEADER):
        data = data[len(GRAPH6_HEADER):]
    if not data:
        raise FormatError("empty graph6 string")
    for position, char in enumerate(data):
        if not 63 <= ord(char) <= 126:
            raise FormatError(f"graph6 character {char!r} at position {position} is outside 63..126")
    try:
        graph = nx.from_graph6_bytes(data.encode("ascii"))
    except (nx.NetworkXError, ValueError, IndexError) as exc:
        raise FormatError(f"malformed graph6 string {data!r}: {exc}") from exc
    return from_networkx(graph)


def fingerprint(g: Graph) -> str:
    return hashlib.sha256(graph6_encode(g).encode("ascii")).hexdigest()


def edgelist_decode(text: str) -> Graph:
    """Parse the edge-list format: header ``n m`` then ``m`` lines ``u v``; ``#`` starts a comment."""
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((number, line.split()))
    if not lines:
        raise FormatError("edge list is empty")
    number, header = lines[0]
    if len(header) != 2:
        raise FormatError(f"line {number}: header must be 'n m', got {' '.join(header)!r}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError as exc:
        raise FormatError(f"line {number}: non-integer header") from exc
    edges = []
    for number, fields in lines[1:]:
        if len(fields) != 2:
            raise FormatError(f"line {number}: expected 'u v', got {' '.join(fields)!r}")
        try:
            edges.append((int(fields[0]), int(fields[1])))
        except ValueError as exc:
            raise FormatError(f"line {number}: non-integer vertex id") from exc
    if len(edges) != m:
        raise FormatError(f"header promises {m} edges, found {len(edges)}")
    try:
        return Graph.from_edges(n, edges)
    except GraphError as exc:
        raise FormatError(str(exc)) from exc


def edgelist_encode(g: Graph) -> str:
    edges = list(g.edges())
    lines = [f"{g.n} {len(edges)}"]
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def parse_graphs(text: str, fmt: str = "graph6") -> list[Graph]:
    if fmt == "graph6":
        return [graph6_decode(line) for line in text.splitlines() if line.strip()]
    if fmt == "edgelist":
        return [edgelist_decode(text)]
    raise FormatError(f"unknown graph format {fmt!r}; expected one of {FORMATS}")


def format_graphs(graphs: Iterable[Graph], fmt: str = "graph6") -> str:
    if fmt == "graph6":
        return "".join(graph6_encode(g) + "\n" for g in graphs)
    if fmt == "edgelist":
        return "\n".join(edgelist_encode(g) for g in graphs)
    raise FormatError(f"unknown graph format {fmt!r}; expected one of {FORMATS}")


def read_graph(path: str | Path, fmt: str = "graph6") -> Graph:
    """Read the first graph of a file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Missing graph file: {path}")
    graphs = parse_graphs(path.read_text(encoding="utf-8"), fmt)
    if not graphs:
        raise FormatError(f"{path} contains no graph")
    if len(graphs) > 1:
        logger.warning(f"{path} holds {len(graphs)} graphs; using the first")
    return graphs[0]
