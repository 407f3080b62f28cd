import tempfile
import unittest
from pathlib import Path

import networkx as nx

from pivotcert.errors import FormatError
from pivotcert.formats import (
    edgelist_decode,
    edgelist_encode,
    fingerprint,
    format_graphs,
    from_networkx,
    graph6_decode,
    graph6_encode,
    parse_graphs,
    read_graph,
    to_networkx,
)
from pivotcert.generators import gnp, long_cycle, path
from pivotcert.graph import Graph


class TestGraph6(unittest.TestCase):

    def test_known_encoding(self):
        """K2 encodes to the documented two-character string"""
        self.assertEqual(graph6_encode(Graph.complete(2)), "A_")

    def test_decode_inverts_encode(self):
        """Decoding recovers a random graph exactly"""
        g = gnp(17, 0.3, seed=5)
        self.assertEqual(graph6_decode(graph6_encode(g)), g)

    def test_decode_inverts_encode_at_scale(self):
        """Hundreds of random graphs survive the round trip and read back the same in networkx"""
        for seed in range(500):
            g = gnp(1 + seed % 97, (seed % 10) / 10, seed=seed)
            text = graph6_encode(g)
            self.assertEqual(graph6_decode(text), g, f"seed {seed}")
            self.assertEqual(from_networkx(nx.from_graph6_bytes(text.encode("ascii"))), g, f"seed {seed}")

    def test_header_is_accepted(self):
        """The optional >>graph6<< header is stripped"""
        g = long_cycle(5)
        self.assertEqual(graph6_decode(">>graph6<<" + graph6_encode(g)), g)

    def test_rejects_out_of_range_character(self):
        """Characters outside 63..126 are a format error"""
        with self.assertRaises(FormatError):
            graph6_decode("A _")

    def test_petersen_through_networkx(self):
        """Encoded Petersen decodes in networkx to an isomorphic graph"""
        g = from_networkx(nx.petersen_graph())
        decoded = nx.from_graph6_bytes(graph6_encode(g).encode("ascii"))
        self.assertTrue(nx.is_isomorphic(decoded, to_networkx(g)))


class TestEdgeList(unittest.TestCase):

    def test_comments_and_blank_lines(self):
        """Comments and blank lines are ignored"""
        text = "# triangle\n3 3\n0 1\n\n1 2  # closing soon\n2 0\n"
        g = edgelist_decode(text)
        self.assertEqual(g.edge_count(), 3)
        self.assertTrue(g.adjacent(0, 2))

    def test_edge_count_mismatch(self):
        """A header promising the wrong edge count is rejected"""
        with self.assertRaises(FormatError):
            edgelist_decode("3 2\n0 1\n")

    def test_out_of_range_vertex(self):
        """Vertex ids beyond n are a format error"""
        with self.assertRaises(FormatError):
            edgelist_decode("2 1\n0 5\n")

    def test_encode(self):
        """Encoding lists the header then edges in order"""
        self.assertEqual(edgelist_encode(path(3)), "3 2\n0 1\n1 2\n")


class TestFiles(unittest.TestCase):

    def test_multiple_graph6_lines(self):
        """One graph per line"""
        text = format_graphs([long_cycle(5), path(4)])
        graphs = parse_graphs(text)
        self.assertEqual(graphs, [long_cycle(5), path(4)])

    def test_read_graph(self):
        """Reading a file returns its first graph"""
        with tempfile.TemporaryDirectory() as tmp:
            target = Path(tmp) / "g.txt"
            target.write_text(edgelist_encode(long_cycle(6)), encoding="utf-8")
            self.assertEqual(read_graph(target, "edgelist"), long_cycle(6))

    def test_missing_file(self):
        """A missing file raises FileNotFoundError"""
        with self.assertRaises(FileNotFoundError):
            read_graph("/nonexistent/graph.g6")

    def test_unknown_format(self):
        """Unknown format names are rejected"""
        with self.assertRaises(FormatError):
            parse_graphs("A_", "adjacency")


class TestFingerprint(unittest.TestCase):

    def test_equal_graphs_share_fingerprint(self):
        """Fingerprints depend only on the labelled graph"""
        self.assertEqual(fingerprint(long_cycle(8)), fingerprint(long_cycle(8)))
        self.assertNotEqual(fingerprint(long_cycle(8)), fingerprint(path(8)))


if __name__ == "__main__":
    unittest.main()
