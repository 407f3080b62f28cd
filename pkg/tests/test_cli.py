import contextlib
import io
import json
import tempfile
import unittest
from pathlib import Path

from pivotcert.cli import EXIT_OK, EXIT_UNVERIFIED, EXIT_USAGE, main
from pivotcert.formats import format_graphs, graph6_decode
from pivotcert.generators import caterpillar, long_cycle, path


class TestCli(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def graph_file(self, g, name: str = "g.g6") -> str:
        target = self.root / name
        target.write_text(format_graphs([g]), encoding="utf-8")
        return str(target)

    def run_cli(self, *argv: str) -> tuple[int, str]:
        out = io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
            code = main(list(argv))
        return code, out.getvalue()

    def test_gen_cycle(self):
        """gen prints graph6 text for the requested graph"""
        code, out = self.run_cli("gen", "cycle", "--n", "5")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(graph6_decode(out), long_cycle(5))

    def test_gen_missing_parameter(self):
        """A generator without its size is a usage error"""
        code, _ = self.run_cli("gen", "cycle")
        self.assertEqual(code, EXIT_USAGE)

    def test_argparse_errors_use_usage_status(self):
        """Missing required arguments exit with the usage status"""
        code, _ = self.run_cli("find-ck")
        self.assertEqual(code, EXIT_USAGE)

    def test_pivot(self):
        """pivot applies the listed edges in order"""
        code, out = self.run_cli("pivot", self.graph_file(path(3)), "--edge", "0", "1")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(list(graph6_decode(out).edges()), [(0, 1), (0, 2)])

    def test_find_then_verify(self):
        """A witness written by find-ck verifies against its graph only"""
        graph = self.graph_file(long_cycle(7))
        witness = self.root / "w.json"
        code, out = self.run_cli("find-ck", graph, "--k", "5", "--method", "cycle", "--json-out", str(witness))
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(json.loads(out)["found"])
        self.assertEqual(self.run_cli("verify", str(witness), graph)[0], EXIT_OK)
        other = self.graph_file(long_cycle(8), "other.g6")
        self.assertEqual(self.run_cli("verify", str(witness), other)[0], EXIT_UNVERIFIED)

    def test_find_normalized(self):
        """--normalize lists every pivot before any deletion and still verifies"""
        graph = self.graph_file(long_cycle(9))
        witness = self.root / "w.json"
        code, out = self.run_cli(
            "find-ck", graph, "--k", "5", "--method", "cycle", "--normalize", "--json-out", str(witness)
        )
        self.assertEqual(code, EXIT_OK)
        kinds = [next(iter(op)) for op in json.loads(out)["witness"]["ops"]]
        self.assertEqual(kinds, ["pivot", "pivot", "delete", "delete", "delete", "delete"])
        self.assertEqual(self.run_cli("verify", str(witness), graph)[0], EXIT_OK)

    def test_verify_rejects_cross_edge(self):
        """An anticomplete claim across an edge is unverified"""
        cert = self.root / "pair.json"
        cert.write_text(json.dumps({"type": "pure_pair", "a": [0], "b": [1], "kind": "anticomplete"}))
        code, _ = self.run_cli("verify", str(cert), self.graph_file(long_cycle(5)))
        self.assertEqual(code, EXIT_UNVERIFIED)

    def test_oracle(self):
        """The oracle method reports found together with a witness"""
        code, out = self.run_cli("find-ck", self.graph_file(long_cycle(6)), "--k", "4")
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertTrue(payload["found"])
        self.assertEqual(payload["witness"]["k"], 4)

    def test_orbit(self):
        """orbit lists the induced cycle lengths across the orbit"""
        code, out = self.run_cli("orbit", self.graph_file(long_cycle(6)))
        self.assertEqual(code, EXIT_OK)
        lengths = json.loads(out)["cycle_lengths"]
        self.assertIn(4, lengths)
        self.assertNotIn(5, lengths)

    def test_pure_pair_and_verify_report(self):
        """The pipeline report verifies against its graph"""
        graph = self.graph_file(caterpillar(150, 3, seed=4))
        report = self.root / "report.json"
        code, out = self.run_cli("pure-pair", graph, "--k", "5", "--json-out", str(report))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["certificate"]["type"], "pure_pair")
        self.assertEqual(self.run_cli("verify", str(report), graph)[0], EXIT_OK)

    def test_inspect(self):
        """inspect prints a valid skeleton"""
        code, out = self.run_cli("inspect", self.graph_file(path(6)))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["problems"], [])

    def test_bench_csv(self):
        """bench writes one CSV row per run"""
        target = self.root / "bench.csv"
        code, _ = self.run_cli("bench", "--family", "caterpillar", "--n", "60", "80", "--csv", str(target))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(target.read_text(encoding="utf-8").splitlines()), 3)

    def test_malformed_graph(self):
        """Malformed graph6 input is a usage error"""
        bad = self.root / "bad.g6"
        bad.write_text("A _\n", encoding="utf-8")
        code, _ = self.run_cli("inspect", str(bad))
        self.assertEqual(code, EXIT_USAGE)

    def test_missing_graph_file(self):
        """A missing graph file is a usage error"""
        code, _ = self.run_cli("inspect", str(self.root / "absent.g6"))
        self.assertEqual(code, EXIT_USAGE)


if __name__ == "__main__":
    unittest.main()
