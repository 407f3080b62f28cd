import unittest
from fractions import Fraction

from pivotcert.errors import FormatError, PreconditionError, SweepFailure
from pivotcert.extraction import (
    Hole,
    build_sweep_state,
    certificate_from_dict,
    relaxed_preconditions,
    sweep_hole_mode,
    sweep_pivot_mode,
    verify_certificate,
)
from pivotcert.generators import caterpillar, long_cycle, path, planted_path
from pivotcert.graph import Graph, PairKind, PurePair
from pivotcert.pivot import Witness


def spine(g: Graph) -> list[int]:
    """Longest run 0, 1, 2, ... of consecutive adjacent vertices."""
    p = [0]
    while p[-1] + 1 < g.n and g.adjacent(p[-1], p[-1] + 1):
        p.append(p[-1] + 1)
    return p


def pendant_fixture() -> Graph:
    # path 0..7 (labels 1..8) and four off-path vertices
    edges = [(v, v + 1) for v in range(7)]
    edges += [(8, 0), (9, 1), (9, 7), (10, 3), (11, 6)]
    return Graph.from_edges(12, edges)


def hung_path(s: int, hangers: dict[int, list[int]], extra=()) -> Graph:
    """Path 0..s-1 with each listed vertex attached to the given path vertices."""
    edges = [(v, v + 1) for v in range(s - 1)]
    for u, attach in hangers.items():
        edges += [(u, w) for w in attach]
    edges += list(extra)
    return Graph.from_edges(s + len(hangers), edges)


def b_fixture(extra=()) -> Graph:
    # path labels 1..13; eight groups of seven vertices, each group joined to two labels of equal parity
    spans = [(1, 11), (1, 13), (2, 10), (2, 12), (3, 11), (3, 13), (4, 10), (4, 12)]
    hangers = {13 + 7 * j + c: [lo - 1, hi - 1] for j, (lo, hi) in enumerate(spans) for c in range(7)}
    return hung_path(13, hangers, extra)


class TestSweepState(unittest.TestCase):

    def test_classes(self):
        """Each off-path vertex lands in the class its path labels dictate"""
        st = build_sweep_state(pendant_fixture(), range(8), 3, 3)
        self.assertEqual(st.a, frozenset({10}))
        self.assertEqual(st.b, frozenset({9}))
        self.assertEqual(st.c1, frozenset({8}))
        self.assertEqual(st.d1, frozenset({11}))
        self.assertEqual(st.c2 | st.d2, frozenset())
        self.assertEqual((st.m_minus[9], st.m_plus[9]), (2, 8))
        self.assertEqual(st.f, 1)

    def test_first_window_has_no_c(self):
        """Nothing lies below the first window"""
        st = build_sweep_state(pendant_fixture(), range(8), 1, 3)
        self.assertEqual(st.f, 0)
        self.assertEqual(st.b, frozenset())

    def test_window_range(self):
        """Windows outside 1..s-k+1 are rejected"""
        for i in (0, 7):
            with self.assertRaises(PreconditionError):
                build_sweep_state(pendant_fixture(), range(8), i, 3)

    def test_path_must_dominate(self):
        """An isolated extra vertex breaks domination"""
        g = Graph.from_edges(13, [(v, v + 1) for v in range(7)] + [(8, 0), (9, 1), (10, 3), (11, 6)])
        with self.assertRaises(PreconditionError):
            build_sweep_state(g, range(8), 2, 3)

    def test_partition_on_random_fixtures(self):
        """Classes and path partition the vertices at every window"""
        for seed in range(5):
            g = planted_path(40, 15, 4, seed=seed)
            for i in range(1, 15 - 5 + 2):
                st = build_sweep_state(g, range(15), i, 5)
                union = frozenset().union(*st.classes())
                self.assertEqual(sum(len(part) for part in st.classes()), len(union))
                self.assertEqual(union, frozenset(range(15, 40)))


class TestPivotSweep(unittest.TestCase):

    def test_long_path_halves(self):
        """A long bare path splits into two anticomplete halves"""
        g = path(100)
        cert = sweep_pivot_mode(g, range(100), 5, 0.05, 0.004)
        self.assertIsInstance(cert, PurePair)
        self.assertEqual(cert.kind, PairKind.ANTICOMPLETE)
        self.assertEqual((len(cert.a), len(cert.b)), (49, 50))
        self.assertEqual(verify_certificate(g, cert), [])

    def test_fan_from_b_vertex(self):
        """A B vertex with two close path neighbours above the window yields C5"""
        g = Graph.from_edges(11, [(v, v + 1) for v in range(9)] + [(10, 0), (10, 6), (10, 7)])
        trace: list[str] = []
        cert = sweep_pivot_mode(g, range(10), 5, 0.3, 0.45, strict=False, trace=trace)
        self.assertIsInstance(cert, Witness)
        self.assertEqual(cert.k, 5)
        self.assertEqual(verify_certificate(g, cert), [])
        self.assertIn("upper fan at window 2: certificate found", trace)

    def test_caterpillars(self):
        """Caterpillars along their spine always give a verified pair"""
        for seed in range(6):
            g = caterpillar(200, 3, seed=seed)
            cert = sweep_pivot_mode(g, spine(g), 5, 0.05, 0.004, strict=False)
            self.assertEqual(verify_certificate(g, cert), [])

    def test_planted_paths(self):
        """Degree-bounded graphs with a planted path give verified certificates"""
        for seed in range(5):
            g = planted_path(60, 20, 4, seed=seed)
            cert = sweep_pivot_mode(g, range(20), 5, 0.05, 0.004, strict=False)
            self.assertEqual(verify_certificate(g, cert), [])

    def sweep(self, g: Graph, s: int, eps: Fraction) -> tuple:
        trace: list[str] = []
        cert = sweep_pivot_mode(g, range(s), 5, Fraction(1, 100), eps, strict=False, trace=trace)
        self.assertEqual(verify_certificate(g, cert), [])
        return cert, trace

    def test_b_vertex_closes_cycle_of_right_parity(self):
        """A B vertex whose path arc has the parity of k closes a cycle"""
        cert, trace = self.sweep(hung_path(10, {10: [0, 7]}), 10, Fraction(9, 20))
        self.assertIsInstance(cert, Witness)
        self.assertEqual(cert.k, 5)
        self.assertIn("B parity at window 2: certificate found", trace)

    def test_large_b_class_splits_into_components(self):
        """A large edgeless B class is grouped into two anticomplete sides"""
        g = b_fixture()
        cert, trace = self.sweep(g, 13, Fraction(28, 345))
        self.assertIsInstance(cert, PurePair)
        self.assertEqual(cert.kind, PairKind.ANTICOMPLETE)
        self.assertEqual((len(cert.a), len(cert.b)), (6, 22))
        self.assertIn("B components at window 5: certificate found", trace)

    def test_edge_inside_large_b_class(self):
        """An edge between two B vertices with different lower ends closes a cycle"""
        g = b_fixture(extra=[(13, 48)])
        cert, trace = self.sweep(g, 13, Fraction(28, 345))
        self.assertIsInstance(cert, Witness)
        self.assertIn("B edge 13-48 at window 5: certificate found", trace)

    def test_c_d_edge_closes_cycle(self):
        """An edge from C1 to D1 at the chosen window closes a cycle"""
        hangers = {u: [0] for u in range(10, 35)} | {35: [8]}
        cert, trace = self.sweep(hung_path(10, hangers, [(10, 35)]), 10, Fraction(41, 360))
        self.assertIsInstance(cert, Witness)
        self.assertIn("C1-D1 edge at window 2: certificate found", trace)

    def test_c_d_classes_form_pair(self):
        """Large C1 and D1 classes with no edge between them are the pair"""
        hangers = {u: [0] for u in range(10, 35)} | {u: [8] for u in range(35, 41)}
        cert, trace = self.sweep(hung_path(10, hangers), 10, Fraction(1, 10))
        self.assertEqual(cert, PurePair(frozenset(range(10, 35)), frozenset(range(35, 41)), PairKind.ANTICOMPLETE))
        self.assertIn("C1/D1 at window 2: certificate found", trace)

    def test_c_vertex_mixed_on_d_component(self):
        """A C vertex seeing part of a D component closes a cycle through it"""
        hangers = {u: [0] for u in range(10, 35)} | {35: [9], 36: [7]}
        g = hung_path(10, hangers, [(35, 36), (10, 35)])
        cert, trace = self.sweep(g, 10, Fraction(41, 370))
        self.assertIsInstance(cert, Witness)
        self.assertIn("mixed C vertex 10 at window 2: certificate found", trace)

    def test_d_vertex_mixed_on_c_component(self):
        """A D vertex seeing part of a C component closes a cycle through it"""
        hangers = {u: [2] for u in range(10, 33)} | {33: [0], 34: [2], 35: [9]}
        g = hung_path(10, hangers, [(33, 34), (35, 33)])
        cert, trace = self.sweep(g, 10, Fraction(41, 360))
        self.assertIsInstance(cert, Witness)
        self.assertIn("mixed D vertex 35 at window 4: certificate found", trace)

    def test_bipartite_hosts_give_pairs_for_odd_k(self):
        """Trees have no odd cycle pivot-minor, so every certificate is a pair"""
        for seed in range(8):
            g = caterpillar(150, 3, seed=seed)
            for k in (5, 7):
                cert = sweep_pivot_mode(g, spine(g), k, 0.05, 0.004, strict=False)
                self.assertIsInstance(cert, PurePair, f"seed {seed}, k={k}")
                self.assertEqual(verify_certificate(g, cert), [])
        for n in (20, 60, 150):
            cert = sweep_pivot_mode(path(n), range(n), 5, 0.05, 0.004, strict=False)
            self.assertIsInstance(cert, PurePair)

    def test_relaxed_numbers_are_traced(self):
        """Best-effort runs record every precondition they ran without"""
        trace: list[str] = []
        g = Graph.from_edges(11, [(v, v + 1) for v in range(9)] + [(10, 0), (10, 6), (10, 7)])
        sweep_pivot_mode(g, range(10), 5, 0.3, 0.45, strict=False, trace=trace)
        relaxed = relaxed_preconditions(trace)
        self.assertTrue(any("alpha" in line for line in relaxed))
        self.assertTrue(all(line.startswith("pivot sweep") for line in relaxed))

    def test_clean_numbers_leave_no_record(self):
        """A run within its preconditions records nothing relaxed"""
        trace: list[str] = []
        sweep_pivot_mode(path(100), range(100), 5, 0.05, 0.004, trace=trace)
        self.assertEqual(relaxed_preconditions(trace), [])

    def test_strict_numbers(self):
        """Strict mode refuses a degree bound the graph violates"""
        with self.assertRaises(PreconditionError):
            sweep_pivot_mode(path(100), range(100), 5, 0.01, 0.004)

    def test_structural_problems_are_always_raised(self):
        """A non-induced path is rejected even in best-effort mode"""
        with self.assertRaises(PreconditionError):
            sweep_pivot_mode(long_cycle(5), range(5), 5, 0.3, 0.01, strict=False)

    def test_failure_carries_trace(self):
        """When no clause fires the failure lists what was tried"""
        with self.assertRaises(SweepFailure) as ctx:
            sweep_pivot_mode(path(6), range(6), 5, 0.5, 0.9, strict=False)
        self.assertTrue(ctx.exception.trace)


class TestHoleSweep(unittest.TestCase):

    def test_long_cycle_gives_hole(self):
        """The off-path vertex of a long cycle closes the whole cycle"""
        g = long_cycle(120)
        cert = sweep_hole_mode(g, range(119), 5, Fraction(1, 56), Fraction(1, 48))
        self.assertIsInstance(cert, Hole)
        self.assertEqual(len(cert), 120)
        self.assertEqual(cert.order[0], 119)
        self.assertEqual(verify_certificate(g, cert), [])

    def test_path_gives_pair(self):
        """A bare path has no hole and splits into halves"""
        g = path(30)
        cert = sweep_hole_mode(g, range(30), 5, Fraction(1, 15), Fraction(1, 48))
        self.assertIsInstance(cert, PurePair)
        self.assertEqual((len(cert.a), len(cert.b)), (14, 15))

    def test_adjacent_singletons_are_not_a_pair(self):
        """With every two vertices adjacent there is no anticomplete pair to return"""
        with self.assertRaises(SweepFailure) as ctx:
            sweep_hole_mode(Graph.complete(3), [0, 1], 5, Fraction(1, 56), Fraction(1, 48), strict=False)
        self.assertIn("single vertices: every pair is adjacent", ctx.exception.trace)

    def test_singletons_pick_a_non_edge(self):
        """Small graphs give two non-adjacent single vertices"""
        g = path(3)
        cert = sweep_hole_mode(g, [0, 1], 5, Fraction(1, 56), Fraction(1, 48), strict=False)
        self.assertEqual(cert, PurePair(frozenset({0}), frozenset({2}), PairKind.ANTICOMPLETE))
        self.assertEqual(verify_certificate(g, cert), [])

    def test_relaxed_numbers_are_traced(self):
        """Best-effort hole sweeps record the degree bound they ran without"""
        trace: list[str] = []
        sweep_hole_mode(path(3), [0, 1], 5, Fraction(1, 56), Fraction(1, 48), strict=False, trace=trace)
        relaxed = relaxed_preconditions(trace)
        self.assertEqual(len(relaxed), 1)
        self.assertTrue(relaxed[0].startswith("hole sweep precondition relaxed: max degree 2"))

    def test_short_bound(self):
        """Hole bounds below 3 are rejected"""
        with self.assertRaises(PreconditionError):
            sweep_hole_mode(path(10), range(10), 2, 0.1, 0.01, strict=False)


class TestCertificates(unittest.TestCase):

    def test_hole_from_dict(self):
        """Hole certificates load from JSON and verify on a cycle"""
        cert = certificate_from_dict({"type": "hole", "order": [0, 1, 2, 3, 4], "length": 5})
        self.assertEqual(cert, Hole((0, 1, 2, 3, 4)))
        self.assertEqual(verify_certificate(long_cycle(5), cert), [])
        self.assertEqual(len(verify_certificate(path(5), cert)), 1)

    def test_short_hole(self):
        """Holes shorter than the minimum are reported"""
        problems = verify_certificate(long_cycle(4), Hole((0, 1, 2, 3)))
        self.assertIn("below 5", problems[0])

    def test_unknown_type(self):
        """Unknown or missing types are format errors"""
        with self.assertRaises(FormatError):
            certificate_from_dict({"type": "clique"})
        with self.assertRaises(FormatError):
            certificate_from_dict([1, 2])


if __name__ == "__main__":
    unittest.main()
