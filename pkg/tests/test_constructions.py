import itertools
import unittest

from pivotcert.constructions import (
    STCycleEmbedding,
    antihole_bound,
    antihole_extract,
    classify_fan,
    cycle_reduce,
    fan_extract,
    st_cycle_reduce,
)
from pivotcert.errors import PreconditionError
from pivotcert.generators import anti_hole, fan, long_cycle, st_cycle
from pivotcert.pivot import verify_ck_witness


class TestCycleReduce(unittest.TestCase):

    def test_same_parity_lengths(self):
        """Every shorter cycle of the same parity is extracted"""
        for m in range(3, 13):
            g = long_cycle(m)
            for k in range(3 + (m - 3) % 2, m + 1, 2):
                witness = cycle_reduce(g, list(range(m)), k)
                self.assertTrue(verify_ck_witness(g, witness), f"C{k} from C{m}")
                self.assertEqual(len(witness.ops), 3 * ((m - k) // 2))

    def test_parity_mismatch(self):
        """Odd difference in length is a named precondition failure"""
        with self.assertRaises(PreconditionError) as ctx:
            cycle_reduce(long_cycle(9), list(range(9)), 4)
        self.assertTrue(any("parity" in p for p in ctx.exception.problems))

    def test_order_must_be_induced(self):
        """A non-cycle order is rejected"""
        with self.assertRaises(PreconditionError):
            cycle_reduce(long_cycle(6), [0, 2, 1, 3, 4, 5], 4)


class TestSTCycle(unittest.TestCase):

    def test_embedding_check(self):
        """The generator and the embedding check agree"""
        self.assertEqual(STCycleEmbedding(st_cycle(12, 7), tuple(range(12)), 7).check(), [])
        self.assertNotEqual(STCycleEmbedding(st_cycle(12, 7), tuple(range(12)), 6).check(), [])

    def test_reduction_step(self):
        """One step turns an (s,t)-cycle into an (s-2, t-6)-cycle"""
        e = STCycleEmbedding.from_order(st_cycle(10, 8), range(10), 8)
        ops, reduced = st_cycle_reduce(e)
        self.assertEqual(len(ops), 3)
        self.assertEqual((reduced.s, reduced.t), (8, 2))
        self.assertEqual(reduced.check(), [])

    def test_reduction_chains(self):
        """Repeated steps run every (s,t)-cycle with 6 <= t <= s <= 16 down below t = 6"""
        for s in range(6, 17):
            for t in range(6, s + 1):
                e = STCycleEmbedding.from_order(st_cycle(s, t), range(s), t)
                steps = 0
                while e.t >= 6:
                    _, e = st_cycle_reduce(e)
                    steps += 1
                    self.assertEqual(e.check(), [], f"({s},{t}) after {steps} steps")
                self.assertEqual((e.s, e.t), (s - 2 * steps, t - 6 * steps))

    def test_short_run_is_rejected(self):
        """t below 6 cannot be reduced"""
        e = STCycleEmbedding.from_order(st_cycle(10, 5), range(10), 5)
        with self.assertRaises(PreconditionError):
            st_cycle_reduce(e)


class TestAntiHole(unittest.TestCase):

    def test_extracts_small_cycles(self):
        """Anti-holes at and just above the bound yield C_k"""
        for k in range(3, 9):
            for m in (antihole_bound(k), antihole_bound(k) + 1):
                g = anti_hole(m)
                witness = antihole_extract(g, list(range(m)), k)
                self.assertTrue(verify_ck_witness(g, witness), f"C{k} from anti-hole {m}")

    def test_bound_values(self):
        """The length bound is ceil(3k/2) + 6"""
        self.assertEqual([antihole_bound(k) for k in (3, 4, 5, 6)], [11, 12, 14, 15])

    def test_too_short(self):
        """Anti-holes below the bound are rejected"""
        with self.assertRaises(PreconditionError):
            antihole_extract(anti_hole(11), list(range(11)), 4)

    def test_not_an_anti_hole(self):
        """A hole is not accepted as an anti-hole"""
        with self.assertRaises(PreconditionError):
            antihole_extract(long_cycle(14), list(range(14)), 5)


class TestFan(unittest.TestCase):

    def fan_descriptor(self, intervals):
        g = fan(intervals)
        length = sum(intervals)
        return classify_fan(g, length + 1, list(range(length + 1)))

    def test_classify(self):
        """Interval lengths are read off the center's attachments"""
        f = self.fan_descriptor([4, 2, 1])
        self.assertEqual(f.intervals, (4, 2, 1))
        self.assertEqual(f.attachments, [0, 4, 6, 7])
        self.assertTrue(f.is_k_good(6))
        self.assertTrue(f.is_strongly_k_good(6))
        self.assertFalse(f.is_strongly_k_good(7))

    def test_center_on_path(self):
        """The center may not lie on the main path"""
        with self.assertRaises(PreconditionError):
            classify_fan(fan([3, 1]), 0, [0, 1, 2, 3])

    def test_extract(self):
        """Strongly good fans of several shapes give verified witnesses"""
        for intervals, k in (([3, 1], 5), ([4, 2, 1], 6), ([5, 2, 1], 5), ([4, 3], 5), ([1, 4], 5)):
            f = self.fan_descriptor(intervals)
            witness = fan_extract(f, k)
            self.assertTrue(verify_ck_witness(f.host, witness), f"C{k} from fan {intervals}")

    def test_extract_grid(self):
        """Every strongly k-good fan with two or three intervals of length up to k yields C_k"""
        for k in range(5, 9):
            tried = 0
            for count in (2, 3):
                for intervals in itertools.product(range(1, k + 1), repeat=count):
                    f = self.fan_descriptor(list(intervals))
                    if not f.is_strongly_k_good(k):
                        continue
                    witness = fan_extract(f, k)
                    self.assertTrue(verify_ck_witness(f.host, witness), f"C{k} from fan {intervals}")
                    tried += 1
            self.assertGreater(tried, 0)

    def test_not_strongly_good(self):
        """A fan without an odd end interval is refused"""
        with self.assertRaises(PreconditionError):
            fan_extract(self.fan_descriptor([4, 2]), 5)

    def test_small_k(self):
        """Fan extraction needs k of at least five"""
        with self.assertRaises(PreconditionError):
            fan_extract(self.fan_descriptor([3, 1]), 4)


if __name__ == "__main__":
    unittest.main()
