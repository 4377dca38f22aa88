import unittest

from pygconvex.core.exceptions import InputError
from pygconvex.core.selftest.invariants import CheckResult, InvariantSuite, relative_error, run_invariant_suite
from pygconvex.core.util.utils import to_plain

# a small fraction of the full trial counts keeps the suite fast
SCALE = 0.02


class InvariantSuiteTest(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.results = run_invariant_suite(seed=7, scale=SCALE)

    def test_all_checks_pass(self):
        failed = [r.name for r in self.results if not r.passed]
        self.assertEqual(failed, [])
        self.assertEqual(len(self.results), len(InvariantSuite().checks()))

    def test_objective_convexity_and_scaling_fixed_points(self):
        suite = InvariantSuite(seed=7, scale=SCALE)
        for result in (suite.check_objective_convexity(), suite.check_alternating_fixed_points()):
            self.assertTrue(result.passed, result)
        names = [r.name for r in self.results]
        self.assertIn("objective_convexity", names)
        self.assertIn("alternating_fixed_points", names)

    def test_names_are_unique(self):
        names = [r.name for r in self.results]
        self.assertEqual(len(names), len(set(names)))

    def test_reproducible(self):
        again = run_invariant_suite(seed=7, scale=SCALE)
        self.assertEqual(to_plain(self.results), to_plain(again))

    def test_trials(self):
        suite = InvariantSuite(scale=SCALE)
        self.assertEqual(suite.trials(50), 1)
        self.assertEqual(suite.trials(10000), 200)
        with self.assertRaises(InputError):
            InvariantSuite(scale=0.0)


class CheckResultTest(unittest.TestCase):

    def test_relative_error(self):
        self.assertEqual(relative_error(2.0, 2.0), 0.0)
        self.assertAlmostEqual(relative_error(100.0, 101.0), 1.0 / 101.0)
        self.assertAlmostEqual(relative_error(0.0, 1e-3), 1e-3)

    def test_document_and_row(self):
        result = CheckResult("kadison", True, 0.0, 1e-10, 3)
        self.assertEqual(result.to_document()["samples"], 3)
        self.assertEqual(result.tablefy_to_row("name", "passed"), ["kadison", True])


if __name__ == '__main__':
    unittest.main()
