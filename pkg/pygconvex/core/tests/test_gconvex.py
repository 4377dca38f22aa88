import unittest

import numpy as np

from pygconvex.core.base import verdicts
from pygconvex.core.exceptions import EvaluationError, InputError, UsageError
from pygconvex.core.geometry.gconvex import GCONVEX_BUILTINS, ScalarField, builtin_field, builtin_names, \
    default_sampler, default_t_grid, derivative_summary, determinant_level_set, first_order_test, midpoint_test, \
    second_differences, second_order_test, totally_convex_test, violation_search
from pygconvex.core.geometry.manifold import euclidean, geodesic_point, orthant, spd_cone
from pygconvex.core.geometry.matfun import sym_exp
from pygconvex.core.util.random import make_rng, random_symmetric


def _unit_det(rng, n):
    a = sym_exp(random_symmetric(rng, n))
    return np.asarray(a) / np.linalg.det(np.asarray(a)) ** (1.0 / n)


class MidpointTest(unittest.TestCase):

    def test_logbarrier_is_consistent(self):
        m = orthant(2)
        f = builtin_field("logbarrier", m)
        report = midpoint_test(f, m.point([0.2, 3.0]), m.point([5.0, 0.4]))
        self.assertEqual(report.verdict, verdicts.consistent)
        self.assertIsNone(report.witness)
        self.assertEqual(report.samples, len(default_t_grid()))

    def test_log_minus_coordinate_is_violated(self):
        m = orthant(2)
        f = builtin_field("log-minus-coordinate", m)
        report = midpoint_test(f, m.point([1.0, 0.5]), m.point([1.0, 8.0]))
        self.assertTrue(report.violated)
        self.assertLess(report.witness.gap, 0.0)
        self.assertTrue(0.0 < report.witness.t < 1.0)

    def test_logdet_is_geodesically_linear(self):
        m = spd_cone(3)
        rng = make_rng(5)
        p, q = (m.point(sym_exp(random_symmetric(rng, 3))) for _ in range(2))
        report = midpoint_test(builtin_field("logdet", m), p, q)
        self.assertEqual(report.verdict, verdicts.consistent)
        self.assertLess(abs(report.min_second_difference), 1e-6)

    def test_grid_outside_unit_interval(self):
        m = orthant(1)
        with self.assertRaises(UsageError):
            midpoint_test(builtin_field("logbarrier", m), m.point([1.0]), m.point([2.0]), t_grid=[0.5, 1.5])

    def test_second_differences_of_parabola(self):
        t = np.linspace(0.0, 1.0, 11)
        np.testing.assert_allclose(second_differences(t, t ** 2), 2.0, rtol=1e-9)


class DerivativeTestsTest(unittest.TestCase):

    def test_first_order(self):
        m = orthant(2)
        f = builtin_field("log-squared", m)
        lhs, rhs, ok = first_order_test(f, m.point([0.5, 2.0]), m.point([3.0, 0.7]))
        self.assertTrue(ok)
        self.assertLessEqual(lhs, rhs)

    def test_first_order_fails_for_concave_field(self):
        m = orthant(2)
        f = builtin_field("log-minus-coordinate", m)
        self.assertFalse(first_order_test(f, m.point([1.0, 0.5]), m.point([1.0, 8.0])).ok)

    def test_second_order(self):
        m = orthant(1)
        # f(gamma(t)) = t^2 log(2)^2 on the geodesic from 1 to 2
        value = second_order_test(builtin_field("log-squared", m), m.point([1.0]), m.point([2.0]))
        self.assertAlmostEqual(value, 2.0 * np.log(2.0) ** 2, places=5)

    def test_summary_of_a_convex_field(self):
        m = spd_cone(2)
        summary = derivative_summary(builtin_field("neg-logdet", m), default_sampler(m), 20, seed=3, delta=1e-4,
                                     dt=1e-2, tol=1e-6)
        self.assertEqual(summary.pairs, 20)
        self.assertEqual(summary.first_order_failures, 0)
        # -log det is linear along geodesics
        self.assertLess(abs(summary.min_second_order), 1e-6)
        self.assertEqual((summary.fd_step, summary.second_step), (1e-4, 1e-2))

    def test_summary_of_a_concave_field(self):
        m = orthant(2)
        pair = (m.point([1.0, 0.5]), m.point([1.0, 8.0]))
        summary = derivative_summary(builtin_field("log-minus-coordinate", m), lambda rng: pair, 3)
        self.assertEqual(summary.first_order_failures, 3)
        self.assertLess(summary.min_second_order, 0.0)
        with self.assertRaises(UsageError):
            derivative_summary(builtin_field("logbarrier", m), lambda rng: pair, 0)
        with self.assertRaises(InputError):
            derivative_summary(builtin_field("logbarrier", m), lambda rng: pair, 1, dt=0.0)


class ViolationSearchTest(unittest.TestCase):

    def test_sin_exp_violation(self):
        m = euclidean(1)
        report = violation_search(builtin_field("sin-exp", m), default_sampler(m), 100, seed=1)
        self.assertTrue(report.violated)
        w = report.witness
        f = builtin_field("sin-exp", m)
        # the witness is a certificate without finite differences
        gap = (1 - w.t) * f(w.p) + w.t * f(w.q) - f(geodesic_point(w.p, w.q, w.t))
        self.assertAlmostEqual(gap, w.gap)
        self.assertLess(gap, 0.0)

    def test_convex_builtins_are_consistent(self):
        for name in GCONVEX_BUILTINS:
            m = spd_cone(2) if "logdet" in name else orthant(2)
            report = violation_search(builtin_field(name, m), default_sampler(m), 50, seed=3)
            self.assertEqual(report.verdict, verdicts.consistent, name)
            self.assertEqual(report.samples, 50)

    def test_reproducible(self):
        m = euclidean(2)
        f = builtin_field("sin-exp", m)
        a = violation_search(f, default_sampler(m), 100, seed=11)
        b = violation_search(f, default_sampler(m), 100, seed=11)
        self.assertEqual(a.samples, b.samples)
        np.testing.assert_array_equal(a.witness.p.array, b.witness.p.array)
        self.assertEqual(a.witness.gap, b.witness.gap)

    def test_trials_have_to_be_positive(self):
        m = orthant(1)
        with self.assertRaises(UsageError):
            violation_search(builtin_field("logbarrier", m), default_sampler(m), 0)

    def test_document(self):
        m = orthant(1)
        doc = violation_search(builtin_field("logbarrier", m), default_sampler(m), 10, seed=2).to_document()
        self.assertEqual(doc["verdict"], "consistent")
        self.assertEqual(doc["function"], "logbarrier")
        self.assertEqual(doc["seed"], 2)


class BuiltinTest(unittest.TestCase):

    def test_registry(self):
        self.assertIn("sin-exp", builtin_names())
        self.assertEqual(builtin_names(), sorted(builtin_names()))
        with self.assertRaises(InputError):
            builtin_field("nope", orthant(1))
        with self.assertRaises(UsageError):
            builtin_field("logdet", orthant(2))
        with self.assertRaises(InputError):
            builtin_field("log-minus-coordinate", orthant(1))

    def test_posynomial_defaults(self):
        m = orthant(2)
        self.assertAlmostEqual(builtin_field("posynomial", m)(m.point([2.0, 3.0])), 1.0 + 2.0 + 18.0)
        self.assertAlmostEqual(builtin_field("log-posynomial", m)(m.point([2.0, 3.0])), np.log(21.0))
        with self.assertRaises(InputError):
            builtin_field("posynomial", m, terms=[(-1.0, [1.0, 0.0])])

    def test_field_checks(self):
        m = orthant(1)
        f = ScalarField(m, lambda x: float("inf"), "inf")
        with self.assertRaises(EvaluationError):
            f(m.point([1.0]))
        with self.assertRaises(UsageError):
            builtin_field("logbarrier", m)(orthant(2).point([1.0, 1.0]))


class TotalConvexityTest(unittest.TestCase):

    def test_unit_determinant_set(self):
        rng = make_rng(29)
        m = spd_cone(3)
        member = determinant_level_set(1.0)
        p, q = m.point(_unit_det(rng, 3)), m.point(_unit_det(rng, 3))
        self.assertEqual(totally_convex_test(member, p, q), (True, None))

    def test_other_level_is_left(self):
        m = spd_cone(2)
        member = determinant_level_set(1.0)
        ok, t = totally_convex_test(member, m.point(np.eye(2)), m.point(np.diag([2.0, 1.0])))
        self.assertFalse(ok)
        self.assertGreater(t, 0.0)
        with self.assertRaises(InputError):
            determinant_level_set(0.0)


if __name__ == '__main__':
    unittest.main()
