import unittest

import numpy as np

from pygconvex.core.base import descent_status, feasibility, manifold_kinds
from pygconvex.core.exceptions import UsageError
from pygconvex.core.geometry.manifold import euclidean, orthant, spd_cone
from pygconvex.core.optimize.brascamp_lieb import BLDatum, identity_rows_datum
from pygconvex.core.optimize.operator_scaling import PositiveOperator
from pygconvex.pod.app.config.gconvex_config import GConvexConfig
from pygconvex.pod.app.gconvex_app import GConvexAppFactory
from pygconvex.pod.backend.log_backends import FileLogBackend, StdErrLogBackend
from pygconvex.pod.importing.inputs import parse_point
from pygconvex.pod.tests.base_test import GConvexAppTest


class GConvexAppFactoryTest(unittest.TestCase):

    def test_backends(self):
        config = GConvexConfig(config_file=None, config={"GENERAL": {"log_dir": ""}})
        app = GConvexAppFactory.get(config, verbose=True)
        try:
            self.assertEqual(len(app.backends), 1)
            self.assertIsInstance(app.backends[0], StdErrLogBackend)
            self.assertEqual(app.backends[0].level, "info")
        finally:
            app.close()
        config = GConvexConfig(config_file=None, config={"GENERAL": {"log_dir": "/tmp/pygconvex-test-logs"}})
        backends = GConvexAppFactory._parse_backends(config)
        self.assertEqual(backends[0].level, "warn")
        self.assertIsInstance(backends[1], FileLogBackend)


class GeodesicCommandTest(GConvexAppTest):

    def test_orthant_geodesic(self):
        run = self.app.run_config("geodesic", ["CONNECTION", "MATFUN"])
        result = self.app.geodesic(run, parse_point(manifold_kinds.orthant, "1,0.5"),
                                   parse_point(manifold_kinds.orthant, "0.5,1"))
        np.testing.assert_allclose(result.closed.points[50], [np.sqrt(0.5), np.sqrt(0.5)], atol=1e-12)
        self.assertLess(result.max_deviation, 1e-6)
        self.assertAlmostEqual(result.length, np.sqrt(2.0) * np.log(2.0), places=10)
        self.assertEqual(sorted(result.extra_columns().keys()), ["ode_v_1", "ode_v_2", "ode_x_1", "ode_x_2"])
        self.assertTrue(result.footer()[0].startswith("max_deviation="))

    def test_spd_geodesic_uses_numeric_symbols(self):
        run = self.app.run_config("geodesic", ["CONNECTION", "MATFUN"])
        result = self.app.geodesic(run, parse_point(manifold_kinds.spd, "2,0.5;0.5,1"),
                                   parse_point(manifold_kinds.spd, "1,0;0,3"))
        self.assertEqual(len(result.ode), 101)
        self.assertLess(result.max_deviation, 1e-5)

    def test_mismatched_points(self):
        run = self.app.run_config("geodesic", ["CONNECTION"])
        with self.assertRaises(UsageError):
            self.app.geodesic(run, orthant(2).point([1.0, 1.0]), euclidean(2).point([1.0, 1.0]))
        with self.assertRaises(UsageError):
            self.app.geodesic(run, spd_cone(1).point(np.eye(1)), spd_cone(1).point(np.eye(1)), numeric=False)

    def test_christoffel(self):
        run = self.app.run_config("christoffel", ["CONNECTION"])
        result = self.app.christoffel(run, orthant(1).point([2.0]), numeric=True)
        self.assertEqual(result.source, "numeric")
        self.assertLess(result.closed_deviation, 1e-6)
        closed = self.app.christoffel(run, orthant(1).point([2.0]))
        self.assertEqual(closed.source, "closed")
        self.assertEqual(np.asarray(closed.gamma)[0, 0, 0], -0.5)
        self.assertNotIn("closed_deviation", closed.to_document())


class GConvexCommandTest(GConvexAppTest):

    def test_consistent(self):
        run = self.app.run_config("gconvex", ["GCONVEX"], trials=20)
        report = self.app.gconvex(run, orthant(2), "logbarrier")
        self.assertFalse(report.violated)
        self.assertEqual(report.seed, run.seed)
        self.assertEqual(report.derivatives.pairs, 20)
        self.assertEqual(report.derivatives.first_order_failures, 0)
        self.assertGreaterEqual(report.derivatives.min_second_order, -1e-6)
        self.assertEqual(report.to_document()["derivatives"].tolerance, run["tol_ineq"])

    def test_derivative_steps_follow_the_config(self):
        run = self.app.run_config("gconvex", ["GCONVEX"], trials=5, fd_step=1e-4, second_step=1e-2, tol_ineq=1e-5)
        derivatives = self.app.gconvex(run, spd_cone(2), "neg-logdet").derivatives
        self.assertEqual((derivatives.fd_step, derivatives.second_step, derivatives.tolerance), (1e-4, 1e-2, 1e-5))
        self.assertEqual(derivatives.first_order_failures, 0)

    def test_violated(self):
        run = self.app.run_config("gconvex", ["GCONVEX"], trials=100)
        self.assertTrue(self.app.gconvex(run, euclidean(1), "sin-exp").violated)


class BLCommandTest(GConvexAppTest):

    def test_identity_rows(self):
        run = self.app.run_config("bl", ["DESCENT", "BL"], heuristic_trials=10)
        outcome = self.app.bl(run, identity_rows_datum(2))
        self.assertFalse(outcome.refuted)
        self.assertEqual(outcome.feasibility.status, feasibility.plausible)
        self.assertAlmostEqual(outcome.result.bl_constant, 1.0, delta=1e-6)
        self.assertAlmostEqual(outcome.result.oracle_bl_constant, 1.0, delta=1e-6)
        self.assertTrue(any("started" in line for line in self.backend.lines))

    def test_scaling_condition(self):
        run = self.app.run_config("bl", ["DESCENT", "BL"])
        outcome = self.app.bl(run, BLDatum(identity_rows_datum(2).maps, [1.0, 0.5]))
        self.assertTrue(outcome.refuted)
        self.assertIsNone(outcome.result)
        self.assertIn("Scaling condition", outcome.to_document()["failed_check"])

    def test_subspace_refutation(self):
        run = self.app.run_config("bl", ["DESCENT", "BL"], heuristic_trials=10)
        outcome = self.app.bl(run, BLDatum([np.array([[1.0, 0.0]]), np.array([[1.0, 0.0]])], [1.0, 1.0]))
        self.assertTrue(outcome.refuted)
        self.assertIsNotNone(outcome.feasibility.witness)


class OpscaleCommandTest(GConvexAppTest):

    def test_identity(self):
        run = self.app.run_config("opscale", ["DESCENT", "SCALING"])
        result = self.app.opscale(run, PositiveOperator([np.eye(2)])).result
        self.assertEqual(result.status, descent_status.converged)
        self.assertAlmostEqual(result.log_capacity, 0.0)
        self.assertAlmostEqual(result.alternating_log_capacity, 0.0)
        self.assertEqual(result.residual_trace, [0.0])

    def test_without_alternating(self):
        run = self.app.run_config("opscale", ["DESCENT", "SCALING"])
        doc = self.app.opscale(run, PositiveOperator([np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])]),
                               alternating=False).to_document()
        self.assertNotIn("alternating_log_capacity", doc)
        self.assertAlmostEqual(doc["log_capacity"], np.log(4.0))


if __name__ == '__main__':
    unittest.main()
