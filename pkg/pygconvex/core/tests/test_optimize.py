import unittest

import numpy as np
from numpy.testing import assert_allclose

from pygconvex.core.base import descent_status, feasibility
from pygconvex.core.exceptions import InputError, PreconditionError, StagnationError
from pygconvex.core.geometry.gconvex import ScalarField, second_order_test
from pygconvex.core.geometry.manifold import spd_cone
from pygconvex.core.geometry.matfun import spd_logdet, spd_sqrt_pair, sym_exp
from pygconvex.core.optimize.brascamp_lieb import BLDatum, F_eval, F_euclid_grad, F_riemannian_grad, \
    check_nondegeneracy, check_scaling_condition, heuristic_feasibility, holder_datum, identity_rows_datum, \
    lieb_gaussian_value, minimize_F, random_rank_one_datum, rank_one_convex_oracle, subspace_defect
from pygconvex.core.optimize.geodesic_descent import DescentOptions, geodesic_descent
from pygconvex.core.optimize.operator_scaling import PositiveOperator, alternating_scaling, apply, apply_adjoint, \
    capacity_minimize, kadison_residual, log_capacity_eval, loewner_gap, loewner_second_derivative, \
    logdet_second_derivative, orthogonal_mixture, random_operator, scale, schur_certificate
from pygconvex.core.util.random import make_rng, random_symmetric


def _spd(rng, n, radius=1.0):
    return np.asarray(sym_exp(random_symmetric(rng, n, radius)))


def _min_second_difference(fn, n, seed, pairs=10):
    m = spd_cone(n)
    f = ScalarField(m, fn)
    rng = make_rng(seed)
    return min(second_order_test(f, m.point(_spd(rng, n)), m.point(_spd(rng, n))) for _ in range(pairs))


class DescentOptionsTest(unittest.TestCase):

    def test_of(self):
        options = DescentOptions.of({"step": 0.5}, max_iter=10, grad_tol=None)
        self.assertEqual(options.step, 0.5)
        self.assertEqual(options.max_iter, 10)
        self.assertEqual(options.grad_tol, 1e-8)
        self.assertEqual(DescentOptions.of(options, step=2.0).max_iter, 10)

    def test_validation(self):
        with self.assertRaises(InputError):
            DescentOptions(step=0.0)
        with self.assertRaises(InputError):
            DescentOptions(armijo_factor=1.0)
        # the divergence floor is signed
        self.assertEqual(DescentOptions(divergence_floor=10.0).divergence_floor, 10.0)


class GeodesicDescentTest(unittest.TestCase):

    def test_trace_minus_logdet(self):
        # tr X - log det X is minimal at I
        rng = make_rng(31)
        result = geodesic_descent(lambda x: np.trace(x) - np.linalg.slogdet(x)[1],
                                  lambda x: np.eye(3) - np.linalg.inv(x), _spd(rng, 3, 2.0))
        self.assertEqual(result.status, descent_status.converged)
        assert_allclose(result.X, np.eye(3), atol=1e-7)
        self.assertAlmostEqual(result.value, 3.0)
        self.assertTrue(all(a >= b - 1e-12 for a, b in zip(result.values, result.values[1:])))

    def test_divergence(self):
        result = geodesic_descent(lambda x: -np.linalg.slogdet(x)[1], lambda x: -np.linalg.inv(x), np.eye(2),
                                  divergence_status=descent_status.capacity_zero_suspected)
        self.assertEqual(result.status, descent_status.capacity_zero_suspected)
        self.assertLess(result.value, -50.0)

    def test_divergence_towards_the_boundary(self):
        # 2 log X_11 - log det X is unbounded below only as the iterate degenerates
        def objective(x):
            return 2.0 * np.log(x[0, 0]) - spd_logdet(x)

        def gradient(x):
            return 2.0 * np.diag([1.0 / x[0, 0], 0.0]) - np.linalg.inv(x)

        result = geodesic_descent(objective, gradient, np.eye(2),
                                  divergence_status=descent_status.capacity_zero_suspected)
        self.assertEqual(result.status, descent_status.capacity_zero_suspected)
        self.assertGreater(result.value, -50.0)
        self.assertLess(result.value, -10.0)
        self.assertLess(result.iterations, DescentOptions().max_iter)

    def test_max_iter(self):
        result = geodesic_descent(lambda x: np.trace(x) - np.linalg.slogdet(x)[1],
                                  lambda x: np.eye(2) - np.linalg.inv(x), 50.0 * np.eye(2),
                                  options={"max_iter": 1})
        self.assertEqual(result.status, descent_status.max_iter)
        self.assertEqual(result.iterations, 1)

    def test_stagnation(self):
        # gradient of the wrong sign, no step decreases the objective
        with self.assertRaises(StagnationError) as ctx:
            geodesic_descent(lambda x: np.trace(x), lambda x: -np.eye(2), np.eye(2))
        assert_allclose(ctx.exception.best, np.eye(2))


class BLDatumTest(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(InputError):
            BLDatum([], [])
        with self.assertRaises(InputError):
            BLDatum([np.eye(2)], [1.0, 1.0])
        with self.assertRaises(InputError):
            BLDatum([np.eye(2)[:1], np.eye(3)[:1]], [1.0, 1.0])
        with self.assertRaises(InputError):
            BLDatum([np.eye(2)[:1], np.eye(2)[1:]], [1.0, -1.0])

    def test_conditions(self):
        d = identity_rows_datum(3)
        self.assertTrue(d.rank_one)
        self.assertTrue(check_scaling_condition(d))
        self.assertTrue(check_nondegeneracy(d))
        self.assertFalse(check_scaling_condition(BLDatum(d.maps, [1.0, 1.0, 0.5])))
        self.assertFalse(check_nondegeneracy(BLDatum([np.zeros((1, 2)), np.eye(2)[:1], np.eye(2)[1:]],
                                                     [1.0, 0.5, 0.5])))


class BrascampLiebTest(unittest.TestCase):

    def test_identity_rows(self):
        result = minimize_F(identity_rows_datum(2))
        self.assertEqual(result.status, descent_status.converged)
        self.assertAlmostEqual(result.bl_constant, 1.0, delta=1e-6)
        self.assertEqual(result.feasibility, feasibility.heuristic)

    def test_holder(self):
        self.assertAlmostEqual(minimize_F(holder_datum([0.3, 0.7])).bl_constant, 1.0, delta=1e-6)

    def test_F_is_invariant_under_scaling(self):
        rng = make_rng(37)
        d = random_rank_one_datum(rng, 3, 5)
        x = _spd(rng, 3)
        # F(cX) = F(X) since sum p_j n_j = n
        self.assertAlmostEqual(F_eval(d, 7.0 * x), F_eval(d, x), places=10)

    def test_gradient_matches_finite_differences(self):
        rng = make_rng(41)
        d = random_rank_one_datum(rng, 2, 4)
        x = _spd(rng, 2)
        s = random_symmetric(rng, 2)
        h = 1e-6
        numeric = (F_eval(d, x + h * s) - F_eval(d, x - h * s)) / (2 * h)
        self.assertAlmostEqual(float(np.sum(F_euclid_grad(d, x) * s)), numeric, places=6)

    def test_riemannian_gradient(self):
        rng = make_rng(42)
        d = random_rank_one_datum(rng, 3, 5)
        x = _spd(rng, 3)
        half, _ = spd_sqrt_pair(x)
        assert_allclose(F_riemannian_grad(d, x), half @ F_euclid_grad(d, x) @ half, atol=1e-10)
        result = minimize_F(d)
        self.assertLess(np.linalg.norm(F_riemannian_grad(d, result.X_star)), 1e-6)

    def test_descent_matches_oracle(self):
        for seed in (1, 2, 3):
            d = random_rank_one_datum(make_rng(seed), 2, 4)
            descent = minimize_F(d)
            oracle = rank_one_convex_oracle(d)
            self.assertEqual(descent.status, descent_status.converged)
            self.assertAlmostEqual(descent.bl_constant / oracle.bl_constant, 1.0, delta=1e-4)

    def test_gaussian_extremiser(self):
        d = random_rank_one_datum(make_rng(43), 3, 5)
        result = minimize_F(d)
        x = np.asarray(result.X_star)
        extremiser = [np.linalg.inv(b @ x @ b.T) for b in d.maps]
        self.assertAlmostEqual(lieb_gaussian_value(d, extremiser) / result.bl_constant, 1.0, delta=1e-6)
        rng = make_rng(47)
        for _ in range(10):
            other = [np.exp(rng.normal(size=(1, 1))) for _ in d.maps]
            self.assertLessEqual(lieb_gaussian_value(d, other), result.bl_constant * (1 + 1e-9))

    def test_infeasible_datum(self):
        # twice the same row, span(e_2) is lost
        d = BLDatum([np.array([[1.0, 0.0]]), np.array([[1.0, 0.0]])], [1.0, 1.0])
        report = heuristic_feasibility(d, trials=10, seed=1)
        self.assertTrue(report.refuted)
        self.assertGreater(subspace_defect(d, report.witness), 0.0)
        result = minimize_F(d)
        self.assertEqual(result.status, descent_status.infeasible_suspected)
        self.assertEqual(len(result.warnings), 1)
        self.assertLess(result.iterations, DescentOptions().max_iter)

    def test_F_is_geodesically_convex(self):
        for d in (identity_rows_datum(3), random_rank_one_datum(make_rng(43), 3, 5),
                  BLDatum([np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]])], [1.0, 1.0])):
            self.assertGreaterEqual(_min_second_difference(lambda x: F_eval(d, x), d.n, 44), -1e-6)

    def test_F_of_coordinate_rows(self):
        d = BLDatum([np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]])], [1.0, 1.0])
        self.assertAlmostEqual(F_eval(d, np.array([[2.0, 1.0], [1.0, 2.0]])), np.log(4.0) - np.log(3.0))

    def test_feasible_datum_is_plausible(self):
        report = heuristic_feasibility(identity_rows_datum(3), trials=20, seed=1)
        self.assertEqual(report.status, feasibility.plausible)
        self.assertEqual(report.subspaces_tested, 7 + 20)

    def test_preconditions(self):
        with self.assertRaises(PreconditionError):
            heuristic_feasibility(BLDatum(identity_rows_datum(2).maps, [1.0, 0.5]))
        with self.assertRaises(PreconditionError):
            minimize_F(BLDatum(identity_rows_datum(2).maps, [1.0, 0.5]))
        with self.assertRaises(PreconditionError):
            minimize_F(BLDatum([np.zeros((1, 2)), np.eye(2)[:1], np.eye(2)[1:]], [1.0, 0.5, 0.5]))
        with self.assertRaises(PreconditionError):
            rank_one_convex_oracle(BLDatum([np.eye(2)], [1.0]))

    def test_oracle_on_identity_rows(self):
        self.assertAlmostEqual(rank_one_convex_oracle(identity_rows_datum(3)).bl_constant, 1.0, delta=1e-8)


class PositiveOperatorTest(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(InputError):
            PositiveOperator([])
        with self.assertRaises(InputError):
            PositiveOperator([np.eye(2), np.eye(3)])
        with self.assertRaises(InputError):
            PositiveOperator([np.diag([1.0, 0.0])])
        with self.assertRaises(InputError):
            apply(PositiveOperator([np.eye(2)]), np.eye(3))

    def test_adjoint(self):
        rng = make_rng(51)
        T = random_operator(rng, 3, 4)
        x, y = _spd(rng, 3), random_symmetric(rng, 3)
        # <T(X), Y> = <X, T*(Y)>
        self.assertAlmostEqual(float(np.sum(np.asarray(apply(T, x)) * y)),
                               float(np.sum(x * np.asarray(apply_adjoint(T, y)))), places=10)
        assert_allclose(np.asarray(apply_adjoint(T, np.eye(3))), T.column_sum(), atol=1e-12)

    def test_identity(self):
        T = PositiveOperator([np.eye(3)])
        capacity = capacity_minimize(T)
        self.assertEqual(capacity.status, descent_status.converged)
        self.assertAlmostEqual(capacity.log_capacity, 0.0)
        result = scale(T, capacity.X_star)
        self.assertAlmostEqual(result.residual_left, 0.0)
        self.assertAlmostEqual(result.residual_right, 0.0)

    def test_fewer_kraus_matrices_than_the_order(self):
        rng = make_rng(52)
        for n in (2, 3):
            T = PositiveOperator([np.eye(n)])
            x = _spd(rng, n)
            assert_allclose(np.asarray(apply(T, x)), x, atol=1e-12)
            self.assertAlmostEqual(log_capacity_eval(T, x), 0.0, places=10)
        self.assertEqual(PositiveOperator([np.diag([2.0, 1.0]) / np.sqrt(5.0)]).m, 1)
        self.assertEqual(random_operator(rng, 3, 2).m, 2)

    def test_diagonal_projections(self):
        T = PositiveOperator([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        x = np.array([[2.0, 1.0], [1.0, 2.0]])
        assert_allclose(np.asarray(apply(T, x)), np.diag([2.0, 2.0]), atol=1e-12)
        self.assertAlmostEqual(log_capacity_eval(T, x), np.log(4.0) - np.log(3.0))

    def test_orthogonal_mixture_has_capacity_one(self):
        T = orthogonal_mixture(make_rng(53), 3, 4)
        self.assertAlmostEqual(capacity_minimize(T).log_capacity, 0.0, places=8)
        self.assertAlmostEqual(alternating_scaling(T).log_capacity, 0.0, places=8)


class CapacityTest(unittest.TestCase):

    def test_descent_matches_alternating_scaling(self):
        T = random_operator(make_rng(59), 3, 4)
        capacity = capacity_minimize(T)
        oracle = alternating_scaling(T)
        self.assertEqual(capacity.status, descent_status.converged)
        self.assertAlmostEqual(capacity.log_capacity, oracle.log_capacity, delta=1e-6)
        self.assertLessEqual(oracle.residuals[-1], 1e-10)
        result = scale(T, capacity.X_star)
        self.assertLess(result.residual_left, 1e-10)
        self.assertLess(result.residual_right, 1e-6)

    def test_capacity_is_a_lower_bound(self):
        rng = make_rng(61)
        T = random_operator(rng, 2, 3)
        log_cap = capacity_minimize(T).log_capacity
        for _ in range(20):
            self.assertGreaterEqual(log_capacity_eval(T, _spd(rng, 2, 2.0)), log_cap - 1e-9)

    def test_log_capacity_is_geodesically_convex(self):
        for T in (random_operator(make_rng(62), 3, 4), random_operator(make_rng(63), 2, 1),
                  PositiveOperator([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])):
            self.assertGreaterEqual(_min_second_difference(lambda x: log_capacity_eval(T, x), T.n, 64), -1e-6)

    def test_alternating_scaling_fixed_point(self):
        result = alternating_scaling(PositiveOperator([np.eye(3)]))
        self.assertEqual(result.iterations, 0)
        self.assertEqual(result.residuals, [0.0])
        self.assertEqual(result.log_capacity, 0.0)
        mixture = alternating_scaling(orthogonal_mixture(make_rng(65), 3, 4))
        self.assertEqual(mixture.iterations, 0)
        self.assertLessEqual(mixture.residuals[0], 1e-10)

    def test_alternating_scaling_of_a_single_kraus_matrix(self):
        a = np.diag([2.0, 1.0]) / np.sqrt(5.0)
        result = alternating_scaling(PositiveOperator([a]))
        self.assertLessEqual(result.iterations, 50)
        self.assertLessEqual(result.residuals[-1], 1e-10)
        # cap(X -> A X A^T) = det(A)^2
        self.assertAlmostEqual(result.log_capacity, 2.0 * np.log(np.linalg.det(a)), places=10)


class OperatorInequalitiesTest(unittest.TestCase):

    def test_kadison_and_schur(self):
        rng = make_rng(67)
        T = random_operator(rng, 3, 3)
        for _ in range(10):
            p, x = _spd(rng, 3), random_symmetric(rng, 3)
            self.assertGreaterEqual(kadison_residual(T, p, x), -1e-10)
            self.assertGreaterEqual(schur_certificate(T, p, x), -1e-10)

    def test_loewner(self):
        rng = make_rng(71)
        T = random_operator(rng, 2, 3)
        for t in (0.25, 0.5, 0.75):
            self.assertGreaterEqual(loewner_gap(T, _spd(rng, 2), _spd(rng, 2), t), -1e-8)
        p, s = _spd(rng, 2), random_symmetric(rng, 2)
        self.assertGreaterEqual(np.linalg.eigvalsh(np.asarray(loewner_second_derivative(T, p, s)))[0], -1e-10)
        self.assertGreaterEqual(logdet_second_derivative(T, p, s), -1e-10)


if __name__ == '__main__':
    unittest.main()
