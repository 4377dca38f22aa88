"""
Operator scaling for square operators T(X) = sum_j A_j X A_j^T.

The log capacity log det T(X) - log det X is geodesically convex on the SPD cone. Its minimiser X* yields the doubly
stochastic scaling A_j -> T(X*)^{-1/2} A_j X*^{1/2}. Alternating row / column normalisation is an independent oracle
for the capacity. Capacities are handled on the log scale only.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from pygconvex.core.base import descent_status
from pygconvex.core.events.events import signals
from pygconvex.core.exceptions import ConditioningError, DegeneracyError, InputError
from pygconvex.core.geometry.matfun import SpdMatrix, SymMatrix, spd_logdet, spd_power, spd_sqrt_pair, sym, sym_exp
from pygconvex.core.model.generic.i_executable_mixin import ExecuteableMixin
from pygconvex.core.model.generic.i_model_mixins import LoggableMixin, ProgressableMixin
from pygconvex.core.optimize.geodesic_descent import DescentOptions, GeodesicDescent
from pygconvex.core.printing.tablefyable import Tablefyable
from pygconvex.core.util.random import make_rng, random_symmetric

POSITIVITY_PROBES = 20
SCALING_ITERS = 1000
SCALING_TOL = 1e-10
UNITAL_TOL = 1e-8


class PositiveOperator:
    """
    T(X) = sum_j A_j X A_j^T with square Kraus matrices A_j. With check=True strict positivity is certified
    probabilistically: sum A A^T and sum A^T A are positive definite and T maps `probes` random SPD matrices to
    SPD matrices. A single invertible Kraus matrix is strictly positive.
    """
    __slots__ = ("n", "kraus")

    def __init__(self, kraus: Sequence, check: bool = True, probes: int = POSITIVITY_PROBES, seed: int = None):
        kraus = [np.atleast_2d(np.array(a, dtype=float)) for a in kraus]
        if len(kraus) == 0:
            raise InputError("An operator needs at least one Kraus matrix")
        n = kraus[0].shape[0]
        for j, a in enumerate(kraus):
            if a.shape != (n, n):
                raise InputError("Kraus matrix %d has shape %s, expected (%d, %d)" % (j, a.shape, n, n))
            if not np.all(np.isfinite(a)):
                raise InputError("Kraus matrix %d has non finite entries" % j)
            a.setflags(write=False)
        self.n = n
        self.kraus = tuple(kraus)
        if check:
            self._check_strictly_positive(probes, seed)

    @property
    def m(self):
        return len(self.kraus)

    def _check_strictly_positive(self, probes, seed):
        for what, a in (("sum A A^T", self.row_sum()), ("sum A^T A", self.column_sum())):
            if not _is_positive_definite(a):
                raise InputError("Operator is not strictly positive: %s is singular" % what)
        rng = make_rng(seed, 2)
        for _ in range(probes):
            probe = np.asarray(sym_exp(random_symmetric(rng, self.n, 1.0)))
            if not _is_positive_definite(self.apply_array(probe)):
                raise InputError("Operator is not strictly positive: an SPD probe is mapped to a singular matrix")

    def apply_array(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return sym(sum(a @ x @ a.T for a in self.kraus))

    def adjoint_array(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return sym(sum(a.T @ x @ a for a in self.kraus))

    def row_sum(self) -> np.ndarray:
        """ sum A A^T = T(I) """
        return sym(sum(a @ a.T for a in self.kraus))

    def column_sum(self) -> np.ndarray:
        """ sum A^T A = T*(I) """
        return sym(sum(a.T @ a for a in self.kraus))

    def __call__(self, x):
        return self.apply_array(x)

    def to_document(self):
        return {"n": self.n, "A": list(self.kraus)}

    def __repr__(self):
        return "PositiveOperator(n=%d, m=%d)" % (self.n, self.m)


def _is_positive_definite(a):
    try:
        scipy.linalg.cholesky(a)
    except scipy.linalg.LinAlgError:
        return False
    return True


def random_operator(rng, n: int, m: int) -> PositiveOperator:
    """ m Gaussian Kraus matrices of order n. """
    return PositiveOperator([rng.standard_normal((n, n)) for _ in range(m)], seed=int(rng.integers(2 ** 31)))


def orthogonal_mixture(rng, n: int, m: int) -> PositiveOperator:
    """ A_j = U_j / sqrt(m) with random orthogonal U_j. Its capacity is 1. """
    kraus = []
    for _ in range(m):
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        kraus.append(q * np.sign(np.diag(r)) / np.sqrt(m))
    return PositiveOperator(kraus)


def _check_order(T: PositiveOperator, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (T.n, T.n):
        raise InputError("Operator of order %d applied to a matrix of shape %s" % (T.n, x.shape))
    return x


def apply(T: PositiveOperator, X) -> SymMatrix:
    return SymMatrix(T.apply_array(_check_order(T, X)))


def apply_adjoint(T: PositiveOperator, X) -> SymMatrix:
    """ T*(X) = sum A_j^T X A_j """
    return SymMatrix(T.adjoint_array(_check_order(T, X)))


def log_capacity_eval(T: PositiveOperator, X) -> float:
    """ log det T(X) - log det X """
    x = _check_order(T, X)
    return spd_logdet(T.apply_array(x)) - spd_logdet(x)


def _inverse(a, what):
    try:
        c = scipy.linalg.cho_factor(a)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise ConditioningError("%s is not positive definite: %s" % (what, e))
    return scipy.linalg.cho_solve(c, np.eye(a.shape[0]))


def capacity_grad(T: PositiveOperator, X) -> np.ndarray:
    """ T*(T(X)^{-1}) - X^{-1} """
    x = _check_order(T, X)
    return sym(T.adjoint_array(_inverse(T.apply_array(x), "T(X)")) - _inverse(x, "X"))


@dataclass(eq=False)
class CapacityResult:
    X_star: SpdMatrix
    log_capacity: float
    iterations: int
    gradient_norm: float
    status: str

    def __iter__(self):
        return iter((self.X_star, self.log_capacity))


def capacity_minimize(T: PositiveOperator, X0=None, options=None) -> CapacityResult:
    """
    Geodesic gradient descent on the log capacity. Divergence is reported as capacity_zero_suspected.
    """
    x0 = np.eye(T.n) if X0 is None else _check_order(T, X0)
    engine = GeodesicDescent(lambda x: log_capacity_eval(T, x), lambda x: capacity_grad(T, x),
                             DescentOptions.of(options), descent_status.capacity_zero_suspected, name="capacity")
    result = engine.execute(x0)
    return CapacityResult(SpdMatrix._wrap(sym(result.X)), result.value, result.iterations, result.gradient_norm,
                          result.status)


@dataclass(eq=False)
class ScalingResult(Tablefyable):
    X_star: SpdMatrix
    log_capacity: float
    scaled: List[np.ndarray]
    residual_left: float
    residual_right: float
    status: Optional[str] = None
    iterations: Optional[int] = None
    gradient_norm: Optional[float] = None
    alternating_log_capacity: Optional[float] = None
    residual_trace: List[float] = field(default_factory=list)

    @classmethod
    def _tablefy_register_columns(cls):
        cls.tablefy_register("status", "log_capacity", "residual_left", "residual_right", "iterations",
                             "alternating_log_capacity")

    def to_document(self):
        doc = {"X_star": self.X_star, "log_capacity": self.log_capacity, "scaled": list(self.scaled),
               "residual_left": self.residual_left, "residual_right": self.residual_right}
        for key in ("status", "iterations", "gradient_norm", "alternating_log_capacity"):
            if getattr(self, key) is not None:
                doc[key] = getattr(self, key)
        return doc


def doubly_stochastic_residuals(kraus) -> tuple:
    """ (|sum A A^T - I|_F, |sum A^T A - I|_F) """
    n = kraus[0].shape[0]
    left = np.linalg.norm(sum(a @ a.T for a in kraus) - np.eye(n))
    right = np.linalg.norm(sum(a.T @ a for a in kraus) - np.eye(n))
    return float(left), float(right)


def scale(T: PositiveOperator, X_star) -> ScalingResult:
    """
    A_j -> T(X*)^{-1/2} A_j X*^{1/2}. The left residual vanishes by construction, the right one iff X* is a
    critical point of the log capacity.
    """
    x = _check_order(T, X_star)
    half, _ = spd_sqrt_pair(x)
    _, inv_half_t = spd_sqrt_pair(T.apply_array(x))
    scaled = [inv_half_t @ a @ half for a in T.kraus]
    left, right = doubly_stochastic_residuals(scaled)
    return ScalingResult(SpdMatrix._wrap(sym(x)), log_capacity_eval(T, x), scaled, left, right)


@dataclass(eq=False)
class AlternatingResult:
    operator: PositiveOperator
    residuals: List[float]
    log_capacity: float
    iterations: int

    def __iter__(self):
        return iter((self.operator, self.residuals))


@signals()
class AlternatingScaling(LoggableMixin, ProgressableMixin, ExecuteableMixin):
    """
    Alternates A_j <- R^{-1/2} A_j with R = sum A A^T and A_j <- A_j C^{-1/2} with C = sum A^T A. The log capacity
    estimate is sum log det R_k + sum log det C_k since both normalisations shift the log capacity by -log det.
    """

    def __init__(self, T: PositiveOperator, iters: int = SCALING_ITERS, tol: float = SCALING_TOL, **kwargs):
        super().__init__(**kwargs)
        self.operator = T
        self.iters = int(iters)
        self.tol = tol

    @staticmethod
    def _normalizer(a, what, iteration):
        try:
            return spd_logdet(a), np.asarray(spd_power(a, -0.5))
        except ConditioningError as e:
            raise DegeneracyError("%s is singular in iteration %d: %s" % (what, iteration, e))

    def _execute_helper(self, *args, **kwargs) -> AlternatingResult:
        kraus = [np.array(a) for a in self.operator.kraus]
        log_capacity = 0.0
        residuals = [max(doubly_stochastic_residuals(kraus))]
        iteration = 0
        while residuals[-1] > self.tol and iteration < self.iters:
            iteration += 1
            logdet_r, r = self._normalizer(sym(sum(a @ a.T for a in kraus)), "R", iteration)
            kraus = [r @ a for a in kraus]
            logdet_c, c = self._normalizer(sym(sum(a.T @ a for a in kraus)), "C", iteration)
            kraus = [a @ c for a in kraus]
            log_capacity += logdet_r + logdet_c
            residuals.append(max(doubly_stochastic_residuals(kraus)))
            if iteration % 100 == 0:
                self.send_progress(progress=iteration / self.iters,
                                   message="alternating scaling: iteration %d, residual %.3g"
                                           % (iteration, residuals[-1]))
        if residuals[-1] > self.tol:
            self.send_warn(message="alternating scaling: residual %.3g above %.3g after %d iterations"
                                   % (residuals[-1], self.tol, iteration))
        else:
            self.send_info(message="alternating scaling: converged after %d iterations" % iteration)
        return AlternatingResult(PositiveOperator(kraus, check=False), residuals, log_capacity, iteration)


def alternating_scaling(T: PositiveOperator, iters: int = SCALING_ITERS, tol: float = SCALING_TOL) \
        -> AlternatingResult:
    return AlternatingScaling(T, iters, tol).execute()


def _unital(T: PositiveOperator, P):
    p = _check_order(T, P)
    half, _ = spd_sqrt_pair(p)
    _, inv_half_t = spd_sqrt_pair(T.apply_array(p))

    def unital(x):
        return sym(inv_half_t @ T.apply_array(half @ np.asarray(x, dtype=float) @ half) @ inv_half_t)

    if np.max(np.abs(unital(np.eye(T.n)) - np.eye(T.n))) > UNITAL_TOL:
        raise ConditioningError("T'(I) differs from I, T(P) is too badly conditioned")
    return unital


def kadison_residual(T: PositiveOperator, P, X) -> float:
    """
    eigmin(T'(X^2) - T'(X)^2) for the unital map T'(X) = T(P)^{-1/2} T(P^{1/2} X P^{1/2}) T(P)^{-1/2}. Kadison's
    inequality makes it non negative.
    """
    unital = _unital(T, P)
    x = sym(_check_order(T, X))
    tx = unital(x)
    return float(scipy.linalg.eigvalsh(sym(unital(x @ x) - tx @ tx))[0])


def schur_certificate(T: PositiveOperator, P, X) -> float:
    """
    eigmin of [[T'(X^2), T'(X)], [T'(X), I]], non negative iff T'(X^2) - T'(X)^2 is positive semi definite.
    """
    unital = _unital(T, P)
    x = sym(_check_order(T, X))
    tx = unital(x)
    block = np.block([[unital(x @ x), tx], [tx, np.eye(T.n)]])
    return float(scipy.linalg.eigvalsh(sym(block))[0])


def loewner_gap(T: PositiveOperator, P, Q, t: float) -> float:
    """
    eigmin((1 - t) T(P) + t T(Q) - T(gamma(t))) on the geodesic from P to Q.
    """
    p, q = _check_order(T, P), _check_order(T, Q)
    half, inv_half = spd_sqrt_pair(p)
    gamma = sym(half @ np.asarray(spd_power(sym(inv_half @ q @ inv_half), t)) @ half)
    gap = (1.0 - t) * T.apply_array(p) + t * T.apply_array(q) - T.apply_array(gamma)
    return float(scipy.linalg.eigvalsh(sym(gap))[0])


def loewner_second_derivative(T: PositiveOperator, P, S, t: float = 0.0) -> SymMatrix:
    """
    d^2/dt^2 T(P^{1/2} exp(tS) P^{1/2}) = T(P^{1/2} S exp(tS) S P^{1/2}), positive semi definite.
    """
    p = _check_order(T, P)
    s = sym(_check_order(T, S))
    half, _ = spd_sqrt_pair(p)
    return SymMatrix(T.apply_array(half @ s @ np.asarray(sym_exp(t * s)) @ s @ half))


def logdet_second_derivative(T: PositiveOperator, P, S) -> float:
    """
    d^2/dt^2 log det T(P^{1/2} exp(tS) P^{1/2}) at t = 0, i.e.
    tr[T(P)^{-1} T(P^{1/2} S^2 P^{1/2})] - tr[(T(P)^{-1} T(P^{1/2} S P^{1/2}))^2], non negative.
    """
    p = _check_order(T, P)
    s = sym(_check_order(T, S))
    half, _ = spd_sqrt_pair(p)
    tp_inv = _inverse(T.apply_array(p), "T(P)")
    first = tp_inv @ T.apply_array(half @ s @ half)
    second = tp_inv @ T.apply_array(half @ s @ s @ half)
    return float(np.trace(second) - np.trace(first @ first))
