"""
Brascamp-Lieb data: feasibility checks, the objective F(X) = sum_j p_j log det(B_j X B_j^T) - log det X on the SPD
cone, its geodesic minimisation, the BL constant exp(-inf F / 2), Lieb's Gaussian evaluator and, for rank one data,
the concave reformulation over R^m.

The second feasibility condition (dim V <= sum_j p_j dim(B_j V) for all subspaces V) is only tested heuristically:
a refutation comes with a violating subspace, plausibility is not a proof.
"""
import itertools
from dataclasses import dataclass, field
from math import comb
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize
from scipy.special import logsumexp, xlogy

from pygconvex.core.base import descent_status, feasibility as feasibility_kinds
from pygconvex.core.events.events import signals
from pygconvex.core.exceptions import CapacityError, ConditioningError, InputError, PreconditionError
from pygconvex.core.geometry.matfun import SpdMatrix, spd_logdet, spd_sqrt_pair, sym
from pygconvex.core.model.generic.i_executable_mixin import ExecuteableMixin
from pygconvex.core.model.generic.i_model_mixins import LoggableMixin
from pygconvex.core.optimize.geodesic_descent import DescentOptions, GeodesicDescent, riemannian_gradient
from pygconvex.core.printing.tablefyable import Tablefyable
from pygconvex.core.util.random import make_rng

SCALING_TOL = 1e-12
RANK_RTOL = 1e-10
HEURISTIC_TRIALS = 200
ORACLE_MAX_SUBSETS = 200000
# Up to this ambient dimension all coordinate subspaces are tested, above only single axes and their complements.
_ALL_COORDINATE_SUBSETS_UP_TO = 12


class BLDatum:
    """
    Brascamp-Lieb datum (B, p): linear maps B_j: R^n -> R^{n_j} and weights p_j >= 0.
    """
    __slots__ = ("n", "maps", "weights")

    def __init__(self, maps: Sequence, weights, n: int = None):
        maps = [np.atleast_2d(np.array(b, dtype=float)) for b in maps]
        weights = np.array(weights, dtype=float).reshape(-1)
        if len(maps) == 0:
            raise InputError("A datum needs at least one map")
        if n is None:
            n = maps[0].shape[1]
        if len(maps) != weights.shape[0]:
            raise InputError("%d maps but %d weights" % (len(maps), weights.shape[0]))
        for j, b in enumerate(maps):
            if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] != n:
                raise InputError("Map %d has shape %s, expected (n_j, %d)" % (j, b.shape, n))
            if not np.all(np.isfinite(b)):
                raise InputError("Map %d has non finite entries" % j)
            b.setflags(write=False)
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise InputError("Weights have to be finite and non negative: " + str(weights))
        weights.setflags(write=False)
        self.n = int(n)
        self.maps = tuple(maps)
        self.weights = weights

    @property
    def m(self):
        return len(self.maps)

    @property
    def dims(self):
        return [b.shape[0] for b in self.maps]

    @property
    def rank_one(self):
        return all(d == 1 for d in self.dims)

    def terms(self):
        """ (p_j, B_j) for the maps with positive weight. """
        return [(p, b) for p, b in zip(self.weights, self.maps) if p > 0]

    def to_document(self):
        return {"n": self.n, "p": self.weights, "B": list(self.maps)}

    def __repr__(self):
        return "BLDatum(n=%d, p=%s, dims=%s)" % (self.n, list(self.weights), self.dims)


def identity_rows_datum(n: int = 2) -> BLDatum:
    """ Rows e_1 .. e_n with unit weights. """
    return BLDatum([np.eye(n)[i:i + 1] for i in range(n)], np.ones(n))


def holder_datum(weights) -> BLDatum:
    """ Scalar datum B_j = [1] with weights summing to one. """
    weights = np.asarray(weights, dtype=float)
    return BLDatum([np.ones((1, 1)) for _ in weights], weights)


def random_rank_one_datum(rng, n: int, m: int, max_weight: float = 0.9, concentration: float = 20.0) -> BLDatum:
    """
    Gaussian rows b_j in R^n and Dirichlet weights scaled to sum n with every weight below max_weight. For generic
    rows this keeps the datum feasible with an attained optimum.
    """
    if m * max_weight <= n:
        raise InputError("m * max_weight has to exceed n to satisfy the scaling condition")
    rows = rng.standard_normal((m, n))
    for _ in range(1000):
        weights = n * rng.dirichlet(concentration * np.ones(m))
        if np.max(weights) < max_weight:
            break
    else:
        weights = np.full(m, n / m)
    return BLDatum([row.reshape(1, n) for row in rows], weights)


def _rank(b):
    s = scipy.linalg.svdvals(b)
    if s.shape[0] == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > RANK_RTOL * s[0]))


def check_scaling_condition(d: BLDatum) -> bool:
    """ n == sum_j p_j n_j within 1e-12. """
    return bool(abs(d.n - float(np.dot(d.weights, d.dims))) <= SCALING_TOL)


def check_nondegeneracy(d: BLDatum) -> bool:
    """ Every B_j has full row rank and the scaling condition holds. """
    return all(_rank(b) == b.shape[0] for b in d.maps) and check_scaling_condition(d)


@dataclass(eq=False)
class FeasibilityReport:
    status: str
    witness: Optional[np.ndarray] = None
    subspaces_tested: int = 0

    @property
    def refuted(self):
        return self.status == feasibility_kinds.refuted

    def to_document(self):
        return {"status": self.status, "witness": self.witness, "subspaces_tested": self.subspaces_tested}


def _coordinate_subspaces(n):
    if n <= _ALL_COORDINATE_SUBSETS_UP_TO:
        subsets = itertools.chain.from_iterable(itertools.combinations(range(n), k) for k in range(1, n + 1))
    else:
        subsets = itertools.chain(((i,) for i in range(n)),
                                  (tuple(j for j in range(n) if j != i) for i in range(n)),
                                  [tuple(range(n))])
    eye = np.eye(n)
    for subset in subsets:
        yield eye[:, list(subset)]


def _random_subspaces(rng, n, trials):
    for _ in range(trials):
        k = int(rng.integers(1, n)) if n > 1 else 1
        q, _ = np.linalg.qr(rng.standard_normal((n, k)))
        yield q


def subspace_defect(d: BLDatum, basis) -> float:
    """ dim V - sum_j p_j dim(B_j V) for V spanned by the columns of basis. """
    return _rank(basis) - float(sum(p * _rank(b @ basis) for p, b in zip(d.weights, d.maps)))


def heuristic_feasibility(d: BLDatum, trials: int = HEURISTIC_TRIALS, seed: int = None) -> FeasibilityReport:
    """
    Tests dim V <= sum_j p_j dim(B_j V) on all coordinate subspaces and on trials random subspaces.
    :raises PreconditionError: if the scaling condition fails
    """
    if not check_scaling_condition(d):
        raise PreconditionError("Scaling condition n = sum p_j n_j fails for " + repr(d))
    rng = make_rng(seed, 1)
    tested = 0
    for basis in itertools.chain(_coordinate_subspaces(d.n), _random_subspaces(rng, d.n, trials)):
        tested += 1
        if subspace_defect(d, basis) > 1e-9:
            return FeasibilityReport(feasibility_kinds.refuted, basis, tested)
    return FeasibilityReport(feasibility_kinds.plausible, None, tested)


def _cholesky(a, what):
    try:
        return scipy.linalg.cho_factor(a)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise ConditioningError("%s is not positive definite: %s" % (what, e))


def F_eval(d: BLDatum, X) -> float:
    """
    F(X) = sum_j p_j log det(B_j X B_j^T) - log det X. Terms with p_j = 0 drop out.
    """
    x = np.asarray(X, dtype=float)
    value = -spd_logdet(x)
    for p, b in d.terms():
        value += p * spd_logdet(b @ x @ b.T)
    return float(value)


def F_euclid_grad(d: BLDatum, X) -> np.ndarray:
    """
    sum_j p_j B_j^T (B_j X B_j^T)^{-1} B_j - X^{-1}
    """
    x = np.asarray(X, dtype=float)
    grad = -scipy.linalg.cho_solve(_cholesky(x, "X"), np.eye(d.n))
    for p, b in d.terms():
        grad += p * b.T @ scipy.linalg.cho_solve(_cholesky(b @ x @ b.T, "B X B^T"), b)
    return sym(grad)


def F_riemannian_grad(d: BLDatum, X) -> np.ndarray:
    """ X^{1/2} grad F X^{1/2} """
    half, _ = spd_sqrt_pair(X)
    return riemannian_gradient(half, F_euclid_grad(d, X))


@dataclass(eq=False)
class BLResult(Tablefyable):
    X_star: SpdMatrix
    F_value: float
    bl_constant: float
    iterations: int
    gradient_norm: float
    status: str = descent_status.converged
    feasibility: str = feasibility_kinds.heuristic
    warnings: List[str] = field(default_factory=list)
    oracle_bl_constant: Optional[float] = None

    @classmethod
    def _tablefy_register_columns(cls):
        cls.tablefy_register("status", "F_value", "bl_constant", "iterations", "gradient_norm",
                             "oracle_bl_constant")

    def to_document(self):
        doc = {"X_star": self.X_star, "F_value": self.F_value, "bl_constant": self.bl_constant,
               "iterations": self.iterations, "gradient_norm": self.gradient_norm, "status": self.status,
               "feasibility": self.feasibility, "warnings": list(self.warnings)}
        if self.oracle_bl_constant is not None:
            doc["oracle_bl_constant"] = self.oracle_bl_constant
        return doc


def minimize_F(d: BLDatum, X0=None, options=None) -> BLResult:
    """
    Geodesic gradient descent on F. F is geodesically convex for non degenerate data, its infimum gives the BL
    constant. Divergence, below the floor of the options or towards the boundary of the cone, is reported as
    infeasible_suspected.
    :raises PreconditionError: for degenerate data
    """
    if not check_scaling_condition(d):
        raise PreconditionError("Scaling condition n = sum p_j n_j fails for " + repr(d))
    if not check_nondegeneracy(d):
        raise PreconditionError("Datum is degenerate, some B_j has not full row rank: " + repr(d))
    x0 = np.eye(d.n) if X0 is None else X0
    engine = GeodesicDescent(lambda x: F_eval(d, x), lambda x: F_euclid_grad(d, x), DescentOptions.of(options),
                             descent_status.infeasible_suspected, name="brascamp-lieb")
    result = engine.execute(x0)
    warnings = []
    if result.status == descent_status.infeasible_suspected:
        warnings.append("F is unbounded below (descent stopped at F=%g), the datum is suspected to be infeasible "
                        "(BL constant infinite)" % result.value)
    return BLResult(SpdMatrix._wrap(sym(result.X)), result.value, float(np.exp(-result.value / 2.0)),
                    result.iterations, result.gradient_norm, result.status, feasibility_kinds.heuristic, warnings)


def bl_constant(d: BLDatum, options=None) -> float:
    """ exp(-inf F / 2) """
    return minimize_F(d, options=options).bl_constant


def lieb_gaussian_value(d: BLDatum, A: Sequence) -> float:
    """
    (prod_j det(A_j)^{p_j} / det(sum_j p_j B_j^T A_j B_j))^{1/2} for positive definite A_j of order n_j. Every value
    is a lower bound of the BL constant.
    """
    if len(A) != d.m:
        raise InputError("%d Gaussian matrices for %d maps" % (len(A), d.m))
    log_numerator = 0.0
    denominator = np.zeros((d.n, d.n))
    for p, b, a in zip(d.weights, d.maps, A):
        a = np.atleast_2d(np.asarray(a, dtype=float))
        if a.shape != (b.shape[0], b.shape[0]):
            raise InputError("Gaussian matrix of shape %s for a map with %d rows" % (a.shape, b.shape[0]))
        if p > 0:
            log_numerator += p * spd_logdet(a)
            denominator += p * b.T @ a @ b
    return float(np.exp(0.5 * (log_numerator - spd_logdet(sym(denominator)))))


class _Subsets(NamedTuple):
    members: np.ndarray
    log_coefficients: np.ndarray


def _rank_one_subsets(d: BLDatum, max_subsets: int) -> _Subsets:
    if not d.rank_one:
        raise PreconditionError("The rank one reformulation needs n_j = 1 for all maps, got " + str(d.dims))
    count = comb(d.m, d.n)
    if count > max_subsets:
        raise CapacityError("%d subsets of size %d out of %d maps exceed the limit %d"
                            % (count, d.n, d.m, max_subsets))
    rows = np.vstack(d.maps)
    members, logs = [], []
    for alpha in itertools.combinations(range(d.m), d.n):
        det = np.linalg.det(rows[list(alpha)])
        if det != 0.0:
            indicator = np.zeros(d.m)
            indicator[list(alpha)] = 1.0
            members.append(indicator)
            logs.append(2.0 * np.log(abs(det)))
    if not members:
        raise PreconditionError("The rows of the datum do not span R^%d" % d.n)
    return _Subsets(np.array(members), np.array(logs))


def rank_one_objective(d: BLDatum, y, subsets: _Subsets = None):
    """
    f(y) = <p, y> - log sum_alpha c_alpha exp(<alpha, y>) - sum_j p_j log p_j with c_alpha = det(B_alpha)^2 over
    the n-subsets alpha of the rows. f is concave and sup f = 2 log BL.
    :return: (value, gradient)
    """
    if subsets is None:
        subsets = _rank_one_subsets(d, ORACLE_MAX_SUBSETS)
    y = np.asarray(y, dtype=float)
    exponents = subsets.log_coefficients + subsets.members @ y
    lse = logsumexp(exponents)
    weights = np.exp(exponents - lse)
    value = float(np.dot(d.weights, y) - lse - np.sum(xlogy(d.weights, d.weights)))
    gradient = d.weights - weights @ subsets.members
    return value, gradient


class RankOneResult(NamedTuple):
    y_star: np.ndarray
    value: float

    @property
    def bl_constant(self):
        return float(np.exp(self.value / 2.0))


@signals()
class RankOneOracle(LoggableMixin, ExecuteableMixin):
    """
    Maximises the concave rank one objective with BFGS. The objective is invariant under y -> y + c 1, the
    maximiser is therefore not unique.
    """

    def __init__(self, d: BLDatum, max_subsets: int = ORACLE_MAX_SUBSETS, gtol: float = 1e-10,
                 max_iter: int = 10000, **kwargs):
        super().__init__(**kwargs)
        self.datum = d
        self.subsets = _rank_one_subsets(d, max_subsets)
        self.gtol = gtol
        self.max_iter = max_iter

    def _execute_helper(self, y0=None, *args, **kwargs) -> RankOneResult:
        y0 = np.zeros(self.datum.m) if y0 is None else np.asarray(y0, dtype=float)

        def negative(y):
            value, gradient = rank_one_objective(self.datum, y, self.subsets)
            return -value, -gradient

        result = scipy.optimize.minimize(negative, y0, jac=True, method="BFGS",
                                         options={"gtol": self.gtol, "maxiter": self.max_iter})
        if not result.success:
            self.send_warn(message="rank one oracle: " + str(result.message))
        self.send_info(message="rank one oracle: sup f = %.12g after %d iterations" % (-result.fun, result.nit))
        return RankOneResult(np.array(result.x), float(-result.fun))


def rank_one_convex_oracle(d: BLDatum, y0=None, max_subsets: int = ORACLE_MAX_SUBSETS) -> RankOneResult:
    return RankOneOracle(d, max_subsets).execute(y0)
