"""
Numerical tests of geodesic convexity along the closed form geodesics of a manifold.

A violated verdict is a certificate: the witness is re-evaluated exactly at (p, q, t) without finite differences.
A consistent verdict is evidence only. The first order test assumes the sampled region is open and totally convex,
which is not verified.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from pygconvex.core.base import manifold_kinds, verdicts
from pygconvex.core.events.events import signals
from pygconvex.core.exceptions import EvaluationError, InputError, UsageError
from pygconvex.core.geometry.manifold import ManifoldSpec, Point, geodesic_point
from pygconvex.core.geometry.matfun import spd_logdet, sym_exp
from pygconvex.core.model.generic.i_executable_mixin import ExecuteableMixin
from pygconvex.core.model.generic.i_model_mixins import LoggableMixin, ProgressableMixin
from pygconvex.core.printing.tablefyable import Tablefyable
from pygconvex.core.util.random import make_rng, random_symmetric

TOL_EQ = 1e-8
TOL_INEQ = 1e-6
FIRST_ORDER_STEP = 1e-5
SECOND_ORDER_STEP = 1e-3
T_GRID_SIZE = 33


def default_t_grid(size: int = T_GRID_SIZE) -> np.ndarray:
    return np.linspace(0.0, 1.0, size)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """
    f: M -> R. fn receives the coordinate array of a point (vector or matrix).
    """
    manifold: ManifoldSpec
    fn: Callable[[np.ndarray], float]
    name: str = "f"

    def __call__(self, p: Point) -> float:
        if p.manifold != self.manifold:
            raise UsageError("Field %s lives on %s, point on %s" % (self.name, self.manifold, p.manifold))
        value = float(self.fn(p.array))
        if not np.isfinite(value):
            raise EvaluationError("%s is not finite at %r" % (self.name, p), location=p)
        return value


@dataclass(frozen=True, eq=False)
class Witness:
    """
    gap = (1 - t) f(p) + t f(q) - f(gamma(t)); negative gaps violate convexity.
    """
    p: Point
    q: Point
    t: float
    gap: float

    def to_document(self):
        return {"p": self.p.array, "q": self.q.array, "t": self.t, "gap": self.gap}


@dataclass(eq=False)
class DerivativeSummary:
    """
    First and second order conditions on sampled pairs. They use finite differences and never change a verdict.
    """
    pairs: int
    first_order_failures: int
    min_second_order: float
    fd_step: float = FIRST_ORDER_STEP
    second_step: float = SECOND_ORDER_STEP
    tolerance: float = TOL_INEQ

    def to_document(self):
        return {"pairs": self.pairs, "first_order_failures": self.first_order_failures,
                "min_second_order": self.min_second_order, "fd_step": self.fd_step,
                "second_step": self.second_step, "tolerance": self.tolerance}


@dataclass(eq=False)
class ConvexityReport(Tablefyable):
    verdict: str
    witness: Optional[Witness] = None
    samples: int = 0
    min_second_difference: float = float("inf")
    field_name: str = ""
    manifold: str = ""
    tolerance: float = TOL_EQ
    seed: Optional[int] = None
    t_grid_size: int = T_GRID_SIZE
    derivatives: Optional[DerivativeSummary] = None

    @classmethod
    def _tablefy_register_columns(cls):
        cls.tablefy_register_columns({"function": "field_name", "manifold": "manifold", "verdict": "verdict",
                                      "samples": "samples", "min_second_difference": "min_second_difference",
                                      "gap": lambda r: None if r.witness is None else r.witness.gap,
                                      "first_order_failures": lambda r: r._derivative("first_order_failures"),
                                      "min_second_order": lambda r: r._derivative("min_second_order")})

    def _derivative(self, name):
        return None if self.derivatives is None else getattr(self.derivatives, name)

    @property
    def violated(self):
        return self.verdict == verdicts.violated

    def to_document(self):
        doc = {"verdict": self.verdict, "witness": self.witness, "samples": self.samples,
               "min_second_difference": self.min_second_difference, "function": self.field_name,
               "manifold": self.manifold, "tolerance": self.tolerance, "seed": self.seed,
               "t_grid_size": self.t_grid_size}
        if self.derivatives is not None:
            doc["derivatives"] = self.derivatives
        return doc


class FirstOrderResult:
    __slots__ = ("lhs", "rhs", "ok")

    def __init__(self, lhs, rhs, ok):
        self.lhs = lhs
        self.rhs = rhs
        self.ok = ok

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.ok))

    def __repr__(self):
        return "FirstOrderResult(lhs=%r, rhs=%r, ok=%r)" % (self.lhs, self.rhs, self.ok)


def _along(f: ScalarField, p: Point, q: Point):
    def g(t):
        try:
            return f(geodesic_point(p, q, t))
        except EvaluationError as e:
            raise EvaluationError("%s at t=%g on the geodesic from %r to %r" % (e, t, p, q), location=(p, q, t))
    return g


def _scale(*values):
    return max([1.0] + [abs(v) for v in values])


def second_differences(times, values) -> np.ndarray:
    """
    Three point second differences on a possibly non uniform grid, one per interior node.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape[0] < 3:
        return np.array([])
    h0 = t[1:-1] - t[:-2]
    h1 = t[2:] - t[1:-1]
    return 2.0 * (h0 * y[2:] - (h0 + h1) * y[1:-1] + h1 * y[:-2]) / (h0 * h1 * (h0 + h1))


def _check_grid(t_grid):
    t_grid = default_t_grid() if t_grid is None else np.sort(np.asarray(t_grid, dtype=float))
    if t_grid.ndim != 1 or t_grid.shape[0] == 0 or np.min(t_grid) < 0 or np.max(t_grid) > 1:
        raise UsageError("t grid has to be a non empty subset of [0, 1]")
    return t_grid


def _midpoint_gaps(f, p, q, t_grid):
    g = _along(f, p, q)
    fp, fq = f(p), f(q)
    values = np.array([g(t) for t in t_grid])
    gaps = (1.0 - t_grid) * fp + t_grid * fq - values
    return values, gaps, _scale(fp, fq)


def midpoint_test(f: ScalarField, p: Point, q: Point, t_grid=None, tol: float = TOL_EQ) -> ConvexityReport:
    """
    Checks f(gamma(t)) <= (1 - t) f(p) + t f(q) + tol * max(1, |f(p)|, |f(q)|) on the closed form geodesic.
    """
    t_grid = _check_grid(t_grid)
    values, gaps, scale = _midpoint_gaps(f, p, q, t_grid)
    worst = int(np.argmin(gaps))
    witness = None
    verdict = verdicts.consistent
    if gaps[worst] < -tol * scale:
        verdict = verdicts.violated
        witness = Witness(p, q, float(t_grid[worst]), float(gaps[worst]))
    second = second_differences(t_grid, values)
    return ConvexityReport(verdict, witness, samples=len(t_grid),
                           min_second_difference=float(np.min(second)) if len(second) else float("inf"),
                           field_name=f.name, manifold=str(f.manifold), tolerance=tol, t_grid_size=len(t_grid))


def first_order_test(f: ScalarField, p: Point, q: Point, delta: float = FIRST_ORDER_STEP,
                     tol: float = TOL_INEQ) -> FirstOrderResult:
    """
    f(p) + d/dt f(gamma_pq(t))|_{t=0} <= f(q), the derivative by a central difference with step delta.
    """
    g = _along(f, p, q)
    fp, fq = f(p), f(q)
    derivative = (g(delta) - g(-delta)) / (2.0 * delta)
    lhs = fp + derivative
    return FirstOrderResult(lhs, fq, bool(lhs <= fq + tol * _scale(fp, fq)))


def second_order_test(f: ScalarField, p: Point, q: Point, t_grid=None, dt: float = SECOND_ORDER_STEP) -> float:
    """
    Minimum over t_grid of the central second difference (g(t + dt) - 2 g(t) + g(t - dt)) / dt^2 of
    g = f o gamma_pq.
    """
    t_grid = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    g = _along(f, p, q)
    return float(min((g(t + dt) - 2.0 * g(t) + g(t - dt)) / dt ** 2 for t in t_grid))


@signals()
class ViolationSearch(LoggableMixin, ProgressableMixin, ExecuteableMixin):
    """
    Searches sampled point pairs for a violation of the midpoint inequality. Trial i draws its pair from
    make_rng(seed, i), so the search is reproducible for a seed.
    """

    def __init__(self, f: ScalarField, sampler, trials: int, seed: int = None, t_grid=None, tol: float = TOL_EQ,
                 **kwargs):
        if int(trials) != trials or trials < 1:
            raise UsageError("trials has to be a positive integer, got " + str(trials))
        super().__init__(**kwargs)
        self.f = f
        self.sampler = sampler
        self.trials = int(trials)
        self.seed = seed
        self.t_grid = _check_grid(t_grid)
        self.tol = tol

    def _report(self, verdict, witness, samples, min_second):
        return ConvexityReport(verdict, witness, samples=samples, min_second_difference=min_second,
                               field_name=self.f.name, manifold=str(self.f.manifold), tolerance=self.tol,
                               seed=self.seed, t_grid_size=len(self.t_grid))

    def _certify(self, report: ConvexityReport):
        w = report.witness
        fp, fq = self.f(w.p), self.f(w.q)
        gap = (1.0 - w.t) * fp + w.t * fq - self.f(geodesic_point(w.p, w.q, w.t))
        if gap < -self.tol * _scale(fp, fq):
            return Witness(w.p, w.q, w.t, float(gap))
        return None

    def _execute_helper(self, *args, **kwargs) -> ConvexityReport:
        min_second = float("inf")
        for trial in range(self.trials):
            p, q = self.sampler(make_rng(self.seed, trial))
            report = midpoint_test(self.f, p, q, self.t_grid, self.tol)
            min_second = min(min_second, report.min_second_difference)
            if report.violated:
                witness = self._certify(report)
                if witness is not None:
                    self.send_info(message="%s: violation in trial %d at t=%g, gap %g"
                                           % (self.f.name, trial, witness.t, witness.gap))
                    return self._report(verdicts.violated, witness, trial + 1, min_second)
            if (trial + 1) % 100 == 0:
                self.send_progress(progress=(trial + 1) / self.trials, message="%d trials" % (trial + 1))
        self.send_info(message="%s: no violation in %d trials" % (self.f.name, self.trials))
        return self._report(verdicts.consistent, None, self.trials, min_second)


def violation_search(f: ScalarField, sampler, trials: int, seed: int = None, t_grid=None,
                     tol: float = TOL_EQ) -> ConvexityReport:
    return ViolationSearch(f, sampler, trials, seed=seed, t_grid=t_grid, tol=tol).execute()


def derivative_summary(f: ScalarField, sampler, pairs: int, seed: int = None, delta: float = FIRST_ORDER_STEP,
                       dt: float = SECOND_ORDER_STEP, tol: float = TOL_INEQ, t_grid=None) -> DerivativeSummary:
    """
    Runs first_order_test and second_order_test on the first pairs of the sampler, drawn as in violation_search.
    """
    if int(pairs) != pairs or pairs < 1:
        raise UsageError("pairs has to be a positive integer, got " + str(pairs))
    if not (delta > 0 and dt > 0):
        raise InputError("Finite difference steps have to be positive, got %r and %r" % (delta, dt))
    t_grid = _check_grid(t_grid)
    failures = 0
    worst = float("inf")
    for trial in range(int(pairs)):
        p, q = sampler(make_rng(seed, trial))
        if not first_order_test(f, p, q, delta, tol).ok:
            failures += 1
        worst = min(worst, second_order_test(f, p, q, t_grid, dt))
    return DerivativeSummary(int(pairs), failures, worst, delta, dt, tol)


def totally_convex_test(membership: Callable[[Point], bool], p: Point, q: Point,
                        t_grid=None) -> Tuple[bool, Optional[float]]:
    """
    Checks that the geodesic from p to q stays in the set given by membership.
    :return: (ok, first t on the grid outside of the set)
    """
    for t in _check_grid(t_grid):
        if not membership(geodesic_point(p, q, float(t))):
            return False, float(t)
    return True, None


def determinant_level_set(c: float, rtol: float = 1e-9) -> Callable[[Point], bool]:
    """
    Membership of D_c = {P : det P = c}, compared on the log scale.
    """
    if not c > 0:
        raise InputError("Determinant level has to be positive, got " + str(c))
    log_c = np.log(c)

    def member(p: Point):
        return abs(spd_logdet(p.array) - log_c) <= rtol * max(1.0, abs(log_c))
    return member


# Samplers

ORTHANT_RANGE = (0.1, 10.0)
SPD_RADIUS = 1.5
EUCLIDEAN_RANGE = (-10.0, 10.0)


def orthant_sampler(m: ManifoldSpec, low: float = ORTHANT_RANGE[0], high: float = ORTHANT_RANGE[1]):
    """ Coordinates log-uniform in [low, high]. """
    def sample(rng):
        return tuple(Point(m, np.exp(rng.uniform(np.log(low), np.log(high), m.n))) for _ in range(2))
    return sample


def spd_sampler(m: ManifoldSpec, radius: float = SPD_RADIUS):
    """ exp of random symmetric matrices with spectral radius at most radius. """
    def sample(rng):
        return tuple(Point(m, sym_exp(random_symmetric(rng, m.n, rng.uniform(0.0, radius)))) for _ in range(2))
    return sample


def euclidean_sampler(m: ManifoldSpec, low: float = EUCLIDEAN_RANGE[0], high: float = EUCLIDEAN_RANGE[1]):
    def sample(rng):
        return tuple(Point(m, rng.uniform(low, high, m.n)) for _ in range(2))
    return sample


def default_sampler(m: ManifoldSpec):
    """
    Point pair source with the default ranges of the manifold kind. Call it with a numpy Generator.
    """
    if m.kind == manifold_kinds.orthant:
        return orthant_sampler(m)
    if m.kind == manifold_kinds.spd:
        return spd_sampler(m)
    return euclidean_sampler(m)


# Built-in scalar fields

_builtin_registry = {}


def builtin(name, *kinds):
    """
    Registers a factory (m, **params) -> fn of a built-in field usable on the given manifold kinds.
    """
    def register(factory):
        _builtin_registry[name] = (kinds, factory)
        return factory
    return register


def builtin_names() -> List[str]:
    return sorted(_builtin_registry.keys())


def builtin_field(name: str, m: ManifoldSpec, **params) -> ScalarField:
    """
    Built-in scalar field by name, see builtin_names().
    """
    if name not in _builtin_registry:
        raise InputError("Unknown function %s, known functions: %s" % (name, ", ".join(builtin_names())))
    kinds, factory = _builtin_registry[name]
    if m.kind not in kinds:
        raise UsageError("Function %s is defined on %s, not on %s" % (name, ", ".join(kinds), m.kind))
    return ScalarField(m, factory(m, **params), name)


@builtin("logbarrier", manifold_kinds.orthant)
def _logbarrier(m):
    return lambda x: -float(np.sum(np.log(x)))


@builtin("neg-logbarrier", manifold_kinds.orthant)
def _neg_logbarrier(m):
    return lambda x: float(np.sum(np.log(x)))


@builtin("monomial", manifold_kinds.orthant)
def _monomial(m, c: float = 1.0, e=None):
    e = np.ones(m.n) if e is None else np.asarray(e, dtype=float)
    if not c > 0 or e.shape != (m.n,):
        raise InputError("A monomial needs c > 0 and %d exponents" % m.n)
    return lambda x: float(c * np.prod(x ** e))


def default_posynomial_terms(n) -> List[Tuple[float, List[float]]]:
    """ 1 + x_1 + x_1 x_2^2, or 1 + x + x^2 in one dimension. """
    if n == 1:
        return [(1.0, [0.0]), (1.0, [1.0]), (1.0, [2.0])]
    rest = [0.0] * (n - 2)
    return [(1.0, [0.0, 0.0] + rest), (1.0, [1.0, 0.0] + rest), (1.0, [1.0, 2.0] + rest)]


def _posynomial_parts(m, terms):
    terms = default_posynomial_terms(m.n) if terms is None else terms
    coefficients = np.array([c for c, _ in terms], dtype=float)
    exponents = np.array([e for _, e in terms], dtype=float)
    if exponents.ndim != 2 or exponents.shape[1] != m.n or not np.all(coefficients > 0):
        raise InputError("A posynomial needs positive coefficients and %d exponents per term" % m.n)
    return coefficients, exponents


@builtin("posynomial", manifold_kinds.orthant)
def _posynomial(m, terms=None):
    coefficients, exponents = _posynomial_parts(m, terms)
    return lambda x: float(np.sum(coefficients * np.prod(x ** exponents, axis=1)))


@builtin("log-posynomial", manifold_kinds.orthant)
def _log_posynomial(m, terms=None):
    coefficients, exponents = _posynomial_parts(m, terms)
    return lambda x: float(np.log(np.sum(coefficients * np.prod(x ** exponents, axis=1))))


@builtin("log-squared", manifold_kinds.orthant)
def _log_squared(m):
    return lambda x: float(np.sum(np.log(x) ** 2))


@builtin("logdet", manifold_kinds.spd)
def _logdet(m):
    return lambda x: spd_logdet(x)


@builtin("neg-logdet", manifold_kinds.spd)
def _neg_logdet(m):
    return lambda x: -spd_logdet(x)


@builtin("logdet-operator", manifold_kinds.spd)
def _logdet_operator(m, operator=None, seed=None, kraus=3):
    # positive operators live in the optimisation package which imports this module
    from pygconvex.core.optimize.operator_scaling import random_operator
    if operator is None:
        operator = random_operator(make_rng(seed, 0), m.n, kraus)
    if operator.n != m.n:
        raise InputError("Operator of order %d on matrices of order %d" % (operator.n, m.n))
    return lambda x: spd_logdet(operator.apply_array(x))


@builtin("sin-exp", manifold_kinds.euclidean)
def _sin_exp(m):
    return lambda x: float(np.sum(np.sin(x) * np.exp(x / 12.0)))


@builtin("log-minus-coordinate", manifold_kinds.orthant)
def _log_minus_coordinate(m):
    if m.n < 2:
        raise InputError("log-minus-coordinate needs at least two coordinates")
    return lambda x: float(np.log(x[0]) - x[1])


# Fields that are geodesically convex for the metric of their manifold.
GCONVEX_BUILTINS = ("logbarrier", "neg-logbarrier", "monomial", "posynomial", "log-posynomial", "log-squared",
                    "logdet", "neg-logdet", "logdet-operator")
