"""
Riemannian gradient descent on the SPD cone with Armijo backtracking.

One step maps X to X^{1/2} exp(-eta R) X^{1/2} with R = X^{1/2} grad f(X) X^{1/2}, the Riemannian gradient in the
whitened frame. A step is accepted if f(X_new) <= f(X) - slope * eta * |R|_F^2 + slack where slack covers the
rounding of f (1024 eps max(1, |f|)), accepted values may therefore rise by at most slack. The
accepted step length is kept for the next iteration.

A run diverges if f falls below the divergence floor, or if a candidate step is rejected for conditioning while the
condition number of the iterate already exceeds BOUNDARY_CONDITION. The second case catches infima approached at the
boundary of the cone, where the eigenvalue floor of the matrix functions stops f long before the floor.
"""
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from pygconvex.core.base import descent_status
from pygconvex.core.events.events import signals
from pygconvex.core.exceptions import ConditioningError, InputError, StagnationError
from pygconvex.core.geometry.matfun import SpdMatrix, spd_sqrt_pair, sym, sym_exp
from pygconvex.core.model.generic.i_executable_mixin import ExecuteableMixin
from pygconvex.core.model.generic.i_model_mixins import LoggableMixin, ProgressableMixin
from pygconvex.core.util.utils import filter_nones

BOUNDARY_CONDITION = 1e6


@dataclass(frozen=True)
class DescentOptions:
    step: float = 1.0
    max_iter: int = 10000
    grad_tol: float = 1e-8
    armijo_factor: float = 0.5
    armijo_slope: float = 1e-4
    max_backtracks: int = 40
    divergence_floor: float = -50.0

    def __post_init__(self):
        object.__setattr__(self, "max_iter", int(self.max_iter))
        object.__setattr__(self, "max_backtracks", int(self.max_backtracks))
        for name in ("step", "max_iter", "grad_tol", "armijo_slope", "max_backtracks"):
            if not getattr(self, name) > 0:
                raise InputError("%s has to be positive, got %r" % (name, getattr(self, name)))
        if not 0 < self.armijo_factor < 1:
            raise InputError("armijo_factor has to be in (0, 1), got %r" % self.armijo_factor)

    @classmethod
    def of(cls, options=None, **overrides):
        """ DescentOptions from None, a DescentOptions or a dict, keyword arguments take precedence. """
        if options is None:
            values = {}
        elif isinstance(options, DescentOptions):
            values = dict(options.__dict__)
        else:
            values = dict(options)
        values.update(filter_nones(overrides))
        return cls(**values)


@dataclass(eq=False)
class DescentResult:
    X: np.ndarray
    value: float
    iterations: int
    gradient_norm: float
    status: str
    values: List[float] = field(default_factory=list)


def riemannian_gradient(half: np.ndarray, gradient: np.ndarray) -> np.ndarray:
    """ X^{1/2} G X^{1/2}, symmetrised. """
    return sym(half @ gradient @ half)


@signals()
class GeodesicDescent(LoggableMixin, ProgressableMixin, ExecuteableMixin):
    """
    Minimises a function on the SPD cone.
    :param objective: X -> f(X), may raise ConditioningError outside its domain
    :param gradient: X -> euclidean gradient (symmetric matrix)
    :param options: DescentOptions
    :param divergence_status: status reported if f falls below options.divergence_floor with a gradient above
    tolerance
    """

    def __init__(self, objective: Callable, gradient: Callable, options: DescentOptions = None,
                 divergence_status: str = descent_status.infeasible_suspected, name: str = "descent", **kwargs):
        super().__init__(**kwargs)
        self.objective = objective
        self.gradient = gradient
        self.options = DescentOptions.of(options)
        self.divergence_status = divergence_status
        self.name = name

    def _try_step(self, half, r, eta):
        """
        :return: (candidate, value, conditioning) with value inf and conditioning True if the candidate left the
        domain of the matrix functions
        """
        try:
            candidate = sym(half @ np.asarray(sym_exp(-eta * r)) @ half)
            value = self.objective(candidate)
        except ConditioningError:
            return None, float("inf"), True
        return candidate, (value if np.isfinite(value) else float("inf")), False

    @staticmethod
    def _condition(half):
        lam = np.linalg.eigvalsh(half)
        return float((lam[-1] / lam[0]) ** 2)

    def _execute_helper(self, x0, *args, **kwargs) -> DescentResult:
        o = self.options
        x = np.array(SpdMatrix(x0))
        f = float(self.objective(x))
        values = [f]
        eta = o.step
        status = descent_status.max_iter
        gnorm = float("nan")
        iteration = 0
        for iteration in range(o.max_iter + 1):
            half, _ = spd_sqrt_pair(x)
            r = riemannian_gradient(half, self.gradient(x))
            gnorm = float(np.linalg.norm(r))
            if gnorm <= o.grad_tol:
                status = descent_status.converged
                break
            if f < o.divergence_floor:
                status = self.divergence_status
                self.send_warn(message="%s: objective %g below floor %g with gradient norm %g"
                                       % (self.name, f, o.divergence_floor, gnorm))
                break
            if iteration == o.max_iter:
                break
            slack = 1024.0 * np.finfo(float).eps * max(1.0, abs(f))
            boundary = False
            for _ in range(o.max_backtracks):
                candidate, f_new, conditioning = self._try_step(half, r, eta)
                if conditioning and self._condition(half) > BOUNDARY_CONDITION:
                    boundary = True
                    break
                if f_new <= f - o.armijo_slope * eta * gnorm ** 2 + slack:
                    break
                eta *= o.armijo_factor
            else:
                raise StagnationError("%s: no descent after %d backtracks in iteration %d (f=%r, |grad|=%g)"
                                      % (self.name, o.max_backtracks, iteration, f, gnorm),
                                      best=x, value=f, iterations=iteration)
            if boundary:
                status = self.divergence_status
                self.send_warn(message="%s: iterate approaches the boundary of the cone (condition %.3g), "
                                       "objective %g, gradient norm %g" % (self.name, self._condition(half), f, gnorm))
                break
            x, f = candidate, float(f_new)
            values.append(f)
            if (iteration + 1) % 500 == 0:
                self.send_progress(progress=(iteration + 1) / o.max_iter,
                                   message="%s: iteration %d, f=%.12g, |grad|=%.3g" % (self.name, iteration + 1, f,
                                                                                      gnorm))
        if status == descent_status.max_iter:
            self.send_warn(message="%s: no convergence within %d iterations, |grad|=%g"
                                   % (self.name, o.max_iter, gnorm))
        else:
            self.send_info(message="%s: %s after %d iterations, f=%.12g, |grad|=%.3g"
                                   % (self.name, status, iteration, f, gnorm))
        return DescentResult(x, f, iteration, gnorm, status, values)


def geodesic_descent(objective, gradient, x0, options=None, divergence_status=descent_status.infeasible_suspected,
                     name="descent") -> DescentResult:
    return GeodesicDescent(objective, gradient, options, divergence_status, name).execute(x0)
