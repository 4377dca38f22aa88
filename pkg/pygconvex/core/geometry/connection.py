"""
Differential machinery in frame coordinates: metric frames, Christoffel symbols of the Levi-Civita connection,
covariant derivatives along sampled curves, the geodesic equation and the length and energy functionals.

A frame vector is the coordinate vector of a point or tangent in the global frame of its manifold (the sigma
flattening on the SPD cone). A Christoffel source is any callable mapping a frame vector to a ChristoffelTensor (or
the raw d x d x d array).
"""
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np
import scipy.integrate
import scipy.linalg

from pygconvex.core.base import manifold_kinds
from pygconvex.core.exceptions import ConditioningError, InputError, IntegrationError, UsageError
from pygconvex.core.geometry.manifold import ManifoldSpec, Point, geodesic_point, geodesic_velocity, \
    is_valid_frame, to_frame
from pygconvex.core.geometry.matfun import sym_basis, sym_from_frame

# Relative finite difference step, scaled by max(1, |p|_inf).
DEFAULT_FD_REL_STEP = 1e-4


@dataclass(frozen=True)
class MetricFrame:
    """
    Metric tensor in frame coordinates: evaluate(x) is the d x d matrix g_ij = g(d_i, d_j) at x.
    """
    dim: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    manifold: ManifoldSpec = None

    def __call__(self, x):
        return self.evaluate(np.asarray(x, dtype=float))


class ChristoffelTensor:
    """
    Christoffel symbols at a point, gamma[k, i, j] = Gamma^k_ij.
    """
    __slots__ = ("gamma",)

    def __init__(self, gamma):
        gamma = np.array(gamma, dtype=float)
        if gamma.ndim != 3 or len(set(gamma.shape)) != 1:
            raise InputError("Christoffel symbols need shape (d, d, d), got " + str(gamma.shape))
        gamma.setflags(write=False)
        self.gamma = gamma

    @property
    def dim(self):
        return self.gamma.shape[0]

    def contract(self, u, v):
        """ sum_ij Gamma^k_ij u^i v^j """
        return np.einsum("kij,i,j->k", self.gamma, u, v)

    def torsion(self):
        """ max |Gamma^k_ij - Gamma^k_ji| """
        return float(np.max(np.abs(self.gamma - np.transpose(self.gamma, (0, 2, 1)))))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.gamma
        return self.gamma.astype(dtype)


@dataclass(frozen=True, eq=False)
class CurveTrace:
    """
    Sampled curve in frame coordinates.
    """
    times: np.ndarray
    points: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        velocities = np.atleast_2d(np.asarray(self.velocities, dtype=float))
        if points.shape[0] != times.shape[0] and points.shape[1] == times.shape[0]:
            points, velocities = points.T, velocities.T
        if times.ndim != 1 or points.shape[0] != times.shape[0] or velocities.shape != points.shape:
            raise InputError("Trace needs equally many times, points and velocities: %s, %s, %s"
                             % (times.shape, points.shape, velocities.shape))
        if times.shape[0] > 1 and not np.all(np.diff(times) > 0):
            raise InputError("Trace times have to be strictly increasing")
        for name, value in (("times", times), ("points", points), ("velocities", velocities)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __len__(self):
        return self.times.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def duration(self):
        return float(self.times[-1] - self.times[0])


def _gamma_array(gamma_at, x):
    return np.asarray(gamma_at(x), dtype=float)


def _default_step(x):
    return DEFAULT_FD_REL_STEP * max(1.0, float(np.max(np.abs(x))))


def _spd_metric(n):
    basis = np.array([np.asarray(e.matrix) for e in sym_basis(n)])

    def evaluate(x):
        p = sym_from_frame(x, n)
        try:
            m = scipy.linalg.solve(p, basis.transpose(1, 0, 2).reshape(n, -1), assume_a="pos")
        except (scipy.linalg.LinAlgError, ValueError) as e:
            raise ConditioningError("Metric evaluated outside the SPD cone: " + str(e))
        m = m.reshape(n, len(basis), n).transpose(1, 0, 2)
        g = np.einsum("aij,bji->ab", m, m)
        return (g + g.T) / 2.0
    return evaluate


def metric_frame_of(m: ManifoldSpec) -> MetricFrame:
    """
    The metric tensor of m in its global frame.
    """
    if m.kind == manifold_kinds.euclidean:
        identity = np.eye(m.dim)
        return MetricFrame(m.dim, lambda x: identity.copy(), m)
    if m.kind == manifold_kinds.orthant:
        return MetricFrame(m.dim, lambda x: np.diag(1.0 / x ** 2), m)
    return MetricFrame(m.dim, _spd_metric(m.n), m)


def metric_derivatives(frame: MetricFrame, x, h: float = None) -> np.ndarray:
    """
    Central differences dG[l, i, j] = d_l g_ij at x.
    """
    x = np.asarray(x, dtype=float)
    if h is None:
        h = _default_step(x)
    d = frame.dim
    dg = np.empty((d, d, d))
    for l in range(d):
        e = np.zeros(d)
        e[l] = h
        dg[l] = (frame(x + e) - frame(x - e)) / (2.0 * h)
    return dg


def _invert_metric(g):
    try:
        ginv = scipy.linalg.inv(g)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise ConditioningError("Metric tensor is not invertible: " + str(e))
    if not np.all(np.isfinite(ginv)):
        raise ConditioningError("Metric tensor is not invertible")
    return ginv


def christoffel_numeric(frame: MetricFrame, p, h: float = None, symmetrize: bool = True) -> ChristoffelTensor:
    """
    Christoffel symbols of the Levi-Civita connection from
    Gamma^k_ij = 1/2 sum_l g^kl (d_i g_jl + d_j g_il - d_l g_ij), derivatives by central differences.
    :param frame: metric frame
    :param p: frame vector of the point
    :param h: finite difference step, 1e-4 * max(1, |p|_inf) if None
    :param symmetrize: average Gamma^k_ij and Gamma^k_ji
    :return: ChristoffelTensor
    """
    p = np.asarray(p, dtype=float)
    ginv = _invert_metric(frame(p))
    dg = metric_derivatives(frame, p, h)
    t = np.einsum("ijl->ijl", dg) + np.einsum("jil->ijl", dg) - np.einsum("lij->ijl", dg)
    gamma = 0.5 * np.einsum("kl,ijl->kij", ginv, t)
    if symmetrize:
        gamma = (gamma + np.transpose(gamma, (0, 2, 1))) / 2.0
    return ChristoffelTensor(gamma)


def christoffel_closed(m: ManifoldSpec, p) -> ChristoffelTensor:
    """
    Closed form Christoffel symbols: zero on euclidean space, Gamma^i_ii = -1/p_i on the orthant.
    """
    x = to_frame(p) if isinstance(p, Point) else np.asarray(p, dtype=float)
    d = m.dim
    gamma = np.zeros((d, d, d))
    if m.kind == manifold_kinds.orthant:
        idx = np.arange(d)
        gamma[idx, idx, idx] = -1.0 / x
    elif m.kind != manifold_kinds.euclidean:
        raise UsageError("No closed form Christoffel symbols on " + str(m))
    return ChristoffelTensor(gamma)


def christoffel_source(m: ManifoldSpec, numeric: bool = None, h: float = None) -> Callable:
    """
    Christoffel source of m. Closed forms are used where available unless numeric is true.
    """
    if numeric is None:
        numeric = m.kind == manifold_kinds.spd
    if not numeric:
        if m.kind == manifold_kinds.spd:
            raise UsageError("No closed form Christoffel symbols on " + str(m))
        return lambda x: christoffel_closed(m, x)
    frame = metric_frame_of(m)
    return lambda x: christoffel_numeric(frame, x, h)


def metric_compatibility_residual(frame: MetricFrame, x, h: float = None, gamma=None) -> float:
    """
    max_kij |d_k g_ij - sum_l (Gamma^l_ki g_lj + Gamma^l_kj g_il)| with finite difference left side.
    gamma defaults to christoffel_numeric at x.
    """
    x = np.asarray(x, dtype=float)
    if gamma is None:
        gamma = christoffel_numeric(frame, x, h)
    gamma = np.asarray(gamma)
    g = frame(x)
    dg = metric_derivatives(frame, x, h)
    rhs = np.einsum("lki,lj->kij", gamma, g) + np.einsum("lkj,il->kij", gamma, g)
    return float(np.max(np.abs(dg - rhs)))


def covariant_derivative_along(trace: CurveTrace, x, gamma_at) -> np.ndarray:
    """
    Covariant derivative of the vector field X along the sampled curve,
    (D_t X)^k = dX^k/dt + sum_ij Gamma^k_ij gamma'^i X^j, with dX/dt by second order finite differences.
    :param trace: sampled curve
    :param x: field values at the trace times, shape (N, d)
    :param gamma_at: Christoffel source
    :return: array (N, d)
    """
    x = np.asarray(x, dtype=float)
    if len(trace) < 3:
        raise UsageError("Covariant derivatives need at least 3 samples, got %d" % len(trace))
    if x.shape != trace.points.shape:
        raise UsageError("Field samples of shape %s do not match the trace %s" % (x.shape, trace.points.shape))
    xdot = np.gradient(x, trace.times, axis=0, edge_order=2)
    out = np.empty_like(xdot)
    for i, (point, velocity) in enumerate(zip(trace.points, trace.velocities)):
        out[i] = xdot[i] + np.einsum("kij,i,j->k", _gamma_array(gamma_at, point), velocity, x[i])
    return out


def geodesic_residual(trace: CurveTrace, gamma_at, frame: MetricFrame = None) -> float:
    """
    max over interior times of the norm of D_t gamma'. The norm is the metric norm if a frame is given.
    """
    acc = covariant_derivative_along(trace, trace.velocities, gamma_at)[1:-1]
    if frame is None:
        return float(np.max(np.linalg.norm(acc, axis=1)))
    norms = [np.sqrt(max(a @ frame(p) @ a, 0.0)) for a, p in zip(acc, trace.points[1:-1])]
    return float(np.max(norms))


def _geodesic_rhs(gamma_at, x, v):
    return v, -np.einsum("kij,i,j->k", _gamma_array(gamma_at, x), v, v)


def geodesic_ode_solve(gamma_at, p0, v0, T: float, steps: int, valid: Callable = None) -> CurveTrace:
    """
    Integrates gamma''^k = -sum_ij Gamma^k_ij gamma'^i gamma'^j with the classical fixed step Runge-Kutta method.
    :param gamma_at: Christoffel source
    :param p0: initial frame point
    :param v0: initial frame velocity
    :param T: end time
    :param steps: number of steps
    :param valid: predicate on frame points, every stage has to satisfy it
    :return: CurveTrace with steps + 1 samples
    :raises IntegrationError: if a stage leaves the valid region. The error carries the trace up to the last valid
    state.
    """
    if int(steps) != steps or steps < 1:
        raise UsageError("steps has to be a positive integer, got " + str(steps))
    if not T > 0:
        raise UsageError("T has to be positive, got " + str(T))
    x = np.array(p0, dtype=float)
    v = np.array(v0, dtype=float)
    dt = T / steps
    times = np.linspace(0.0, T, steps + 1)
    xs, vs = [x.copy()], [v.copy()]

    def check(y, k):
        if not np.all(np.isfinite(y)) or (valid is not None and not valid(y)):
            partial = CurveTrace(times[:len(xs)], np.array(xs), np.array(vs))
            raise IntegrationError("Geodesic left the valid region in step %d at t=%g" % (k, times[k]), partial)

    for k in range(steps):
        try:
            check(x, k)
            k1x, k1v = _geodesic_rhs(gamma_at, x, v)
            check(x + 0.5 * dt * k1x, k)
            k2x, k2v = _geodesic_rhs(gamma_at, x + 0.5 * dt * k1x, v + 0.5 * dt * k1v)
            check(x + 0.5 * dt * k2x, k)
            k3x, k3v = _geodesic_rhs(gamma_at, x + 0.5 * dt * k2x, v + 0.5 * dt * k2v)
            check(x + dt * k3x, k)
            k4x, k4v = _geodesic_rhs(gamma_at, x + dt * k3x, v + dt * k3v)
        except ConditioningError as e:
            partial = CurveTrace(times[:len(xs)], np.array(xs), np.array(vs))
            raise IntegrationError("Christoffel symbols failed in step %d: %s" % (k, e), partial)
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        check(x, k + 1)
        xs.append(x.copy())
        vs.append(v.copy())
    return CurveTrace(times, np.array(xs), np.array(vs))


def manifold_validity(m: ManifoldSpec, guard: float = 1e-12) -> Callable:
    """ Predicate for geodesic_ode_solve. """
    return lambda x: is_valid_frame(m, x, guard)


def geodesic_trace(p: Point, q: Point, samples: int = 101) -> CurveTrace:
    """
    The closed form geodesic from p to q sampled at equidistant times in [0, 1] with analytic velocities.
    """
    if samples < 2:
        raise UsageError("A trace needs at least 2 samples")
    times = np.linspace(0.0, 1.0, samples)
    points = np.array([to_frame(geodesic_point(p, q, t)) for t in times])
    velocities = np.array([to_frame(geodesic_velocity(p, q, t)) for t in times])
    return CurveTrace(times, points, velocities)


def speed_squared(m: ManifoldSpec, points, velocities) -> np.ndarray:
    """
    g_x(v, v) for every row of points / velocities.
    """
    points = np.asarray(points, dtype=float)
    velocities = np.asarray(velocities, dtype=float)
    if m.kind == manifold_kinds.euclidean:
        return np.sum(velocities ** 2, axis=1)
    if m.kind == manifold_kinds.orthant:
        return np.sum((velocities / points) ** 2, axis=1)
    frame = metric_frame_of(m)
    return np.array([v @ frame(x) @ v for x, v in zip(points, velocities)])


def curve_length(m: ManifoldSpec, trace: CurveTrace) -> float:
    """
    Trapezoid quadrature of the speed sqrt(g(gamma', gamma')).
    """
    speed = np.sqrt(np.maximum(speed_squared(m, trace.points, trace.velocities), 0.0))
    return float(scipy.integrate.trapezoid(speed, trace.times))


def curve_energy(m: ManifoldSpec, trace: CurveTrace) -> float:
    """
    Trapezoid quadrature of g(gamma', gamma').
    """
    return float(scipy.integrate.trapezoid(speed_squared(m, trace.points, trace.velocities), trace.times))


def euler_lagrange_residual(m: ManifoldSpec, trace: CurveTrace, h: float = None) -> float:
    """
    max over interior times of |d/dt (dL/dx') - dL/dx| for L(x, x') = x'^T G(x) x'. Vanishes on geodesics up to
    discretisation.
    """
    if len(trace) < 3:
        raise UsageError("The Euler-Lagrange residual needs at least 3 samples, got %d" % len(trace))
    frame = metric_frame_of(m)
    momentum = np.array([2.0 * frame(x) @ v for x, v in zip(trace.points, trace.velocities)])
    dmomentum = np.gradient(momentum, trace.times, axis=0, edge_order=2)
    residuals = []
    for i in range(1, len(trace) - 1):
        x, v = trace.points[i], trace.velocities[i]
        dg = metric_derivatives(frame, x, h)
        dl = np.einsum("kij,i,j->k", dg, v, v)
        residuals.append(np.linalg.norm(dmomentum[i] - dl))
    return float(np.max(residuals))


@dataclass(frozen=True, eq=False)
class FrameField:
    """
    Vector field along a trace: values and time derivatives, both of shape (N, d).
    """
    values: np.ndarray
    derivatives: np.ndarray

    @classmethod
    def sine_bump(cls, times, direction, mode: int = 1):
        """
        sin(pi * mode * s) * direction with s the time rescaled to [0, 1]. Vanishes at both ends.
        """
        times = np.asarray(times, dtype=float)
        direction = np.asarray(direction, dtype=float)
        length = times[-1] - times[0]
        s = (times - times[0]) / length
        w = np.pi * mode
        values = np.outer(np.sin(w * s), direction)
        derivatives = np.outer(w / length * np.cos(w * s), direction)
        return cls(values, derivatives)

    @classmethod
    def zero(cls, trace: CurveTrace):
        return cls(np.zeros_like(trace.points), np.zeros_like(trace.points))


@dataclass(frozen=True)
class VariationSample:
    u: float
    energy: float
    valid: bool


@dataclass(frozen=True)
class VariationReport:
    """
    Energies of the variations trace + u * field. slope is the central difference dS/du at u = 0.
    """
    energy_at_zero: float
    slope: float
    samples: List[VariationSample] = field(default_factory=list)
    tolerance: float = 1e-12

    @property
    def minimal_at_zero(self):
        bound = self.energy_at_zero - self.tolerance * max(1.0, abs(self.energy_at_zero))
        return all(s.energy >= bound for s in self.samples if s.valid)

    def energies(self) -> List[Tuple[float, float]]:
        return [(s.u, s.energy) for s in self.samples]

    def to_document(self):
        return {"energy_at_zero": self.energy_at_zero, "slope": self.slope,
                "minimal_at_zero": self.minimal_at_zero,
                "samples": [{"u": s.u, "energy": s.energy, "valid": s.valid} for s in self.samples]}


# Step of the internal central difference for dS/du.
VARIATION_SLOPE_STEP = 1e-6


def _varied_energy(m, trace, perturbation, u, guard):
    points = trace.points + u * perturbation.values
    if not all(is_valid_frame(m, x, guard) for x in points):
        return None
    velocities = trace.velocities + u * perturbation.derivatives
    return float(scipy.integrate.trapezoid(speed_squared(m, points, velocities), trace.times))


def variation_energy_test(m: ManifoldSpec, trace: CurveTrace, perturbation: FrameField, u_grid,
                          guard: float = 1e-12) -> VariationReport:
    """
    Energies of the variations nu_u(t) = trace(t) + u * perturbation(t). Perturbations have to vanish at both ends.
    Variations leaving the manifold are skipped and flagged as invalid.
    """
    values = np.asarray(perturbation.values, dtype=float)
    if values.shape != trace.points.shape:
        raise UsageError("Perturbation of shape %s does not match the trace %s" % (values.shape,
                                                                                  trace.points.shape))
    scale = max(1.0, float(np.max(np.abs(values))))
    if np.max(np.abs(values[0])) > 1e-12 * scale or np.max(np.abs(values[-1])) > 1e-12 * scale:
        raise UsageError("Perturbation has to vanish at both end points")
    energy_at_zero = curve_energy(m, trace)
    samples = []
    for u in u_grid:
        energy = _varied_energy(m, trace, perturbation, float(u), guard)
        samples.append(VariationSample(float(u), float("nan") if energy is None else energy, energy is not None))
    plus = _varied_energy(m, trace, perturbation, VARIATION_SLOPE_STEP, guard)
    minus = _varied_energy(m, trace, perturbation, -VARIATION_SLOPE_STEP, guard)
    if plus is None or minus is None:
        slope = float("nan")
    else:
        slope = (plus - minus) / (2.0 * VARIATION_SLOPE_STEP)
    return VariationReport(energy_at_zero, slope, samples)
