"""
The three supported Riemannian manifolds: euclidean space, the positive orthant with the Hessian metric of the log
barrier and the cone of positive definite matrices with the metric tr[P^-1 U P^-1 V].

All three are open subsets of their ambient space, points and tangents therefore live in global coordinates. The
SPD cone stores points as SpdMatrix and tangents as full symmetric matrices, frame vectors are only used where the
connection machinery needs them.
"""
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg

from pygconvex.core.base import manifold_kinds
from pygconvex.core.exceptions import ConditioningError, InputError, UsageError
from pygconvex.core.geometry.matfun import SpdMatrix, SymMatrix, frame_dim, spd_log, spd_power, spd_sqrt_pair, \
    sym, sym_eig, sym_exp, sym_from_frame, sym_to_frame, compose_eig


@dataclass(frozen=True)
class ManifoldSpec:
    """
    kind: one of manifold_kinds; n: vector length (euclidean, orthant) or matrix order (spd).
    """
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in manifold_kinds.values():
            raise InputError("Unknown manifold kind " + str(self.kind))
        if int(self.n) != self.n or self.n < 1:
            raise InputError("Manifold order has to be a positive integer, got " + str(self.n))

    @property
    def dim(self):
        if self.kind == manifold_kinds.spd:
            return frame_dim(self.n)
        return self.n

    def point(self, coords):
        return Point(self, coords)

    def tangent(self, base, vec):
        return Tangent(self, base, vec)

    def __str__(self):
        return "%s(%d)" % (self.kind, self.n)


def euclidean(n):
    return ManifoldSpec(manifold_kinds.euclidean, n)


def orthant(n):
    return ManifoldSpec(manifold_kinds.orthant, n)


def spd_cone(n):
    return ManifoldSpec(manifold_kinds.spd, n)


def _vector(coords, n):
    x = np.array(coords, dtype=float).reshape(-1) if np.ndim(coords) == 0 else np.array(coords, dtype=float)
    if x.shape != (n,):
        raise InputError("Expected a vector of length %d, got shape %s" % (n, x.shape))
    if not np.all(np.isfinite(x)):
        raise InputError("Coordinates are not finite: " + str(x))
    x.setflags(write=False)
    return x


class Point:
    """
    A point of a manifold. coords is a read only vector, or a SpdMatrix on the SPD cone.
    """
    __slots__ = ("manifold", "coords")

    def __init__(self, manifold: ManifoldSpec, coords):
        if manifold.kind == manifold_kinds.spd:
            if not isinstance(coords, SpdMatrix):
                coords = SpdMatrix(coords)
            if coords.n != manifold.n:
                raise InputError("Expected a %dx%d matrix, got order %d" % (manifold.n, manifold.n, coords.n))
        else:
            coords = _vector(coords, manifold.n)
            if manifold.kind == manifold_kinds.orthant and not np.all(coords > 0):
                raise InputError("Orthant coordinates have to be positive: " + str(coords))
        self.manifold = manifold
        self.coords = coords

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords)

    def __repr__(self):
        return "Point(%s, %s)" % (self.manifold, np.array2string(self.array, separator=", "))


class Tangent:
    """
    A tangent vector at base. On the SPD cone vec is a SymMatrix.
    """
    __slots__ = ("manifold", "base", "vec")

    def __init__(self, manifold: ManifoldSpec, base: Point, vec):
        if base.manifold != manifold:
            raise UsageError("Base point lives on %s, not on %s" % (base.manifold, manifold))
        if manifold.kind == manifold_kinds.spd:
            if not isinstance(vec, SymMatrix):
                vec = SymMatrix(vec)
            if vec.n != manifold.n:
                raise InputError("Expected a %dx%d matrix, got order %d" % (manifold.n, manifold.n, vec.n))
        else:
            vec = _vector(vec, manifold.n)
        self.manifold = manifold
        self.base = base
        self.vec = vec

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.vec)

    def __repr__(self):
        return "Tangent(%s, %s)" % (self.manifold, np.array2string(self.array, separator=", "))


class _EuclideanRules:

    @staticmethod
    def inner(p, u, v):
        return float(np.dot(u, v))

    @staticmethod
    def geodesic(p, q, t):
        return p + t * (q - p)

    @staticmethod
    def velocity(p, q, t):
        return q - p

    @staticmethod
    def exp(p, v, t):
        return p + t * v

    @staticmethod
    def log(p, q):
        return q - p

    @staticmethod
    def distance(p, q):
        return float(np.linalg.norm(q - p))


class _OrthantRules:

    @staticmethod
    def inner(p, u, v):
        return float(np.sum(u * v / p ** 2))

    @staticmethod
    def geodesic(p, q, t):
        return np.exp((1.0 - t) * np.log(p) + t * np.log(q))

    @staticmethod
    def velocity(p, q, t):
        return _OrthantRules.geodesic(p, q, t) * np.log(q / p)

    @staticmethod
    def exp(p, v, t):
        return p * np.exp(t * v / p)

    @staticmethod
    def log(p, q):
        return p * np.log(q / p)

    @staticmethod
    def distance(p, q):
        return float(np.linalg.norm(np.log(q) - np.log(p)))


class _SpdRules:

    @staticmethod
    def inner(p, u, v):
        a = scipy.linalg.solve(p, u, assume_a="pos")
        b = scipy.linalg.solve(p, v, assume_a="pos")
        return float(np.sum(a * b.T))

    @staticmethod
    def _whitened(p, q):
        half, inv_half = spd_sqrt_pair(p)
        return half, sym(inv_half @ q @ inv_half)

    @staticmethod
    def geodesic(p, q, t):
        half, m = _SpdRules._whitened(p, q)
        return sym(half @ np.asarray(spd_power(m, t)) @ half)

    @staticmethod
    def velocity(p, q, t):
        half, m = _SpdRules._whitened(p, q)
        lam, v = sym_eig(m)
        return sym(half @ compose_eig(v, np.log(lam) * lam ** t) @ half)

    @staticmethod
    def exp(p, v, t):
        half, inv_half = spd_sqrt_pair(p)
        return sym(half @ np.asarray(sym_exp(t * sym(inv_half @ v @ inv_half))) @ half)

    @staticmethod
    def log(p, q):
        half, m = _SpdRules._whitened(p, q)
        return sym(half @ np.asarray(spd_log(m)) @ half)

    @staticmethod
    def distance(p, q):
        lam = scipy.linalg.eigvalsh(q, p)
        return float(np.sqrt(np.sum(np.log(lam) ** 2)))


_RULES = {
    manifold_kinds.euclidean: _EuclideanRules,
    manifold_kinds.orthant: _OrthantRules,
    manifold_kinds.spd: _SpdRules,
}


def _rules(m: ManifoldSpec):
    return _RULES[m.kind]


def _same_manifold(*objs):
    m = objs[0].manifold
    for o in objs[1:]:
        if o.manifold != m:
            raise UsageError("Arguments live on different manifolds: %s and %s" % (m, o.manifold))
    return m


def _new_point(m, coords):
    coords = np.asarray(coords)
    if not np.all(np.isfinite(coords)):
        raise ConditioningError("Geodesic left the floating point range on " + str(m))
    try:
        return Point(m, coords)
    except InputError as e:
        raise ConditioningError(str(e))


def _check_base(p: Point, *tangents: Tangent):
    for v in tangents:
        if v.base is not p and not np.array_equal(v.base.array, p.array):
            raise UsageError("Tangent is not based at the given point")


def metric_inner(p: Point, u: Tangent, v: Tangent) -> float:
    """
    g_p(u, v)
    """
    m = _same_manifold(p, u, v)
    _check_base(p, u, v)
    return _rules(m).inner(p.array, u.array, v.array)


def metric_norm(p: Point, u: Tangent) -> float:
    return float(np.sqrt(metric_inner(p, u, u)))


def geodesic_point(p: Point, q: Point, t: float) -> Point:
    """
    Point at time t on the closed form geodesic with gamma(0) = p and gamma(1) = q. t may leave [0, 1].
    """
    m = _same_manifold(p, q)
    return _new_point(m, _rules(m).geodesic(p.array, q.array, t))


def geodesic_velocity(p: Point, q: Point, t: float) -> Tangent:
    """
    Analytic derivative of geodesic_point with respect to t.
    """
    m = _same_manifold(p, q)
    base = geodesic_point(p, q, t)
    return Tangent(m, base, _rules(m).velocity(p.array, q.array, t))


def exp_map(p: Point, v: Tangent, t: float = 1.0) -> Point:
    m = _same_manifold(p, v)
    _check_base(p, v)
    return _new_point(m, _rules(m).exp(p.array, v.array, t))


def log_map(p: Point, q: Point) -> Tangent:
    m = _same_manifold(p, q)
    return Tangent(m, p, _rules(m).log(p.array, q.array))


def distance(p: Point, q: Point) -> float:
    m = _same_manifold(p, q)
    return _rules(m).distance(p.array, q.array)


def geometric_mean(p: Point, q: Point) -> Point:
    return geodesic_point(p, q, 0.5)


def to_frame(obj: Union[Point, Tangent]) -> np.ndarray:
    """
    Frame coordinates of a point or tangent (identity except on the SPD cone).
    """
    if obj.manifold.kind == manifold_kinds.spd:
        return sym_to_frame(obj.array)
    return np.array(obj.array)


def point_from_frame(m: ManifoldSpec, x) -> Point:
    if m.kind == manifold_kinds.spd:
        return Point(m, sym_from_frame(x, m.n))
    return Point(m, x)


def tangent_from_frame(p: Point, x) -> Tangent:
    m = p.manifold
    if m.kind == manifold_kinds.spd:
        return Tangent(m, p, sym_from_frame(x, m.n))
    return Tangent(m, p, x)


def is_valid_frame(m: ManifoldSpec, x, guard: float = 1e-12) -> bool:
    """
    True if the frame vector x is a point of m. Orthant coordinates have to exceed guard.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (m.dim,) or not np.all(np.isfinite(x)):
        return False
    if m.kind == manifold_kinds.orthant:
        return bool(np.all(x > guard))
    if m.kind == manifold_kinds.spd:
        try:
            scipy.linalg.cholesky(sym_from_frame(x, m.n))
        except scipy.linalg.LinAlgError:
            return False
    return True
