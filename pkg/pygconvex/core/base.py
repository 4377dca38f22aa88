"""
Constant namespaces shared by the core modules.
"""
from pygconvex.core.util.utils import _Const


class _ManifoldKinds(_Const):
    euclidean = "euclidean"
    orthant = "orthant"
    spd = "spd"


"""
Enum of the supported Riemannian manifolds
"""
manifold_kinds = _ManifoldKinds()


class _Verdicts(_Const):
    consistent = "consistent"
    violated = "violated"


"""
Enum of convexity verdicts
"""
verdicts = _Verdicts()


class _DescentStatus(_Const):
    converged = "converged"
    max_iter = "max_iter"
    infeasible_suspected = "infeasible_suspected"
    capacity_zero_suspected = "capacity_zero_suspected"


"""
Enum of the outcomes of a geodesic descent
"""
descent_status = _DescentStatus()


class _Feasibility(_Const):
    plausible = "plausible"
    refuted = "refuted"
    heuristic = "heuristic"


"""
Enum of the outcomes of the feasibility heuristic
"""
feasibility = _Feasibility()
