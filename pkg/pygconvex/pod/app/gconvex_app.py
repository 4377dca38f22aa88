"""
GConvex app as single point of interaction for the command line.

- `GConvexConfig` wraps the configuration of the app. It can read/write the config from a file (if provided)
- `GConvexAppFactory` builds an app with its log backends from a config
- `GConvexApp` runs the operations behind the commands and returns result objects, the commands decide about files
  and exit codes
"""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from pygconvex.core.base import manifold_kinds
from pygconvex.core.exceptions import PreconditionError, UsageError
from pygconvex.core.geometry.connection import ChristoffelTensor, CurveTrace, christoffel_closed, \
    christoffel_numeric, curve_length, geodesic_ode_solve, geodesic_trace, manifold_validity, \
    metric_compatibility_residual, metric_frame_of
from pygconvex.core.geometry.gconvex import ConvexityReport, builtin_field, default_sampler, default_t_grid, \
    derivative_summary, violation_search
from pygconvex.core.geometry.manifold import ManifoldSpec, Point, log_map, to_frame
from pygconvex.core.optimize.brascamp_lieb import BLDatum, BLResult, FeasibilityReport, heuristic_feasibility, \
    minimize_F, rank_one_convex_oracle
from pygconvex.core.optimize.geodesic_descent import DescentOptions
from pygconvex.core.optimize.operator_scaling import PositiveOperator, ScalingResult, alternating_scaling, \
    capacity_minimize, scale
from pygconvex.core.printing.util.print_util import to_table
from pygconvex.core.selftest.invariants import CheckResult, InvariantSuite
from pygconvex.core.util.inheritance import SuperStop
from pygconvex.core.util.utils import unpack
from pygconvex.pod.app.config.gconvex_config import GConvexConfig
from pygconvex.pod.app.config.run_config import RunConfig
from pygconvex.pod.backend.log_backends import FileLogBackend, StdErrLogBackend
from pygconvex.pod.service.logging_service import LoggingService

DESCENT_KEYS = ("step", "max_iter", "grad_tol", "armijo_factor", "armijo_slope", "max_backtracks",
                "divergence_floor")


@dataclass(eq=False)
class GeodesicRun:
    """ Closed form and integrated geodesic sampled at the same times. """
    closed: CurveTrace
    ode: CurveTrace
    max_deviation: float
    length: float

    def extra_columns(self):
        d = self.ode.dim
        columns = {}
        for i in range(d):
            columns["ode_x_%d" % (i + 1)] = self.ode.points[:, i]
        for i in range(d):
            columns["ode_v_%d" % (i + 1)] = self.ode.velocities[:, i]
        return columns

    def footer(self):
        return ["max_deviation=%r" % self.max_deviation, "length=%r" % self.length]


@dataclass(eq=False)
class ChristoffelRun:
    point: Point
    gamma: ChristoffelTensor
    source: str
    compatibility_residual: float
    closed_deviation: Optional[float] = None

    def to_document(self):
        doc = {"manifold": str(self.point.manifold), "point": self.point.array, "gamma": self.gamma,
               "source": self.source, "torsion": self.gamma.torsion(),
               "compatibility_residual": self.compatibility_residual}
        if self.closed_deviation is not None:
            doc["closed_deviation"] = self.closed_deviation
        return doc


@dataclass(eq=False)
class BLRun:
    """
    Outcome of the bl command. result is None if the datum was rejected before the descent.
    """
    feasibility: Optional[FeasibilityReport]
    result: Optional[BLResult] = None
    failed_check: Optional[str] = None

    @property
    def refuted(self):
        return self.failed_check is not None or (self.feasibility is not None and self.feasibility.refuted)

    def to_document(self):
        doc = {"feasibility": self.feasibility, "refuted": self.refuted}
        if self.failed_check is not None:
            doc["failed_check"] = self.failed_check
        if self.result is not None:
            doc["result"] = self.result
        return doc


@dataclass(eq=False)
class ScalingRun:
    result: ScalingResult

    def to_document(self):
        doc = self.result.to_document()
        if self.result.residual_trace:
            doc["alternating_iterations"] = len(self.result.residual_trace) - 1
        return doc


class GConvexAppFactory:

    @staticmethod
    def get(config=None, printer=print, verbose=False):
        if config is None:
            config = GConvexConfig()
        return GConvexApp(config=config, printer=printer, backends=GConvexAppFactory._parse_backends(config, verbose))

    @staticmethod
    def _parse_backends(config, verbose=False):
        log_dir, level = unpack(config.general, "log_dir", ("log_level", "warn"))
        backends = [StdErrLogBackend(level="info" if verbose else level)]
        if log_dir:
            backends.append(FileLogBackend(log_dir, level="info"))
        return backends


class GConvexApp(SuperStop):

    def __init__(self, config: GConvexConfig, printer=None, backends=None, **kwargs):
        self._config = config
        self._print = printer
        self._logging = LoggingService(backends)
        super().__init__(**kwargs)

    @property
    def config(self):
        return self._config

    @property
    def backends(self):
        return self._logging.backends

    def has_print(self) -> bool:
        return self._print is not None

    def print_(self, output, **kwargs):
        if self.has_print():
            self._print(output, **kwargs)

    def print_tables(self, objects, clz=None, columns=None):
        self.print_(to_table(clz, objects, columns=columns))

    def close(self):
        self._logging.close()

    def run_config(self, command, sections=(), **kwargs) -> RunConfig:
        return RunConfig.of(command, self._config, sections, **kwargs)

    @staticmethod
    def descent_options(run: RunConfig) -> DescentOptions:
        return DescentOptions.of(run.subset(*DESCENT_KEYS))

    @staticmethod
    def _relative_numeric_source(m: ManifoldSpec, rel_step):
        frame = metric_frame_of(m)
        return lambda x: christoffel_numeric(frame, x, rel_step * max(1.0, float(np.max(np.abs(x)))))

    def christoffel_source_of(self, run: RunConfig, m: ManifoldSpec, numeric: bool = None):
        if numeric is None:
            numeric = m.kind == manifold_kinds.spd
        if not numeric:
            if m.kind == manifold_kinds.spd:
                raise UsageError("No closed form Christoffel symbols on " + str(m))
            return lambda x: christoffel_closed(m, x)
        return self._relative_numeric_source(m, run["fd_rel_step"])

    # ------------------------------------------ commands -------------------------------------------

    def geodesic(self, run: RunConfig, p: Point, q: Point, numeric: bool = None) -> GeodesicRun:
        """
        Samples the closed form geodesic from p to q and integrates the geodesic equation with the initial
        velocity log_p(q) over the same times.
        """
        if p.manifold != q.manifold:
            raise UsageError("p lies on %s, q on %s" % (p.manifold, q.manifold))
        m = p.manifold
        steps = run["steps"]
        closed = geodesic_trace(p, q, steps + 1)
        ode = geodesic_ode_solve(self.christoffel_source_of(run, m, numeric), to_frame(p), to_frame(log_map(p, q)),
                                 1.0, steps, manifold_validity(m, run["orthant_guard"]))
        deviation = float(np.max(np.abs(closed.points - ode.points)))
        return GeodesicRun(closed, ode, deviation, curve_length(m, closed))

    def christoffel(self, run: RunConfig, point: Point, numeric: bool = None) -> ChristoffelRun:
        m = point.manifold
        x = to_frame(point)
        gamma = self.christoffel_source_of(run, m, numeric)(x)
        frame = metric_frame_of(m)
        residual = metric_compatibility_residual(frame, x, gamma=gamma)
        closed_deviation = None
        source = "numeric" if numeric or m.kind == manifold_kinds.spd else "closed"
        if source == "numeric" and m.kind != manifold_kinds.spd:
            closed_deviation = float(np.max(np.abs(np.asarray(gamma) - np.asarray(christoffel_closed(m, x)))))
        return ChristoffelRun(point, gamma, source, residual, closed_deviation)

    def gconvex(self, run: RunConfig, m: ManifoldSpec, fn: str, **params) -> ConvexityReport:
        """
        Midpoint search for a violation, then the first and second order tests on the pairs the search sampled.
        """
        f = builtin_field(fn, m, **params)
        sampler = default_sampler(m)
        t_grid = default_t_grid(run["t_grid_size"])
        report = violation_search(f, sampler, run["trials"], seed=run.seed, t_grid=t_grid, tol=run["tol_eq"])
        report.derivatives = derivative_summary(f, sampler, report.samples, seed=run.seed, delta=run["fd_step"],
                                                dt=run["second_step"], tol=run["tol_ineq"], t_grid=t_grid)
        return report

    def bl(self, run: RunConfig, d: BLDatum, oracle: bool = None) -> BLRun:
        """
        Feasibility heuristic, then geodesic descent on F. The rank one oracle runs for rank one data unless oracle
        is false.
        """
        try:
            feasibility = heuristic_feasibility(d, run["heuristic_trials"], seed=run.seed)
        except PreconditionError as e:
            return BLRun(None, failed_check=str(e))
        if feasibility.refuted:
            return BLRun(feasibility, failed_check="subspace condition fails for the witness subspace")
        try:
            result = minimize_F(d, options=self.descent_options(run))
        except PreconditionError as e:
            return BLRun(feasibility, failed_check=str(e))
        if oracle is None:
            oracle = d.rank_one
        if oracle:
            result.oracle_bl_constant = rank_one_convex_oracle(d, max_subsets=run["oracle_max_subsets"]).bl_constant
        return BLRun(feasibility, result)

    def opscale(self, run: RunConfig, T: PositiveOperator, alternating: bool = True) -> ScalingRun:
        capacity = capacity_minimize(T, options=self.descent_options(run))
        result = scale(T, capacity.X_star)
        result.status = capacity.status
        result.iterations = capacity.iterations
        result.gradient_norm = capacity.gradient_norm
        if alternating:
            oracle = alternating_scaling(T, run["iters"], run["tol"])
            result.alternating_log_capacity = oracle.log_capacity
            result.residual_trace = list(oracle.residuals)
        return ScalingRun(result)

    def selftest(self, run: RunConfig) -> List[CheckResult]:
        return InvariantSuite(run.seed, run["scale"]).execute()
