import dataclasses
import logging
import math
from typing import Any, Dict, Hashable, Optional, Tuple

import cvxpy as cp
import numpy as np

from ._cache import ThreadLocalCache
from ._core import CostBreakdown, ProblemParams, Schedule, cost_terms
from ._errors import InvalidParameters, OutOfDomain, SolverFailure
from ._util import FloatVector, as_vector, to_jsonable, translate_solver_errors

logger = logging.getLogger(__name__)

# Largest horizon brute_force_opt() will enumerate
BRUTE_FORCE_MAX_HORIZON = 4

_ACCEPTED_STATUSES = (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)


@dataclasses.dataclass(frozen=True)
class SolverOptions:
    # Absolute tolerance on constraint residuals of the raw solver output
    tolerance: float = 1e-6
    max_iter: int = 100000
    solver: str = "CLARABEL"
    # Regularizer added by opt_deterministic_tiebreak() when lambda == 0, relative to p_max
    tiebreak_scale: float = 1e-9

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise InvalidParameters(f"solver tolerance must be positive (got {self.tolerance})")
        if self.max_iter < 1:
            raise InvalidParameters(f"max_iter must be positive (got {self.max_iter})")
        if not self.tiebreak_scale > 0:
            raise InvalidParameters(
                f"tiebreak_scale must be positive (got {self.tiebreak_scale})"
            )

    def solver_kwargs(self) -> Dict[str, Any]:
        if self.solver == "CLARABEL":
            return {
                "max_iter": self.max_iter,
                "tol_gap_abs": 1e-9,
                "tol_gap_rel": 1e-9,
                "tol_feas": 1e-9,
            }
        return {}


DEFAULT_SOLVER_OPTIONS = SolverOptions()


@dataclasses.dataclass(frozen=True, eq=False)
class SolveReport:
    schedule: Schedule
    cost: CostBreakdown
    iterations: int
    # Largest constraint violation of the raw solver output, before repair
    residual: float
    status: str = cp.OPTIMAL
    method: str = "cvxpy"

    @property
    def decisions(self) -> np.ndarray:
        return self.schedule.decisions

    def to_dict(self) -> Dict[str, Any]:
        return {
            "decisions": to_jsonable(self.schedule.decisions),
            "utilization": to_jsonable(self.schedule.utilization),
            "cost": to_jsonable(self.cost),
            "iterations": self.iterations,
            "residual": to_jsonable(self.residual),
            "status": self.status,
            "method": self.method,
        }


class _Program:
    """The offline program for one (params, regularizer) pair, with prices as a parameter."""

    def __init__(self, params: ProblemParams, reg: float) -> None:
        horizon = params.horizon
        self.x = cp.Variable(horizon)
        self.prices = cp.Parameter(horizon)

        # x >= 0, so the switches in from x_0 = 0 and out to x_{T+1} = 0 are linear
        switching = self.x[0] + self.x[horizon - 1]
        if horizon > 1:
            switching = switching + cp.norm1(cp.diff(self.x))

        objective = self.prices @ self.x + params.beta * switching
        if reg > 0:
            objective = objective + reg * cp.sum_squares(self.x)

        constraints = [cp.sum(self.x) == 1, self.x >= 0, self.x <= params.limits]
        self.problem = cp.Problem(cp.Minimize(objective), constraints)


def _build_program(key: Hashable) -> _Program:
    params, reg = key  # type: ignore
    logger.debug("Compiling offline program for T=%d (reg=%g)", params.horizon, reg)
    return _Program(params, reg)


_programs: ThreadLocalCache[_Program] = ThreadLocalCache(_build_program)


def _repair(params: ProblemParams, raw: np.ndarray) -> Tuple[np.ndarray, float]:
    """Project the solver output onto the feasible set; return it with the raw residual."""
    limits = params.limits
    residual = max(
        abs(float(raw.sum()) - 1.0),
        float(np.max(-raw, initial=0.0)),
        float(np.max(raw - limits, initial=0.0)),
    )

    x = np.clip(raw, 0.0, limits)
    gap = 1.0 - float(x.sum())
    if gap > 0:
        slack = limits - x
        if slack.sum() > 0:
            x = x + gap * slack / slack.sum()
    elif gap < 0 and x.sum() > 0:
        x = x + gap * x / x.sum()

    return np.clip(x, 0.0, limits), residual


@translate_solver_errors
def _solve(
    params: ProblemParams, prices: np.ndarray, reg: float, options: SolverOptions
) -> SolveReport:
    program = _programs((params, reg))
    program.prices.value = prices

    program.problem.solve(solver=options.solver, warm_start=False, **options.solver_kwargs())

    status = str(program.problem.status)
    stats = program.problem.solver_stats
    iterations = int(stats.num_iters) if stats is not None and stats.num_iters is not None else 0
    raw = program.x.value

    if status not in _ACCEPTED_STATUSES or raw is None:
        raise SolverFailure(
            status,
            best_iterate=None if raw is None else np.array(raw, dtype=np.float64),
            iterations=iterations,
        )

    decisions, residual = _repair(params, np.array(raw, dtype=np.float64).reshape(-1))
    logger.debug(
        "Offline solve finished with status %s after %d iterations (residual %.3g)",
        status,
        iterations,
        residual,
    )
    if residual > options.tolerance:
        raise SolverFailure(
            status, best_iterate=decisions, residual=residual, iterations=iterations
        )

    return SolveReport(
        schedule=Schedule(decisions),
        cost=cost_terms(prices, decisions, params.beta, params.lambda_reg),
        iterations=iterations,
        residual=residual,
        status=status,
    )


def _check_prices(params: ProblemParams, prices: FloatVector) -> np.ndarray:
    arr = as_vector(prices, "prices", params.horizon)
    if not np.all(np.isfinite(arr)):
        raise InvalidParameters("prices must be finite")
    return arr


def solve_opt(
    params: ProblemParams, prices: FloatVector, options: Optional[SolverOptions] = None
) -> SolveReport:
    """Solve the offline problem exactly as stated (no tie-breaking).

    When ``lambda_reg == 0`` the minimizer may not be unique; which one is returned is
    deterministic but otherwise unspecified."""
    return _solve(
        params,
        _check_prices(params, prices),
        params.lambda_reg,
        options or DEFAULT_SOLVER_OPTIONS,
    )


def opt_deterministic_tiebreak(
    params: ProblemParams, prices: FloatVector, options: Optional[SolverOptions] = None
) -> SolveReport:
    """Like ``solve_opt()``, but with a vanishing regularizer when ``lambda_reg == 0`` so that the
    minimizer is unique. The reported cost is always measured with the real ``lambda_reg``."""
    options = options or DEFAULT_SOLVER_OPTIONS
    reg = params.lambda_reg if params.lambda_reg > 0 else options.tiebreak_scale * params.p_max
    return _solve(params, _check_prices(params, prices), reg, options)


def brute_force_opt(
    params: ProblemParams, prices: FloatVector, grid_step: float = 0.01
) -> SolveReport:
    """Enumerate every schedule on the grid ``{0, step, 2*step, ..., 1}`` and return the cheapest
    (the first in lexicographic order on ties)."""
    if params.horizon > BRUTE_FORCE_MAX_HORIZON:
        raise OutOfDomain("horizon", params.horizon, 1, BRUTE_FORCE_MAX_HORIZON)

    if not (0 < grid_step <= 1):
        raise InvalidParameters(f"grid_step must lie in (0, 1] (got {grid_step})")
    steps = int(round(1.0 / grid_step))
    if not math.isclose(steps * grid_step, 1.0, rel_tol=0.0, abs_tol=1e-9):
        raise InvalidParameters(f"grid_step {grid_step} does not divide 1 evenly")

    arr = _check_prices(params, prices)
    caps = np.floor(params.limits * steps + 1e-9).astype(np.int64)

    if params.horizon > 1:
        axes = np.meshgrid(*(np.arange(cap + 1) for cap in caps[:-1]), indexing="ij")
        head = np.stack([axis.ravel() for axis in axes], axis=1)
    else:
        head = np.zeros((1, 0), dtype=np.int64)
    last = steps - head.sum(axis=1)
    valid = (last >= 0) & (last <= caps[-1])
    if not valid.any():
        raise InvalidParameters(f"no schedule on a grid of step {grid_step} is feasible")

    grid = np.column_stack([head[valid], last[valid]]) / steps
    padded = np.pad(grid, ((0, 0), (1, 1)))
    totals = (
        grid @ arr
        + params.beta * np.abs(np.diff(padded, axis=1)).sum(axis=1)
        + params.lambda_reg * (grid**2).sum(axis=1)
    )
    best = grid[int(np.argmin(totals))]

    return SolveReport(
        schedule=Schedule(best),
        cost=cost_terms(arr, best, params.beta, params.lambda_reg),
        iterations=int(grid.shape[0]),
        residual=0.0,
        method="grid",
    )
