import dataclasses
import itertools
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.optimize
from scipy.stats import qmc

from ._core import ProblemParams, UqForecast
from ._errors import DimensionMismatch, InvalidParameters, OutOfDomain
from ._offline import SolverOptions, opt_deterministic_tiebreak
from ._util import FloatVector, as_vector, substream, to_jsonable

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class DusConfig:  # pylint: disable=too-many-instance-attributes
    # Maximum number of offline solves spent on scenario evaluations
    eval_budget: int = 500
    n_starts: int = 16
    # Bounded scalar-search iterations per coordinate per sweep
    refine_iters: int = 8
    sweeps: int = 2
    seed: int = 0
    # Target optimality gap of a certified maximizer; recorded only
    epsilon: float = 1e-3
    # Multiplier applied to the score before gamma is derived (>= 1 is conservative)
    score_inflation: float = 1.0

    def __post_init__(self) -> None:
        if self.eval_budget < 1:
            raise InvalidParameters(f"eval_budget must be positive (got {self.eval_budget})")
        if self.n_starts < 1:
            raise InvalidParameters(f"n_starts must be positive (got {self.n_starts})")
        if self.eval_budget < self.n_starts:
            raise InvalidParameters(
                f"eval_budget ({self.eval_budget}) must be at least n_starts ({self.n_starts})"
            )
        if self.refine_iters < 1 or self.sweeps < 0:
            raise InvalidParameters("refine_iters must be positive and sweeps non-negative")
        if not self.epsilon > 0:
            raise InvalidParameters(f"epsilon must be positive (got {self.epsilon})")
        if not (math.isfinite(self.score_inflation) and self.score_inflation >= 1):
            raise InvalidParameters(
                f"score_inflation must be at least 1 (got {self.score_inflation})"
            )


@dataclasses.dataclass(frozen=True, eq=False)
class DusResult:
    score: float
    worst_scenario: np.ndarray
    evals_used: int
    gamma: float
    epsilon: float
    is_certified: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            field.name: to_jsonable(getattr(self, field.name))
            for field in dataclasses.fields(self)
        }


def gamma_from_dus(score: float) -> float:
    if not (math.isfinite(score) and -1e-9 <= score <= 2 + 1e-9):
        raise OutOfDomain("score", score, 0.0, 2.0)
    return 1.0 - min(max(score, 0.0), 2.0) / 2.0


def lipschitz_constant(params: ProblemParams) -> float:
    """Lipschitz constant of ``z -> |OPT(p_hat) - OPT(z)|_1``: ``sqrt(T) / (2 lambda)``."""
    if params.lambda_reg == 0:
        return math.inf
    return math.sqrt(params.horizon) / (2 * params.lambda_reg)


def certified_iteration_bound(
    params: ProblemParams, forecast: UqForecast, epsilon: float
) -> float:
    """Iterations a Lipschitz-certified maximizer would need to come within ``epsilon`` of the
    true score. Usually astronomically large, and infinite when ``lambda == 0``."""
    if not epsilon > 0:
        raise OutOfDomain("epsilon", epsilon, 0.0)

    diameter = float(np.linalg.norm(forecast.widths))
    if diameter == 0:
        return 1.0

    constant = lipschitz_constant(params)
    if math.isinf(constant):
        return math.inf
    try:
        return math.pow(constant * diameter / epsilon, params.horizon)
    except OverflowError:
        return math.inf


def box_samples(forecast: UqForecast, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """``n_samples`` scenarios drawn uniformly from the forecast box, one per row."""
    unit = rng.random((n_samples, forecast.horizon))
    return forecast.lower + unit * forecast.widths


def sample_pool(
    forecast: UqForecast, n_samples: int, seed: int, center: Optional[FloatVector] = None
) -> np.ndarray:
    """The scenarios ``dus_sample_bound()`` evaluates: uniform samples, then for each step the
    center with that single coordinate moved to its lower and upper bound."""
    if n_samples < 1:
        raise InvalidParameters(f"n_samples must be positive (got {n_samples})")
    base = forecast.point if center is None else as_vector(center, "center", forecast.horizon)

    extremes = []
    for t in range(forecast.horizon):
        for bound in (forecast.lower, forecast.upper):
            scenario = base.copy()
            scenario[t] = bound[t]
            extremes.append(scenario)

    return np.vstack([box_samples(forecast, n_samples, substream(seed, 1)), np.array(extremes)])


def _check_forecast(params: ProblemParams, forecast: UqForecast) -> None:
    if forecast.horizon != params.horizon:
        raise DimensionMismatch("forecast", params.horizon, forecast.horizon)


def dus_evaluate(
    params: ProblemParams,
    forecast: UqForecast,
    scenarios: np.ndarray,
    *,
    center: Optional[FloatVector] = None,
    solver_options: Optional[SolverOptions] = None,
) -> np.ndarray:
    """``|OPT(center) - OPT(z)|_1`` for every scenario row ``z``."""
    _check_forecast(params, forecast)
    base = forecast.point if center is None else as_vector(center, "center", params.horizon)
    reference = opt_deterministic_tiebreak(params, base, solver_options).decisions

    rows = np.atleast_2d(np.asarray(scenarios, dtype=np.float64))
    return np.array(
        [
            _distance(reference, opt_deterministic_tiebreak(params, row, solver_options).decisions)
            for row in rows
        ]
    )


def dus_sample_bound(
    params: ProblemParams,
    forecast: UqForecast,
    n_samples: int,
    seed: int,
    *,
    center: Optional[FloatVector] = None,
    solver_options: Optional[SolverOptions] = None,
) -> float:
    pool = sample_pool(forecast, n_samples, seed, center)
    values = dus_evaluate(params, forecast, pool, center=center, solver_options=solver_options)
    return float(values.max())


def _distance(a: np.ndarray, b: np.ndarray) -> float:
    return min(2.0, float(np.abs(a - b).sum()))


class _BudgetExhausted(Exception):
    pass


class _Objective:
    """Counts offline solves and remembers the best scenario seen so far."""

    def __init__(
        self,
        params: ProblemParams,
        reference: np.ndarray,
        budget: int,
        solver_options: Optional[SolverOptions],
    ) -> None:
        self.params = params
        self.reference = reference
        self.budget = budget
        self.solver_options = solver_options
        self.used = 0
        self.best_value = -math.inf
        self.best_scenario: Optional[np.ndarray] = None

    def __call__(self, scenario: np.ndarray) -> float:
        if self.used >= self.budget:
            raise _BudgetExhausted
        self.used += 1

        decisions = opt_deterministic_tiebreak(self.params, scenario, self.solver_options).decisions
        value = _distance(self.reference, decisions)
        if value > self.best_value:
            self.best_value = value
            self.best_scenario = scenario.copy()
        return value


def _starts(
    forecast: UqForecast, config: DusConfig, extra_starts: Optional[np.ndarray]
) -> List[np.ndarray]:
    horizon = forecast.horizon
    lower = forecast.lower
    upper = forecast.upper
    rng = substream(config.seed, 0)

    starts: List[np.ndarray] = [lower.copy(), upper.copy()]

    n_vertices = config.n_starts // 2
    if horizon <= 20 and 2**horizon <= n_vertices:
        patterns: Sequence[Tuple[bool, ...]] = list(
            itertools.product((False, True), repeat=horizon)
        )
    else:
        patterns = [tuple(row) for row in rng.random((n_vertices, horizon)) < 0.5]
    for pattern in patterns:
        starts.append(np.where(np.array(pattern, dtype=bool), upper, lower))

    n_interior = config.n_starts - n_vertices
    if n_interior > 0:
        unit = qmc.LatinHypercube(d=horizon, seed=rng).random(n_interior)
        starts.extend(lower + unit * forecast.widths)

    if extra_starts is not None:
        starts.extend(np.clip(np.atleast_2d(extra_starts), lower, upper))

    unique: List[np.ndarray] = []
    seen = set()
    for start in starts:
        key = start.tobytes()
        if key not in seen:
            seen.add(key)
            unique.append(np.array(start, dtype=np.float64))
    return unique


def _refine(
    objective: _Objective,
    start: np.ndarray,
    value: float,
    forecast: UqForecast,
    config: DusConfig,
) -> None:
    scenario = start.copy()
    for _ in range(config.sweeps):
        for t in range(forecast.horizon):
            low = float(forecast.lower[t])
            high = float(forecast.upper[t])
            if high <= low:
                continue

            def at(coord: float, t: int = t) -> np.ndarray:
                trial = scenario.copy()
                trial[t] = coord
                return trial

            best_coord = float(scenario[t])
            for coord in (low, high):
                if coord != best_coord:
                    trial_value = objective(at(coord))
                    if trial_value > value:
                        value, best_coord = trial_value, coord

            result = scipy.optimize.minimize_scalar(
                lambda coord: -objective(at(coord)),
                bounds=(low, high),
                method="bounded",
                options={"maxiter": config.refine_iters},
            )
            if -float(result.fun) > value:
                value, best_coord = -float(result.fun), float(result.x)

            scenario[t] = best_coord


def dus_solve(
    params: ProblemParams,
    forecast: UqForecast,
    config: Optional[DusConfig] = None,
    *,
    center: Optional[FloatVector] = None,
    extra_starts: Optional[np.ndarray] = None,
    solver_options: Optional[SolverOptions] = None,
) -> DusResult:
    """Search the forecast box for the scenario whose optimal decisions differ most from those of
    ``center`` (the point forecast by default).

    Every start is evaluated first; starts are then refined one coordinate at a time, best first,
    until the evaluation budget runs out. The score is a lower bound on the true maximum."""
    config = config or DusConfig()
    _check_forecast(params, forecast)
    base = forecast.point if center is None else as_vector(center, "center", params.horizon)

    if not np.any(forecast.widths > 0) and np.array_equal(base, forecast.lower):
        return DusResult(
            score=0.0,
            worst_scenario=forecast.lower.copy(),
            evals_used=0,
            gamma=1.0,
            epsilon=config.epsilon,
        )

    reference = opt_deterministic_tiebreak(params, base, solver_options).decisions
    objective = _Objective(params, reference, config.eval_budget, solver_options)

    starts = _starts(forecast, config, extra_starts)
    values: List[float] = []
    try:
        for start in starts:
            values.append(objective(start))

        order = sorted(range(len(values)), key=lambda i: -values[i])
        for i in order:
            _refine(objective, starts[i], values[i], forecast, config)
    except _BudgetExhausted:
        logger.debug("DUS evaluation budget of %d exhausted", config.eval_budget)

    assert objective.best_scenario is not None
    score = min(2.0, max(0.0, objective.best_value))
    logger.debug(
        "DUS search finished: score %.6g after %d evaluations (%d starts)",
        score,
        objective.used,
        len(starts),
    )

    return DusResult(
        score=score,
        worst_scenario=objective.best_scenario,
        evals_used=objective.used,
        gamma=gamma_from_dus(min(2.0, score * config.score_inflation)),
        epsilon=config.epsilon,
    )
