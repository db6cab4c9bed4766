import dataclasses
import logging
import math
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ._core import (
    CostBreakdown,
    Instance,
    ProblemParams,
    Schedule,
    UqForecast,
    compulsory_floor,
    evaluate_cost,
    step_cap,
)
from ._dus import DusConfig, DusResult, dus_solve
from ._errors import DimensionMismatch, OutOfDomain, PolicyError
from ._offline import SolverOptions, opt_deterministic_tiebreak
from ._robust import ThresholdSpec, alpha_sasp, pseudo_cost_step
from ._util import FloatVector, as_vector, is_finite_number, to_jsonable

logger = logging.getLogger(__name__)

# (t, p_t, x_{t-1}, w_{t-1}) -> proposed x_t; t is 1-based
Policy = Callable[[int, float, float, float], float]

ALGORITHM_RORO = "roro"
ALGORITHM_THRESHOLD = "threshold"
ALGORITHM_RO_ADVICE = "ro-advice"
ALGORITHM_UQ_ADVICE = "uq-advice"


@dataclasses.dataclass(frozen=True, eq=False)
class RunRecord:  # pylint: disable=too-many-instance-attributes
    algorithm_name: str
    schedule: Schedule
    cost: CostBreakdown
    # Utilization when the compulsory trade first forced a larger decision (1.0 if it never did)
    final_utilization_pre_compulsory: float
    gamma_used: Optional[float] = None
    dus_used: Optional[float] = None
    empirical_cr: Optional[float] = None
    # 1-based steps whose proposal was moved into [floor, cap]
    clamped_steps: Tuple[int, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm_name,
            "decisions": to_jsonable(self.schedule.decisions),
            "cost": to_jsonable(self.cost),
            "final_utilization_pre_compulsory": self.final_utilization_pre_compulsory,
            "gamma": self.gamma_used,
            "dus": self.dus_used,
            "empirical_cr": self.empirical_cr,
            "clamped_steps": list(self.clamped_steps),
        }


def run_online(
    instance: Instance,
    policy: Policy,
    *,
    name: str = "custom",
    gamma: Optional[float] = None,
    dus: Optional[float] = None,
) -> RunRecord:
    """Drive ``policy`` through the instance one step at a time.

    The policy only ever sees the current price. Each proposal is clamped to
    ``[compulsory_floor, min(d_t, 1 - w_{t-1})]`` so the finished schedule is always feasible."""
    params = instance.params
    decisions = np.zeros(params.horizon)
    w_prev = 0.0
    x_prev = 0.0
    pre_compulsory: Optional[float] = None
    clamped: List[int] = []

    for t in range(1, params.horizon + 1):
        price = float(instance.prices[t - 1])
        proposal = policy(t, price, x_prev, w_prev)
        if not is_finite_number(proposal) or proposal < 0:
            raise PolicyError(t, proposal)
        proposal = float(proposal)

        floor = compulsory_floor(params, t, min(w_prev, 1.0))
        cap = step_cap(params, t, w_prev)
        if pre_compulsory is None and floor > min(proposal, cap):
            pre_compulsory = w_prev + min(proposal, cap)

        decision = min(max(proposal, floor), cap)
        if decision != proposal:
            clamped.append(t)
            logger.debug("%s: step %d proposal %r clamped to %r", name, t, proposal, decision)

        decisions[t - 1] = decision
        w_prev += decision
        x_prev = decision

    schedule = Schedule(decisions)
    return RunRecord(
        algorithm_name=name,
        schedule=schedule,
        cost=evaluate_cost(instance, schedule),
        final_utilization_pre_compulsory=1.0 if pre_compulsory is None else pre_compulsory,
        gamma_used=gamma,
        dus_used=dus,
        clamped_steps=tuple(clamped),
    )


def roro_run(instance: Instance) -> RunRecord:
    params = instance.params
    spec = ThresholdSpec.from_params(params)

    def policy(t: int, price: float, x_prev: float, w_prev: float) -> float:
        return pseudo_cost_step(spec, price, x_prev, w_prev, step_cap(params, t, w_prev))

    return run_online(instance, policy, name=ALGORITHM_RORO)


def threshold_run(instance: Instance) -> RunRecord:
    params = instance.params
    threshold = math.sqrt(params.p_min * params.p_max)

    def policy(t: int, price: float, x_prev: float, w_prev: float) -> float:
        return step_cap(params, t, w_prev) if price < threshold else 0.0

    return run_online(instance, policy, name=ALGORITHM_THRESHOLD)


def _advice_run(
    instance: Instance,
    advice: np.ndarray,
    weight: float,
    name: str,
    dus: Optional[float] = None,
) -> RunRecord:
    """Mix fixed advice decisions with the robust step, which sees the combined state."""
    params = instance.params
    if advice.shape[0] != params.horizon:
        raise DimensionMismatch("advice", params.horizon, advice.shape[0])
    spec = ThresholdSpec.from_params(params)

    def policy(t: int, price: float, x_prev: float, w_prev: float) -> float:
        robust = pseudo_cost_step(spec, price, x_prev, w_prev, step_cap(params, t, w_prev))
        return weight * float(advice[t - 1]) + (1.0 - weight) * robust

    return run_online(instance, policy, name=name, gamma=weight, dus=dus)


def ro_advice_run(
    instance: Instance,
    advice_prices: FloatVector,
    trust: float,
    *,
    solver_options: Optional[SolverOptions] = None,
) -> RunRecord:
    """Follow the optimal decisions for ``advice_prices`` with fixed weight ``trust``."""
    if not (is_finite_number(trust) and 0 <= trust <= 1):
        raise OutOfDomain("trust", trust, 0.0, 1.0)
    params = instance.params
    prices = as_vector(advice_prices, "advice_prices", params.horizon)
    advice = opt_deterministic_tiebreak(params, prices, solver_options).decisions
    return _advice_run(instance, advice, float(trust), ALGORITHM_RO_ADVICE)


def uq_advice_run(
    instance: Instance,
    forecast: UqForecast,
    dus_config: Optional[DusConfig] = None,
    *,
    dus_result: Optional[DusResult] = None,
    solver_options: Optional[SolverOptions] = None,
) -> RunRecord:
    """Follow the forecast's optimal decisions with a weight set by its decision uncertainty.

    A precomputed ``dus_result`` for the same forecast skips the DUS search."""
    params = instance.params
    forecast = forecast.clip_to(params)
    advice = opt_deterministic_tiebreak(params, forecast.point, solver_options).decisions
    if dus_result is None:
        dus_result = dus_solve(params, forecast, dus_config, solver_options=solver_options)

    return _advice_run(
        instance, advice, dus_result.gamma, ALGORITHM_UQ_ADVICE, dus=dus_result.score
    )


def _check_dus(dus: float) -> float:
    if not (is_finite_number(dus) and -1e-9 <= dus <= 2 + 1e-9):
        raise OutOfDomain("dus", dus, 0.0, 2.0)
    return min(max(float(dus), 0.0), 2.0)


def consistency_bound(alpha: float, dus: float) -> float:
    dus = _check_dus(dus)
    return 1.0 + (alpha - 1.0) * dus / 2.0


def robustness_bound(params: ProblemParams, alpha: float, dus: float) -> float:
    dus = _check_dus(dus)
    spread_ratio = (params.p_max + 2 * params.beta + params.lambda_reg) / params.best_case_cost()
    return (1.0 - dus / 2.0) * spread_ratio + (dus / 2.0) * alpha


def uq_robustness_bound(params: ProblemParams, alpha: float, dus: float) -> float:
    dus = _check_dus(dus)
    slack = (
        params.p_max - params.p_min + 4 * params.beta + 2 * params.lambda_reg
    ) / params.best_case_cost()
    return 1.0 + (dus / 2.0) * (alpha - 1.0 + (1.0 - dus / 2.0) * slack)


@dataclasses.dataclass(frozen=True)
class BoundCheck:
    name: str
    bound: float
    observed: float

    @property
    def holds(self) -> bool:
        return self.observed <= self.bound + 1e-6


def check_run_bounds(
    instance: Instance,
    record: RunRecord,
    opt_cost: float,
    *,
    forecast: Optional[UqForecast] = None,
    dus_slack: float = 0.05,
) -> List[BoundCheck]:
    """Evaluate the competitive-ratio guarantees that apply to a finished run.

    RORO runs are checked against ``alpha_sasp``. UQ-Advice runs are checked for robustness
    always, for UQ-robustness when ``forecast`` covers the prices and for consistency when its
    point forecast is exact. The DUS of a run is a lower bound, so each bound is evaluated at
    both the run's DUS and ``DUS + dus_slack`` and the looser value is used."""
    params = instance.params
    observed = record.cost.total / opt_cost
    alpha = alpha_sasp(params)
    checks: List[BoundCheck] = []

    if record.algorithm_name == ALGORITHM_RORO:
        checks.append(BoundCheck("alpha", alpha, observed))

    if record.algorithm_name == ALGORITHM_UQ_ADVICE and record.dus_used is not None:
        scores = (record.dus_used, min(2.0, record.dus_used + dus_slack))

        def looser(bound: Callable[[float], float]) -> float:
            return max(bound(score) for score in scores)

        checks.append(
            BoundCheck(
                "robustness", looser(lambda s: robustness_bound(params, alpha, s)), observed
            )
        )
        if forecast is not None and forecast.covers(instance.prices):
            checks.append(
                BoundCheck(
                    "uq-robustness",
                    looser(lambda s: uq_robustness_bound(params, alpha, s)),
                    observed,
                )
            )
        if forecast is not None and np.array_equal(forecast.point, instance.prices):
            checks.append(
                BoundCheck("consistency", looser(lambda s: consistency_bound(alpha, s)), observed)
            )

    return checks
