import dataclasses
import enum
import math
from typing import List, Optional, Tuple

import numpy as np

from ._errors import DimensionMismatch, InfeasibleSchedule, InvalidParameters, OutOfDomain
from ._util import BUDGET_TOL, FloatVector, as_vector, is_finite_number

# Slack allowed on the box constraints 0 <= x_t <= d_t before a violation is reported
RANGE_TOL = 1e-12


@dataclasses.dataclass(frozen=True)
class ProblemParams:  # pylint: disable=too-many-instance-attributes
    """Parameters shared by every instance of a workload-shifting problem.

    ``rate_limits`` defaults to ``d_t = 1`` for every step. Instances are hashable, so they can
    key caches of compiled solver programs."""

    p_min: float
    p_max: float
    horizon: int
    beta: float = 0.0
    lambda_reg: float = 0.0
    rate_limits: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        for name in ("p_min", "p_max", "beta", "lambda_reg"):
            value = getattr(self, name)
            if not is_finite_number(value):
                raise InvalidParameters(f"{name} must be a finite number (got {value!r})")
            object.__setattr__(self, name, float(value))

        if isinstance(self.horizon, bool) or not isinstance(self.horizon, (int, np.integer)):
            raise InvalidParameters(f"horizon must be an integer (got {self.horizon!r})")
        object.__setattr__(self, "horizon", int(self.horizon))
        if self.horizon < 1:
            raise InvalidParameters(f"horizon must be positive (got {self.horizon})")

        if not 0 < self.p_min <= self.p_max:
            raise InvalidParameters(
                f"prices must satisfy 0 < p_min <= p_max (got p_min={self.p_min}, "
                f"p_max={self.p_max})"
            )

        spread = self.p_max - self.p_min
        # Both upper bounds are open; a zero coefficient is always admissible.
        if self.beta < 0 or (self.beta > 0 and self.beta >= spread / 2):
            raise InvalidParameters(
                f"beta must lie in [0, (p_max - p_min)/2) = [0, {spread / 2}) (got {self.beta})"
            )
        if self.lambda_reg < 0 or (self.lambda_reg > 0 and self.lambda_reg >= spread):
            raise InvalidParameters(
                f"lambda_reg must lie in [0, p_max - p_min) = [0, {spread}) "
                f"(got {self.lambda_reg})"
            )

        if self.rate_limits is None:
            limits: Tuple[float, ...] = (1.0,) * self.horizon
        else:
            limits = tuple(float(d) for d in self.rate_limits)
        if len(limits) != self.horizon:
            raise DimensionMismatch("rate_limits", self.horizon, len(limits))
        for t, d in enumerate(limits, 1):
            if not (math.isfinite(d) and 0 < d <= 1):
                raise InvalidParameters(f"rate limit d_{t}={d} must lie in (0, 1]")
        if math.fsum(limits) < 1 - BUDGET_TOL:
            raise InvalidParameters(
                f"rate limits sum to {math.fsum(limits)} < 1; no feasible schedule exists"
            )
        object.__setattr__(self, "rate_limits", limits)

    @property
    def limits(self) -> np.ndarray:
        return np.array(self.rate_limits, dtype=np.float64)

    @property
    def spread(self) -> float:
        return self.p_max - self.p_min

    def remaining_capacity(self, t: int) -> float:
        """Total rate capacity of the steps after step ``t`` (1-based)."""
        assert self.rate_limits is not None
        return math.fsum(self.rate_limits[t:])

    def worst_case_cost(self) -> float:
        """Upper bound on the cost of any feasible schedule."""
        return self.p_max + 2 * self.beta + self.lambda_reg

    def best_case_cost(self) -> float:
        """Lower bound on the cost of any feasible schedule."""
        return self.p_min + self.lambda_reg / self.horizon


@dataclasses.dataclass(frozen=True, eq=False)
class Instance:
    params: ProblemParams
    prices: np.ndarray
    start: int = 0
    source: str = ""
    timestamps: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        prices = as_vector(self.prices, "prices", self.params.horizon)
        if not np.all(np.isfinite(prices)):
            raise InvalidParameters("prices must be finite")

        bad = np.flatnonzero((prices < self.params.p_min) | (prices > self.params.p_max))
        if bad.size:
            t = int(bad[0])
            raise InvalidParameters(
                f"price p_{t + 1}={prices[t]} lies outside [p_min, p_max] = "
                f"[{self.params.p_min}, {self.params.p_max}]"
            )

        if self.timestamps is not None and len(self.timestamps) != self.params.horizon:
            raise DimensionMismatch("timestamps", self.params.horizon, len(self.timestamps))

        object.__setattr__(self, "prices", prices)

    @property
    def horizon(self) -> int:
        return self.params.horizon


@dataclasses.dataclass(frozen=True, eq=False)
class UqForecast:
    """Point forecast with per-step uncertainty box ``[lower_t, upper_t]``.

    ``coverage_delta`` is the stated miscoverage probability: the true value lies inside the box
    with probability ``1 - coverage_delta``."""

    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    coverage_delta: float = 0.0

    def __post_init__(self) -> None:
        point = as_vector(self.point, "point")
        lower = as_vector(self.lower, "lower", point.shape[0])
        upper = as_vector(self.upper, "upper", point.shape[0])

        for name, arr in (("point", point), ("lower", lower), ("upper", upper)):
            if not np.all(np.isfinite(arr)):
                raise InvalidParameters(f"forecast {name} values must be finite")

        bad = np.flatnonzero((lower > point) | (point > upper))
        if bad.size:
            t = int(bad[0])
            raise InvalidParameters(
                f"forecast at step {t + 1} violates lower <= point <= upper "
                f"({lower[t]} <= {point[t]} <= {upper[t]})"
            )

        if not (is_finite_number(self.coverage_delta) and 0 <= self.coverage_delta <= 1):
            raise InvalidParameters(
                f"coverage_delta must lie in [0, 1] (got {self.coverage_delta})"
            )

        object.__setattr__(self, "point", point)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "coverage_delta", float(self.coverage_delta))

    @classmethod
    def exact(cls, prices: FloatVector) -> "UqForecast":
        """A forecast with zero-width boxes around ``prices``."""
        prices = as_vector(prices, "prices")
        return cls(point=prices, lower=prices, upper=prices, coverage_delta=0.0)

    @property
    def horizon(self) -> int:
        return int(self.point.shape[0])

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def clip_to(self, params: ProblemParams) -> "UqForecast":
        if self.horizon != params.horizon:
            raise DimensionMismatch("forecast", params.horizon, self.horizon)
        return UqForecast(
            point=np.clip(self.point, params.p_min, params.p_max),
            lower=np.clip(self.lower, params.p_min, params.p_max),
            upper=np.clip(self.upper, params.p_min, params.p_max),
            coverage_delta=self.coverage_delta,
        )

    def covers(self, prices: FloatVector) -> bool:
        prices = as_vector(prices, "prices", self.horizon)
        return bool(np.all((self.lower <= prices) & (prices <= self.upper)))

    def coverage_rate(self, prices: FloatVector) -> float:
        prices = as_vector(prices, "prices", self.horizon)
        return float(np.mean((self.lower <= prices) & (prices <= self.upper)))


@dataclasses.dataclass(frozen=True, eq=False)
class Schedule:
    decisions: np.ndarray
    utilization: np.ndarray = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        decisions = as_vector(self.decisions, "decisions")
        utilization = np.cumsum(decisions)
        utilization.setflags(write=False)
        object.__setattr__(self, "decisions", decisions)
        object.__setattr__(self, "utilization", utilization)

    @property
    def horizon(self) -> int:
        return int(self.decisions.shape[0])


@dataclasses.dataclass(frozen=True)
class CostBreakdown:
    signal_cost: float
    switching_cost: float
    regularizer_cost: float
    total: float = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "total", self.signal_cost + self.switching_cost + self.regularizer_cost
        )


@enum.unique
class ViolationKind(enum.Enum):
    RANGE = "range"
    RATE_LIMIT = "rate-limit"
    BUDGET = "budget"
    DIMENSION = "dimension"


@dataclasses.dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    # 1-based step index; None for whole-vector constraints
    index: Optional[int]
    value: float
    limit: float

    @property
    def magnitude(self) -> float:
        return abs(self.value - self.limit)

    def describe(self) -> str:
        if self.kind == ViolationKind.BUDGET:
            return f"decisions sum to {self.value!r} (expected {self.limit!r})"
        elif self.kind == ViolationKind.DIMENSION:
            return f"{int(self.value)} decisions given for a horizon of {int(self.limit)}"
        elif self.kind == ViolationKind.RATE_LIMIT:
            return f"x_{self.index}={self.value!r} exceeds the rate limit {self.limit!r}"
        else:
            return f"x_{self.index}={self.value!r} is outside [0, 1] (limit {self.limit!r})"


@dataclasses.dataclass(frozen=True)
class FeasibilityReport:
    violations: Tuple[Violation, ...]

    @property
    def is_feasible(self) -> bool:
        return not self.violations

    @property
    def first(self) -> Optional[Violation]:
        return self.violations[0] if self.violations else None


def check_feasible(params: ProblemParams, decisions: FloatVector) -> FeasibilityReport:
    x = np.asarray(decisions, dtype=np.float64).reshape(-1)
    if x.shape[0] != params.horizon:
        return FeasibilityReport(
            (Violation(ViolationKind.DIMENSION, None, float(x.shape[0]), float(params.horizon)),)
        )

    violations: List[Violation] = []
    assert params.rate_limits is not None
    for t, (value, limit) in enumerate(zip(x.tolist(), params.rate_limits), 1):
        if math.isnan(value) or value < -RANGE_TOL:
            violations.append(Violation(ViolationKind.RANGE, t, value, 0.0))
        elif value > 1 + RANGE_TOL:
            violations.append(Violation(ViolationKind.RANGE, t, value, 1.0))
        elif value > limit + RANGE_TOL:
            violations.append(Violation(ViolationKind.RATE_LIMIT, t, value, limit))

    total = math.fsum(x.tolist())
    if not abs(total - 1) <= BUDGET_TOL:
        violations.append(Violation(ViolationKind.BUDGET, None, total, 1.0))

    return FeasibilityReport(tuple(violations))


def cost_terms(
    prices: np.ndarray, decisions: np.ndarray, beta: float, lambda_reg: float
) -> CostBreakdown:
    """Evaluate the three objective terms without any feasibility checks."""
    padded = np.concatenate(([0.0], decisions, [0.0]))
    return CostBreakdown(
        signal_cost=float(np.dot(prices, decisions)),
        switching_cost=beta * float(np.sum(np.abs(np.diff(padded)))),
        regularizer_cost=lambda_reg * float(np.dot(decisions, decisions)),
    )


def evaluate_cost(instance: Instance, schedule: Schedule) -> CostBreakdown:
    params = instance.params
    if schedule.horizon != params.horizon:
        raise DimensionMismatch("schedule", params.horizon, schedule.horizon)

    report = check_feasible(params, schedule.decisions)
    if report.first is not None:
        raise InfeasibleSchedule(report.first, len(report.violations))

    return cost_terms(instance.prices, schedule.decisions, params.beta, params.lambda_reg)


def compulsory_floor(params: ProblemParams, t: int, w_prev: float) -> float:
    """The smallest decision at step ``t`` (1-based) that keeps the workload completable, given
    utilization ``w_prev`` after step ``t - 1``."""
    if not 1 <= t <= params.horizon:
        raise OutOfDomain("t", t, 1, params.horizon)
    if not -RANGE_TOL <= w_prev <= 1 + RANGE_TOL:
        raise OutOfDomain("w_prev", w_prev, 0.0, 1.0)

    return max(0.0, (1.0 - w_prev) - params.remaining_capacity(t))


def step_cap(params: ProblemParams, t: int, w_prev: float) -> float:
    """The largest admissible decision at step ``t``: ``min(d_t, 1 - w_prev)``."""
    assert params.rate_limits is not None
    return max(0.0, min(params.rate_limits[t - 1], 1.0 - w_prev))
