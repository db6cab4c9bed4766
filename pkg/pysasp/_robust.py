import dataclasses
import math
from typing import List, Tuple

from ._core import ProblemParams
from ._errors import OutOfDomain
from ._util import is_finite_number

# Slack on [0, 1] arguments, to absorb rounding in accumulated utilizations
DOMAIN_TOL = 1e-12

_BRANCH_POINT = -1.0 / math.e


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function for real ``x >= -1/e``.

    Halley's iteration, seeded with the branch-point series ``sqrt(2(e*x + 1)) - 1`` when ``x`` is
    within 1.5 of ``-1/e`` and with ``log(x) - log(log(x))`` elsewhere."""
    if not is_finite_number(x):
        raise OutOfDomain("x", x, _BRANCH_POINT)
    x = float(x)
    if x < _BRANCH_POINT - DOMAIN_TOL:
        raise OutOfDomain("x", x, _BRANCH_POINT)
    if x <= _BRANCH_POINT:
        return -1.0
    if x == 0:
        return 0.0

    if abs(x - _BRANCH_POINT) <= 1.5:
        w = math.sqrt(max(0.0, 2.0 * (math.e * x + 1.0))) - 1.0
    else:
        logx = math.log(x)
        w = logx - math.log(logx)

    for _ in range(100):
        ew = math.exp(w)
        resid = w * ew - x
        w1 = w + 1.0
        if w1 == 0:
            break
        dw = resid / (ew * w1 - (w + 2.0) * resid / (2.0 * w1))
        w -= dw
        if abs(dw) < 0.7e-16 * (2.0 + abs(w)):
            break

    return max(w, -1.0)


def alpha_roro(params: ProblemParams) -> float:
    """The optimal competitive ratio of the robust threshold algorithm for ``params``' band."""
    return _alpha_and_w(params)[0]


def _alpha_and_w(params: ProblemParams) -> Tuple[float, float]:
    ratio = 2 * params.beta / params.p_max
    arg = ((2 * params.beta + params.p_min) / params.p_max - 1.0) * math.exp(ratio - 1.0)
    w = lambert_w0(max(arg, _BRANCH_POINT))
    bracket = w - ratio + 1.0
    assert bracket > 0, bracket
    return max(1.0, 1.0 / bracket), w


def alpha_sasp(params: ProblemParams) -> float:
    alpha = alpha_roro(params)
    if params.lambda_reg == 0:
        return alpha

    horizon = params.horizon
    return (
        horizon
        * (alpha * params.p_min + params.lambda_reg)
        / (horizon * params.p_min + params.lambda_reg)
    )


@dataclasses.dataclass(frozen=True)
class ThresholdSpec:
    """The dynamic threshold ``phi(w) = p_max - beta + C * exp(w / alpha)``.

    ``phi`` decreases from ``p_max/alpha + beta`` at ``w = 0`` to ``p_min + beta`` at ``w = 1``;
    it is constant when ``p_min == p_max``."""

    params: ProblemParams
    alpha_roro: float
    coefficient_c: float

    @classmethod
    def from_params(cls, params: ProblemParams) -> "ThresholdSpec":
        alpha, w = _alpha_and_w(params)
        # Equal to p_max/alpha - p_max + 2*beta, without the cancellation
        return cls(params=params, alpha_roro=alpha, coefficient_c=params.p_max * w)

    @property
    def phi_low(self) -> float:
        return phi(self, 1.0)

    @property
    def phi_high(self) -> float:
        return phi(self, 0.0)


def _check_unit(name: str, value: float) -> float:
    if not (is_finite_number(value) and -DOMAIN_TOL <= value <= 1 + DOMAIN_TOL):
        raise OutOfDomain(name, value, 0.0, 1.0)
    return min(max(float(value), 0.0), 1.0)


def phi(spec: ThresholdSpec, w: float) -> float:
    w = _check_unit("w", w)
    params = spec.params
    return params.p_max - params.beta + spec.coefficient_c * math.exp(w / spec.alpha_roro)


def phi_inverse(spec: ThresholdSpec, y: float) -> float:
    low = spec.phi_low
    high = spec.phi_high
    tol = 1e-9 * max(1.0, abs(y)) if is_finite_number(y) else 0.0
    if not (is_finite_number(y) and low - tol <= y <= high + tol):
        raise OutOfDomain("y", y, low, high)

    if spec.coefficient_c == 0:
        # Constant threshold
        return 0.0

    params = spec.params
    ratio = (y - params.p_max + params.beta) / spec.coefficient_c
    ratio = min(max(ratio, 1.0), math.exp(1.0 / spec.alpha_roro))
    return min(max(spec.alpha_roro * math.log(ratio), 0.0), 1.0)


def phi_integral(spec: ThresholdSpec, a: float, b: float) -> float:
    """Closed-form integral of ``phi`` over ``[a, b]``."""
    a = _check_unit("a", a)
    b = _check_unit("b", b)
    if a > b:
        raise OutOfDomain("a", a, 0.0, b)

    params = spec.params
    alpha = spec.alpha_roro
    growth = math.exp(a / alpha) * math.expm1((b - a) / alpha)
    return (params.p_max - params.beta) * (b - a) + spec.coefficient_c * alpha * growth


def pseudo_cost_objective(
    spec: ThresholdSpec, price: float, x: float, x_prev: float, w_prev: float
) -> float:
    upper = min(1.0, w_prev + x)
    return (
        price * x
        + spec.params.beta * abs(x - x_prev)
        - phi_integral(spec, w_prev, upper)
    )


def pseudo_cost_step(
    spec: ThresholdSpec, price: float, x_prev: float, w_prev: float, cap: float
) -> float:
    """Minimize ``price*x + beta*|x - x_prev| - integral(phi, w_prev, w_prev + x)`` over
    ``[0, cap]``.

    The objective is convex, so its minimizer is one of the interval ends, the kink at ``x_prev``
    or a stationary point ``phi(w_prev + x) = price +/- beta``. Ties go to the smallest ``x``."""
    if not is_finite_number(price):
        raise OutOfDomain("price", price)
    x_prev = _check_unit("x_prev", x_prev)
    w_prev = _check_unit("w_prev", w_prev)
    cap = _check_unit("cap", cap)
    if cap > 1.0 - w_prev + DOMAIN_TOL:
        raise OutOfDomain("cap", cap, 0.0, 1.0 - w_prev)
    cap = min(cap, 1.0 - w_prev)

    beta = spec.params.beta
    low = spec.phi_low
    high = spec.phi_high

    candidates: List[float] = [0.0, cap, min(max(x_prev, 0.0), cap)]
    for level in (price + beta, price - beta):
        if low <= level <= high:
            x = phi_inverse(spec, level) - w_prev
            if 0.0 <= x <= cap:
                candidates.append(x)

    values = [pseudo_cost_objective(spec, price, x, x_prev, w_prev) for x in candidates]
    best = min(values)
    cutoff = best + 1e-12 * max(1.0, abs(best))
    return min(x for x, value in zip(candidates, values) if value <= cutoff)
