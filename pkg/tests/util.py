from typing import Callable, Optional, Sequence, Tuple

import numpy as np

import pysasp

# Price band used by most hand-worked examples
P_MIN = 100.0
P_MAX = 400.0


def make_params(
    horizon: int = 2,
    *,
    p_min: float = P_MIN,
    p_max: float = P_MAX,
    beta: float = 0.0,
    lambda_reg: float = 0.0,
    rate_limits: Optional[Sequence[float]] = None,
) -> pysasp.ProblemParams:
    return pysasp.ProblemParams(
        p_min=p_min,
        p_max=p_max,
        horizon=horizon,
        beta=beta,
        lambda_reg=lambda_reg,
        rate_limits=None if rate_limits is None else tuple(rate_limits),
    )


def make_instance(
    prices: Sequence[float], *, rate_limits: Optional[Sequence[float]] = None, **kwargs: float
) -> pysasp.Instance:
    params = make_params(len(prices), rate_limits=rate_limits, **kwargs)
    return pysasp.Instance(params=params, prices=np.array(prices, dtype=np.float64))


def random_params(
    rng: np.random.Generator,
    horizon: int,
    *,
    lambda_choices: Sequence[float] = (0.0,),
    with_rate_limits: bool = False,
) -> pysasp.ProblemParams:
    p_min = float(rng.uniform(20, 150))
    p_max = p_min * float(rng.uniform(1.5, 8))
    beta = float(rng.uniform(0, 0.45)) * (p_max - p_min)
    lambda_reg = float(rng.choice(lambda_choices))

    rate_limits = None
    if with_rate_limits:
        limits = rng.uniform(0.2, 1.0, size=horizon)
        if limits.sum() < 1.2:
            limits = np.minimum(1.0, limits * 1.2 / limits.sum())
        rate_limits = tuple(float(d) for d in limits)

    return make_params(
        horizon,
        p_min=p_min,
        p_max=p_max,
        beta=beta,
        lambda_reg=lambda_reg,
        rate_limits=rate_limits,
    )


def random_instance(rng: np.random.Generator, params: pysasp.ProblemParams) -> pysasp.Instance:
    prices = rng.uniform(params.p_min, params.p_max, size=params.horizon)
    return pysasp.Instance(params=params, prices=prices)


def random_feasible_schedule(
    rng: np.random.Generator, params: pysasp.ProblemParams
) -> np.ndarray:
    """A random point of the feasible set, built by pouring a Dirichlet draw into the caps."""
    limits = params.limits
    x = rng.dirichlet(np.ones(params.horizon))
    for _ in range(100):
        excess = np.maximum(x - limits, 0.0).sum()
        x = np.minimum(x, limits)
        if excess <= 1e-15:
            break
        slack = limits - x
        x = x + excess * slack / slack.sum()
    return x


def grid_argmin(
    func: Callable[[float], float], low: float, high: float, points: int = 10001
) -> Tuple[float, float]:
    """(argmin, min) of ``func`` over an evenly spaced grid on ``[low, high]``."""
    grid = np.linspace(low, high, points)
    values = np.array([func(float(x)) for x in grid])
    i = int(np.argmin(values))
    return float(grid[i]), float(values[i])
