import dataclasses
import logging
import math
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ._core import Instance, ProblemParams, UqForecast
from ._dus import DusConfig, dus_solve
from ._errors import DataFormatError, DimensionMismatch, InvalidParameters
from ._offline import SolverOptions
from ._util import as_vector, check_schema_version, is_finite_number, load_json, substream

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Row i of a DataFrame read from CSV sits on this line of the file (the header is line 1)
_LINE_OFFSET = 2


@dataclasses.dataclass(frozen=True, eq=False)
class Trace:
    name: str
    timestamps: Tuple[str, ...]
    values: np.ndarray
    units: str = ""

    def __post_init__(self) -> None:
        values = as_vector(self.values, "values", len(self.timestamps))
        if values.shape[0] == 0:
            raise InvalidParameters(f"trace {self.name!r} is empty")
        if not np.all(np.isfinite(values)):
            raise InvalidParameters(f"trace {self.name!r} contains non-finite values")

        bad = _non_increasing(self.timestamps)
        if bad:
            raise InvalidParameters(
                f"trace {self.name!r} timestamps are not strictly increasing "
                f"(first at row {bad[0] + 1})"
            )

        object.__setattr__(self, "timestamps", tuple(str(ts) for ts in self.timestamps))
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.shape[0])


@dataclasses.dataclass(frozen=True, eq=False)
class ForecastSeries:
    timestamps: Tuple[str, ...]
    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    coverage_delta: float = 0.0
    source: str = "<forecast>"

    def __post_init__(self) -> None:
        n = len(self.timestamps)
        # UqForecast does the ordering and finiteness checks
        checked = UqForecast(
            point=as_vector(self.point, "point", n),
            lower=as_vector(self.lower, "lower", n),
            upper=as_vector(self.upper, "upper", n),
            coverage_delta=self.coverage_delta,
        )
        object.__setattr__(self, "timestamps", tuple(str(ts) for ts in self.timestamps))
        object.__setattr__(self, "point", checked.point)
        object.__setattr__(self, "lower", checked.lower)
        object.__setattr__(self, "upper", checked.upper)

    def __len__(self) -> int:
        return len(self.timestamps)


@dataclasses.dataclass(frozen=True)
class SynthUqConfig:
    # Box width as a fraction of the half band
    xi: float
    seed: int = 0
    coverage_delta: float = 0.0

    def __post_init__(self) -> None:
        if not (is_finite_number(self.xi) and 0 <= self.xi <= 1):
            raise InvalidParameters(f"xi must lie in [0, 1] (got {self.xi})")
        if not (is_finite_number(self.coverage_delta) and 0 <= self.coverage_delta <= 1):
            raise InvalidParameters(
                f"coverage_delta must lie in [0, 1] (got {self.coverage_delta})"
            )


def _parse_timestamps(raw: Sequence[str]) -> pd.Series:
    return pd.to_datetime(pd.Series(list(raw), dtype=object), errors="coerce", utc=True)


def _non_increasing(timestamps: Sequence[str]) -> List[int]:
    """Row indices whose timestamp does not come strictly after the previous row's."""
    if len(timestamps) < 2:
        return []
    parsed = _parse_timestamps(timestamps)
    if parsed.isna().any():
        return [int(i) for i in np.flatnonzero(parsed.isna().to_numpy())]
    deltas = parsed.diff().iloc[1:]
    return [int(i) + 1 for i in np.flatnonzero((deltas <= pd.Timedelta(0)).to_numpy())]


def _read_csv(path: str, required: Sequence[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError as ex:
        raise DataFormatError(path, "file does not exist") from ex
    except pd.errors.EmptyDataError as ex:
        raise DataFormatError(path, "file is empty (a header row is required)") from ex
    except pd.errors.ParserError as ex:
        raise DataFormatError(path, f"malformed CSV ({ex})") from ex

    frame.columns = [str(col).strip() for col in frame.columns]
    missing = [col for col in required if col not in frame.columns]
    if missing:
        raise DataFormatError(path, f"missing column(s): {', '.join(missing)}")
    return frame


def _numeric_column(
    path: str, frame: pd.DataFrame, column: str, strict: bool
) -> Tuple[pd.Series, List[int]]:
    values = pd.to_numeric(frame[column].str.strip(), errors="coerce")
    bad = ~np.isfinite(values.to_numpy(dtype=np.float64))
    lines = [int(i) + _LINE_OFFSET for i in np.flatnonzero(bad)]
    if lines and strict:
        raise DataFormatError(path, f"unparseable or non-finite {column!r} values", lines)
    return values, lines


def _check_timestamps(path: str, frame: pd.DataFrame, column: str) -> None:
    bad = _non_increasing(list(frame[column]))
    if bad:
        raise DataFormatError(
            path,
            "timestamps must be valid and strictly increasing (duplicates are not allowed)",
            [int(frame.index[i]) + _LINE_OFFSET for i in bad],
        )


def load_trace_csv(
    path: str,
    value_column: str = "value",
    *,
    timestamp_column: str = "timestamp",
    strict: bool = True,
    name: Optional[str] = None,
    units: str = "",
) -> Trace:
    """Load a ``timestamp,value`` trace.

    With ``strict=False``, rows whose value cannot be parsed are dropped (and logged) instead of
    rejected. Timestamp ordering problems are always errors."""
    frame = _read_csv(path, [timestamp_column, value_column])
    values, bad_lines = _numeric_column(path, frame, value_column, strict)
    if bad_lines:
        logger.warning("%s: dropping %d unparseable row(s): %s", path, len(bad_lines), bad_lines)
        keep = np.isfinite(values.to_numpy(dtype=np.float64))
        frame = frame[keep]
        values = values[keep]

    if frame.empty:
        raise DataFormatError(path, "trace is empty")

    _check_timestamps(path, frame, timestamp_column)

    return Trace(
        name=name or os.path.splitext(os.path.basename(path))[0],
        timestamps=tuple(frame[timestamp_column].str.strip()),
        values=values.to_numpy(dtype=np.float64),
        units=units,
    )


def load_forecast_csv(path: str) -> ForecastSeries:
    """Load a ``timestamp,point,lower,upper[,delta]`` forecast file."""
    frame = _read_csv(path, ["timestamp", "point", "lower", "upper"])
    if frame.empty:
        raise DataFormatError(path, "forecast is empty")

    columns = {
        col: _numeric_column(path, frame, col, True)[0] for col in ("point", "lower", "upper")
    }
    point = columns["point"].to_numpy(dtype=np.float64)
    lower = columns["lower"].to_numpy(dtype=np.float64)
    upper = columns["upper"].to_numpy(dtype=np.float64)

    misordered = np.flatnonzero((lower > point) | (point > upper))
    if misordered.size:
        raise DataFormatError(
            path,
            "rows violate lower <= point <= upper",
            [int(i) + _LINE_OFFSET for i in misordered],
        )

    delta = 0.0
    if "delta" in frame.columns:
        deltas = _numeric_column(path, frame, "delta", True)[0].to_numpy(dtype=np.float64)
        if not np.all(deltas == deltas[0]) or not 0 <= deltas[0] <= 1:
            raise DataFormatError(path, "delta must be a single value in [0, 1]")
        delta = float(deltas[0])

    _check_timestamps(path, frame, "timestamp")

    return ForecastSeries(
        timestamps=tuple(frame["timestamp"].str.strip()),
        point=point,
        lower=lower,
        upper=upper,
        coverage_delta=delta,
        source=path,
    )


def clamp_prices(trace: Trace, floor: float = 1.0) -> Tuple[Trace, int]:
    """Raise every value below ``floor`` to ``floor``; returns the new trace and how many values
    changed. The input trace is left untouched."""
    if not (is_finite_number(floor) and floor > 0):
        raise InvalidParameters(f"clamp floor must be positive (got {floor})")

    count = int(np.count_nonzero(trace.values < floor))
    if count:
        logger.warning("Clamped %d value(s) of trace %r up to %g", count, trace.name, floor)
    return dataclasses.replace(trace, values=np.maximum(trace.values, floor)), count


def estimate_band(trace: Trace) -> Tuple[float, float]:
    return float(trace.values.min()), float(trace.values.max())


def make_instances(  # pylint: disable=too-many-arguments
    trace: Trace,
    horizon: int,
    stride: int = 1,
    *,
    beta: float = 0.0,
    lambda_reg: float = 0.0,
    rate_limits: Optional[Sequence[float]] = None,
    band: Optional[Tuple[float, float]] = None,
    n_samples: Optional[int] = None,
    seed: int = 0,
) -> List[Instance]:
    """Cut the trace into length-``horizon`` windows.

    Windows start every ``stride`` steps, or at ``n_samples`` uniformly drawn starts when
    ``n_samples`` is given. Every window shares the trace band (or ``band``, with values clipped
    into it)."""
    if len(trace) < horizon:
        raise InvalidParameters(
            f"trace {trace.name!r} has {len(trace)} values, fewer than the horizon {horizon}"
        )
    if stride < 1:
        raise InvalidParameters(f"stride must be positive (got {stride})")

    values = trace.values
    if band is None:
        p_min, p_max = estimate_band(trace)
    else:
        p_min, p_max = band
        values = np.clip(values, p_min, p_max)

    params = ProblemParams(
        p_min=p_min,
        p_max=p_max,
        horizon=horizon,
        beta=beta,
        lambda_reg=lambda_reg,
        rate_limits=None if rate_limits is None else tuple(rate_limits),
    )

    last_start = len(trace) - horizon
    if n_samples is None:
        starts: Sequence[int] = range(0, last_start + 1, stride)
    else:
        if n_samples < 1:
            raise InvalidParameters(f"n_samples must be positive (got {n_samples})")
        starts = substream(seed, 2).integers(0, last_start + 1, size=n_samples).tolist()

    return [
        Instance(
            params=params,
            prices=values[start : start + horizon],
            start=int(start),
            source=trace.name,
            timestamps=trace.timestamps[start : start + horizon],
        )
        for start in starts
    ]


def synth_uq(
    instance: Instance,
    config: SynthUqConfig,
    dus_config: Optional[DusConfig] = None,
    *,
    solver_options: Optional[SolverOptions] = None,
) -> UqForecast:
    """Build a box of width ``xi * (p_max - p_min) / 2`` around the true prices, at a random
    offset, and take the box's decision-worst scenario as the point forecast."""
    params = instance.params
    prices = instance.prices
    width = config.xi * params.spread / 2
    if width == 0:
        return dataclasses.replace(
            UqForecast.exact(prices), coverage_delta=config.coverage_delta
        )

    offsets = substream(config.seed).random(params.horizon)
    lower = np.maximum(params.p_min, prices - offsets * width)
    upper = np.minimum(params.p_max, lower + width)
    box = UqForecast(point=prices, lower=lower, upper=upper, coverage_delta=config.coverage_delta)

    worst = dus_solve(params, box, dus_config, center=prices, solver_options=solver_options)
    return UqForecast(
        point=np.clip(worst.worst_scenario, lower, upper),
        lower=lower,
        upper=upper,
        coverage_delta=config.coverage_delta,
    )


def synthetic_trace(  # pylint: disable=too-many-arguments
    name: str,
    length: int,
    p_min: float,
    p_max: float,
    seed: int = 0,
    *,
    steps_per_day: int = 24,
    noise: float = 0.15,
    start: str = "2024-01-01T00:00:00",
) -> Trace:
    """A seeded daily sinusoid plus Gaussian noise, clipped to ``[p_min, p_max]``."""
    if length < 1 or steps_per_day < 1:
        raise InvalidParameters("length and steps_per_day must be positive")
    if not 0 < p_min <= p_max:
        raise InvalidParameters(f"need 0 < p_min <= p_max (got {p_min}, {p_max})")

    steps = np.arange(length)
    middle = (p_min + p_max) / 2
    amplitude = (p_max - p_min) / 2
    rng = substream(seed, 3)
    values = (
        middle
        + 0.8 * amplitude * np.sin(2 * math.pi * steps / steps_per_day)
        + noise * amplitude * rng.standard_normal(length)
    )

    index = pd.date_range(start, periods=length, freq=pd.Timedelta(days=1) / steps_per_day)
    return Trace(
        name=name,
        timestamps=tuple(ts.isoformat() for ts in index),
        values=np.clip(values, p_min, p_max),
    )


def forecast_for_window(
    series: ForecastSeries, timestamps: Sequence[str], params: ProblemParams
) -> UqForecast:
    """The slice of ``series`` at exactly ``timestamps``, clipped to the band of ``params``."""
    if len(timestamps) != params.horizon:
        raise DimensionMismatch("timestamps", params.horizon, len(timestamps))

    positions = {ts: i for i, ts in enumerate(series.timestamps)}
    missing = [ts for ts in timestamps if ts not in positions]
    if missing:
        raise DataFormatError(
            series.source, f"no forecast for timestamp(s) {', '.join(missing[:5])}"
        )

    rows = [positions[ts] for ts in timestamps]
    return UqForecast(
        point=series.point[rows],
        lower=series.lower[rows],
        upper=series.upper[rows],
        coverage_delta=series.coverage_delta,
    ).clip_to(params)


def params_to_dict(params: ProblemParams) -> Dict[str, Any]:
    return {
        "p_min": params.p_min,
        "p_max": params.p_max,
        "horizon": params.horizon,
        "beta": params.beta,
        "lambda_reg": params.lambda_reg,
        "rate_limits": list(params.rate_limits or ()),
    }


def params_from_dict(data: Dict[str, Any]) -> ProblemParams:
    return ProblemParams(
        p_min=data["p_min"],
        p_max=data["p_max"],
        horizon=data["horizon"],
        beta=data.get("beta", 0.0),
        lambda_reg=data.get("lambda_reg", 0.0),
        rate_limits=tuple(data["rate_limits"]) if data.get("rate_limits") else None,
    )


def instance_to_dict(instance: Instance) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "params": params_to_dict(instance.params),
        "prices": instance.prices.tolist(),
        "start": instance.start,
        "source": instance.source,
        "timestamps": None if instance.timestamps is None else list(instance.timestamps),
    }


def instance_from_dict(data: Dict[str, Any], path: str = "<instance>") -> Instance:
    check_schema_version(data, path, SCHEMA_VERSION)
    try:
        timestamps = data.get("timestamps")
        return Instance(
            params=params_from_dict(data["params"]),
            prices=np.array(data["prices"], dtype=np.float64),
            start=int(data.get("start", 0)),
            source=str(data.get("source", "")),
            timestamps=None if timestamps is None else tuple(timestamps),
        )
    except KeyError as ex:
        raise DataFormatError(path, f"missing field {ex.args[0]!r}") from ex
    except (TypeError, ValueError) as ex:
        raise DataFormatError(path, f"malformed instance ({ex})") from ex


def forecast_to_dict(forecast: UqForecast) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "point": forecast.point.tolist(),
        "lower": forecast.lower.tolist(),
        "upper": forecast.upper.tolist(),
        "coverage_delta": forecast.coverage_delta,
    }


def forecast_from_dict(data: Dict[str, Any], path: str = "<forecast>") -> UqForecast:
    check_schema_version(data, path, SCHEMA_VERSION)
    try:
        return UqForecast(
            point=np.array(data["point"], dtype=np.float64),
            lower=np.array(data["lower"], dtype=np.float64),
            upper=np.array(data["upper"], dtype=np.float64),
            coverage_delta=float(data.get("coverage_delta", 0.0)),
        )
    except KeyError as ex:
        raise DataFormatError(path, f"missing field {ex.args[0]!r}") from ex
    except (TypeError, ValueError) as ex:
        raise DataFormatError(path, f"malformed forecast ({ex})") from ex


def load_instance_json(path: str) -> Instance:
    return instance_from_dict(load_json(path), path)


def load_forecast_json(path: str) -> UqForecast:
    return forecast_from_dict(load_json(path), path)
