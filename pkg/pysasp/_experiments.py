import concurrent.futures
import dataclasses
import logging
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ._core import Instance, UqForecast
from ._data import (
    ForecastSeries,
    SynthUqConfig,
    Trace,
    clamp_prices,
    forecast_for_window,
    load_forecast_csv,
    load_trace_csv,
    make_instances,
    synth_uq,
    synthetic_trace,
)
from ._dus import DusConfig, dus_solve
from ._errors import ConfigError, Error, InvalidParameters
from ._offline import SolveReport, opt_deterministic_tiebreak, solve_opt
from ._online import (
    ALGORITHM_RO_ADVICE,
    ALGORITHM_RORO,
    ALGORITHM_THRESHOLD,
    ALGORITHM_UQ_ADVICE,
    RunRecord,
    _advice_run,
    check_run_bounds,
    ro_advice_run,
    roro_run,
    threshold_run,
    uq_advice_run,
)
from ._util import derive_seed, dump_json, load_json, to_jsonable

logger = logging.getLogger(__name__)

ALGORITHM_RO_ADVICE_STAR = "ro-advice-star"

ALGORITHMS = (
    ALGORITHM_RORO,
    ALGORITHM_THRESHOLD,
    ALGORITHM_RO_ADVICE,
    ALGORITHM_RO_ADVICE_STAR,
    ALGORITHM_UQ_ADVICE,
)
ADVICE_ALGORITHMS = frozenset(
    {ALGORITHM_RO_ADVICE, ALGORITHM_RO_ADVICE_STAR, ALGORITHM_UQ_ADVICE}
)

SWEEP_PARAMETERS = ("xi", "horizon", "beta", "trace")

PERCENTILE_METHODS = ("linear", "lower", "higher", "nearest", "midpoint")

# Empirical ratios down to this far below 1 are numerical noise and are reported as 1
CR_SLACK = 1e-6

MANIFEST_VERSION = 1


@dataclasses.dataclass(frozen=True)
class SyntheticTraceSpec:
    name: str = "synthetic"
    length: int = 2000
    p_min: float = 50.0
    p_max: float = 350.0
    seed: int = 0


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:  # pylint: disable=too-many-instance-attributes
    traces: Tuple[str, ...] = ()
    # One forecast CSV per entry of ``traces``; used instead of synthetic forecasts
    forecasts: Tuple[str, ...] = ()
    # Used alone when neither traces nor synthetic specs are given: one default synthetic trace
    synthetic: Tuple[SyntheticTraceSpec, ...] = ()
    value_column: str = "value"
    horizon: int = 8
    beta: float = 20.0
    lambda_reg: float = 0.0
    n_instances: int = 1000
    sweep_instances: int = 200
    xi: Optional[float] = None
    algorithms: Tuple[str, ...] = (ALGORITHM_RORO, ALGORITHM_THRESHOLD)
    trust: float = 0.5
    trust_grid_step: float = 0.05
    master_seed: int = 0
    percentile_method: str = "linear"
    clamp_floor: float = 1.0
    band: Optional[Tuple[float, float]] = None
    dus_eval_budget: int = 500
    dus_n_starts: int = 16
    dus_refine_iters: int = 8
    dus_score_inflation: float = 1.0

    def __post_init__(self) -> None:
        unknown = [name for name in self.algorithms if name not in ALGORITHMS]
        if unknown:
            raise ConfigError(
                f"unknown algorithm(s) {', '.join(unknown)}; choose from {', '.join(ALGORITHMS)}",
                algorithms=unknown,
            )
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        if self.forecasts and len(self.forecasts) != len(self.traces):
            raise ConfigError("forecasts must list exactly one file per trace")
        if ADVICE_ALGORITHMS.intersection(self.algorithms):
            if self.xi is None and not self.forecasts:
                raise ConfigError("advice algorithms need either xi or forecast files")
            if self.forecasts and self.synthetic:
                raise ConfigError("forecast files cannot be combined with synthetic traces")
        if self.xi is not None and not 0 <= self.xi <= 1:
            raise ConfigError(f"xi must lie in [0, 1] (got {self.xi})", xi=self.xi)
        if not 0 <= self.trust <= 1:
            raise ConfigError(f"trust must lie in [0, 1] (got {self.trust})", trust=self.trust)
        if not 0 < self.trust_grid_step <= 1:
            raise ConfigError(f"trust_grid_step must lie in (0, 1] (got {self.trust_grid_step})")
        if self.n_instances < 1 or self.sweep_instances < 1 or self.horizon < 1:
            raise ConfigError("n_instances, sweep_instances and horizon must be positive")
        if self.percentile_method not in PERCENTILE_METHODS:
            raise ConfigError(f"unknown percentile_method {self.percentile_method!r}")
        if not self.clamp_floor > 0:
            raise ConfigError(f"clamp_floor must be positive (got {self.clamp_floor})")
        self.dus_config(0)

    def dus_config(self, seed: int) -> DusConfig:
        try:
            return DusConfig(
                eval_budget=self.dus_eval_budget,
                n_starts=self.dus_n_starts,
                refine_iters=self.dus_refine_iters,
                seed=seed,
                score_inflation=self.dus_score_inflation,
            )
        except InvalidParameters as ex:
            raise ConfigError(ex.message) from ex

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable(self)  # type: ignore

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        names = {field.name for field in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown configuration key(s): {', '.join(unknown)}")

        values = dict(data)
        try:
            for key in ("traces", "forecasts", "algorithms"):
                if key in values:
                    values[key] = tuple(values[key])
            if "synthetic" in values:
                values["synthetic"] = tuple(
                    SyntheticTraceSpec(**spec) for spec in values["synthetic"]
                )
            if values.get("band") is not None:
                low, high = values["band"]
                values["band"] = (float(low), float(high))
            return cls(**values)
        except (TypeError, ValueError) as ex:
            raise ConfigError(f"malformed configuration ({ex})") from ex

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        return cls.from_dict(load_json(path))

    def dump(self, path: str) -> None:
        dump_json(self.to_dict(), path)


@dataclasses.dataclass(frozen=True)
class AggregateStats:
    mean: float
    p95: float
    count: int
    # Sorted ascending
    samples: Tuple[float, ...]

    def cdf(self) -> List[Tuple[float, float]]:
        n = len(self.samples)
        return [(value, (i + 1) / n) for i, value in enumerate(self.samples)]


@dataclasses.dataclass(frozen=True)
class RecordRow:  # pylint: disable=too-many-instance-attributes
    index: int
    trace: str
    algorithm: str
    cost: float
    opt_cost: float
    cr: float
    gamma: Optional[float]
    dus: Optional[float]


@dataclasses.dataclass(frozen=True, eq=False)
class ExperimentResult:  # pylint: disable=too-many-instance-attributes
    config: ExperimentConfig
    rows: Tuple[RecordRow, ...]
    stats: Dict[str, AggregateStats]
    stats_by_trace: Dict[Tuple[str, str], AggregateStats]
    failures: Tuple[Tuple[int, str], ...]
    bound_violations: Dict[str, int]
    instance_seeds: Tuple[int, ...]
    trust_star: Optional[float] = None

    def records(self, algorithm: str) -> List[RecordRow]:
        return [row for row in self.rows if row.algorithm == algorithm]


@dataclasses.dataclass(frozen=True, eq=False)
class SweepResult:
    config: ExperimentConfig
    parameter: str
    values: Tuple[Any, ...]
    results: Tuple[Tuple[Any, ExperimentResult], ...]
    skipped: Tuple[Tuple[Any, str], ...]

    def table(self) -> List[Tuple[Any, str, float, float, int]]:
        """Long-form rows ``(param_value, algorithm, mean_cr, p95_cr, count)``."""
        return [
            (value, algorithm, stats.mean, stats.p95, stats.count)
            for value, result in self.results
            for algorithm, stats in result.stats.items()
        ]


def _total(item: Union[RunRecord, SolveReport, float]) -> float:
    if isinstance(item, (RunRecord, SolveReport)):
        return item.cost.total
    return float(item)


def empirical_cr(
    run: Union[RunRecord, float], opt: Union[SolveReport, float]
) -> float:
    """``Cost(ALG) / Cost(OPT)``, with sub-1 values within numerical slack reported as 1."""
    alg_cost = _total(run)
    opt_cost = _total(opt)
    if not opt_cost > 0:
        raise InvalidParameters(f"optimal cost must be positive (got {opt_cost})")

    ratio = alg_cost / opt_cost
    if ratio < 1 - CR_SLACK:
        raise InvalidParameters(
            f"online cost {alg_cost!r} is below the optimal cost {opt_cost!r}"
        )
    return max(ratio, 1.0)


def aggregate(crs: Iterable[float], method: str = "linear") -> AggregateStats:
    """Mean and 95th percentile; the percentile interpolates between closest ranks by default."""
    values = np.sort(np.asarray(list(crs), dtype=np.float64))
    if values.size == 0:
        raise InvalidParameters("cannot aggregate an empty set of ratios")

    return AggregateStats(
        mean=float(values.mean()),
        p95=float(np.percentile(values, 95, method=method)),  # type: ignore
        count=int(values.size),
        samples=tuple(values.tolist()),
    )


@dataclasses.dataclass(frozen=True, eq=False)
class _Task:
    index: int
    seed: int
    instance: Instance
    forecast: Optional[UqForecast]
    config: ExperimentConfig


@dataclasses.dataclass(frozen=True, eq=False)
class _Outcome:  # pylint: disable=too-many-instance-attributes
    index: int
    trace: str
    instance: Instance
    opt_cost: float = float("nan")
    records: Tuple[RunRecord, ...] = ()
    advice: Optional[np.ndarray] = None
    failure: Optional[str] = None
    violations: Tuple[str, ...] = ()


def _load_traces(config: ExperimentConfig) -> List[Tuple[Trace, Optional[ForecastSeries]]]:
    traces: List[Tuple[Trace, Optional[ForecastSeries]]] = []
    for i, path in enumerate(config.traces):
        trace, _ = clamp_prices(load_trace_csv(path, config.value_column), config.clamp_floor)
        series = load_forecast_csv(config.forecasts[i]) if config.forecasts else None
        traces.append((trace, series))

    specs = config.synthetic or (() if config.traces else (SyntheticTraceSpec(),))
    for spec in specs:
        trace = synthetic_trace(spec.name, spec.length, spec.p_min, spec.p_max, spec.seed)
        traces.append((trace, None))

    return traces


def _build_tasks(config: ExperimentConfig) -> List[_Task]:
    traces = _load_traces(config)
    base, extra = divmod(config.n_instances, len(traces))

    tasks: List[_Task] = []
    for k, (trace, series) in enumerate(traces):
        count = base + (1 if k < extra else 0)
        if count == 0:
            continue
        instances = make_instances(
            trace,
            config.horizon,
            beta=config.beta,
            lambda_reg=config.lambda_reg,
            band=config.band,
            n_samples=count,
            seed=derive_seed(config.master_seed, 1, k),
        )
        for instance in instances:
            index = len(tasks)
            forecast = None
            if series is not None:
                assert instance.timestamps is not None
                forecast = forecast_for_window(series, instance.timestamps, instance.params)
            tasks.append(
                _Task(
                    index=index,
                    seed=derive_seed(config.master_seed, 0, index),
                    instance=instance,
                    forecast=forecast,
                    config=config,
                )
            )

    logger.info("Built %d instances from %d trace(s)", len(tasks), len(traces))
    return tasks


def _evaluate(task: _Task) -> _Outcome:
    """Run every single-pass algorithm on one instance. Failures are captured, not raised."""
    config = task.config
    instance = task.instance
    params = instance.params
    try:
        opt = solve_opt(params, instance.prices)
        opt_cost = opt.cost.total

        forecast = task.forecast
        needs_advice = ADVICE_ALGORITHMS.intersection(config.algorithms)
        if needs_advice and forecast is None:
            assert config.xi is not None
            forecast = synth_uq(
                instance,
                SynthUqConfig(xi=config.xi, seed=task.seed),
                config.dus_config(derive_seed(task.seed, 1)),
            )

        records: List[RunRecord] = []
        violations: List[str] = []
        advice = None
        for name in config.algorithms:
            if name == ALGORITHM_RORO:
                record = roro_run(instance)
            elif name == ALGORITHM_THRESHOLD:
                record = threshold_run(instance)
            elif name == ALGORITHM_RO_ADVICE:
                assert forecast is not None
                record = ro_advice_run(instance, forecast.point, config.trust)
            elif name == ALGORITHM_UQ_ADVICE:
                assert forecast is not None
                dus = dus_solve(params, forecast, config.dus_config(derive_seed(task.seed, 2)))
                record = uq_advice_run(instance, forecast, dus_result=dus)
            else:
                assert forecast is not None
                advice = opt_deterministic_tiebreak(params, forecast.point).decisions
                continue

            record = dataclasses.replace(record, empirical_cr=empirical_cr(record, opt_cost))
            records.append(record)
            violations.extend(
                check.name
                for check in check_run_bounds(instance, record, opt_cost, forecast=forecast)
                if not check.holds
            )
    except Error as ex:
        logger.warning("Instance %d failed: %s", task.index, ex)
        return _Outcome(index=task.index, trace=instance.source, instance=instance, failure=str(ex))

    for name in violations:
        logger.warning("Instance %d violates the %s bound", task.index, name)

    return _Outcome(
        index=task.index,
        trace=instance.source,
        instance=instance,
        opt_cost=opt_cost,
        records=tuple(records),
        advice=advice,
        violations=tuple(violations),
    )


def _evaluate_all(tasks: Sequence[_Task], jobs: int) -> List[_Outcome]:
    if jobs <= 1 or len(tasks) <= 1:
        outcomes = [_evaluate(task) for task in tasks]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as executor:
            chunksize = max(1, len(tasks) // (4 * jobs))
            outcomes = list(executor.map(_evaluate, tasks, chunksize=chunksize))

    outcomes.sort(key=lambda outcome: outcome.index)
    return outcomes


def _trust_grid(grid_step: float) -> List[float]:
    count = int(np.floor(1.0 / grid_step + 1e-9))
    grid = [round(i * grid_step, 12) for i in range(count + 1)]
    if grid[-1] < 1.0:
        grid.append(1.0)
    return grid


def _search_trust(
    outcomes: Sequence[_Outcome], grid_step: float
) -> Tuple[float, Dict[int, RunRecord]]:
    """Pick the trust level with the lowest mean ratio over the instances (smallest on ties)."""
    usable = [outcome for outcome in outcomes if outcome.advice is not None]
    best_trust = 0.0
    best_mean = float("inf")
    best_runs: Dict[int, RunRecord] = {}

    for trust in _trust_grid(grid_step):
        runs: Dict[int, RunRecord] = {}
        for outcome in usable:
            assert outcome.advice is not None
            record = _advice_run(outcome.instance, outcome.advice, trust, ALGORITHM_RO_ADVICE_STAR)
            runs[outcome.index] = dataclasses.replace(
                record, empirical_cr=empirical_cr(record, outcome.opt_cost)
            )
        mean = float(np.mean([run.empirical_cr for run in runs.values()])) if runs else 1.0
        logger.debug("Trust %.2f: mean ratio %.6f", trust, mean)
        if mean < best_mean - 1e-12:
            best_trust, best_mean, best_runs = trust, mean, runs

    return best_trust, best_runs


def _run(config: ExperimentConfig, jobs: int) -> Tuple[List[_Task], List[_Outcome]]:
    tasks = _build_tasks(config)
    outcomes = _evaluate_all(tasks, jobs)
    return tasks, outcomes


def lambda_star_search(
    config: ExperimentConfig, grid_step: float = 0.05, *, jobs: int = 1
) -> float:
    """The fixed trust level that minimizes RO-Advice's mean ratio on the configured instances."""
    if not 0 < grid_step <= 1:
        raise ConfigError(f"grid_step must lie in (0, 1] (got {grid_step})")
    config = dataclasses.replace(config, algorithms=(ALGORITHM_RO_ADVICE_STAR,))
    _, outcomes = _run(config, jobs)
    return _search_trust(outcomes, grid_step)[0]


def run_experiment(config: ExperimentConfig, *, jobs: int = 1) -> ExperimentResult:
    tasks, outcomes = _run(config, jobs)

    trust_star = None
    star_runs: Dict[int, RunRecord] = {}
    if ALGORITHM_RO_ADVICE_STAR in config.algorithms:
        trust_star, star_runs = _search_trust(outcomes, config.trust_grid_step)
        logger.info("Best fixed trust level: %.2f", trust_star)

    rows: List[RecordRow] = []
    failures: List[Tuple[int, str]] = []
    violations: Dict[str, int] = {}
    for outcome in outcomes:
        if outcome.failure is not None:
            failures.append((outcome.index, outcome.failure))
            continue
        for name in outcome.violations:
            violations[name] = violations.get(name, 0) + 1

        by_name = {record.algorithm_name: record for record in outcome.records}
        if outcome.index in star_runs:
            by_name[ALGORITHM_RO_ADVICE_STAR] = star_runs[outcome.index]
        for name in config.algorithms:
            record = by_name[name]
            assert record.empirical_cr is not None
            rows.append(
                RecordRow(
                    index=outcome.index,
                    trace=outcome.trace,
                    algorithm=name,
                    cost=record.cost.total,
                    opt_cost=outcome.opt_cost,
                    cr=record.empirical_cr,
                    gamma=record.gamma_used,
                    dus=record.dus_used,
                )
            )

    if failures:
        logger.warning("%d of %d instance(s) failed", len(failures), len(outcomes))
    if not rows:
        raise InvalidParameters("every instance failed; nothing to aggregate")

    stats = {
        name: aggregate(
            (row.cr for row in rows if row.algorithm == name), config.percentile_method
        )
        for name in config.algorithms
    }
    stats_by_trace: Dict[Tuple[str, str], AggregateStats] = {}
    for trace in sorted({row.trace for row in rows}):
        for name in config.algorithms:
            crs = [row.cr for row in rows if row.trace == trace and row.algorithm == name]
            stats_by_trace[(trace, name)] = aggregate(crs, config.percentile_method)

    return ExperimentResult(
        config=config,
        rows=tuple(rows),
        stats=stats,
        stats_by_trace=stats_by_trace,
        failures=tuple(failures),
        bound_violations=violations,
        instance_seeds=tuple(task.seed for task in tasks),
        trust_star=trust_star,
    )


def _configure_sweep(config: ExperimentConfig, parameter: str, value: Any) -> ExperimentConfig:
    config = dataclasses.replace(config, n_instances=config.sweep_instances)
    if parameter == "trace":
        named = [spec for spec in config.synthetic if spec.name == value]
        if named:
            return dataclasses.replace(config, traces=(), forecasts=(), synthetic=tuple(named))
        if config.forecasts:
            position = config.traces.index(value) if value in config.traces else -1
            if position < 0:
                raise ConfigError(f"unknown trace {value!r}")
            forecasts: Tuple[str, ...] = (config.forecasts[position],)
        else:
            forecasts = ()
        return dataclasses.replace(
            config, traces=(str(value),), forecasts=forecasts, synthetic=()
        )
    return dataclasses.replace(config, **{parameter: value})


def sweep(
    config: ExperimentConfig, parameter: str, values: Sequence[Any], *, jobs: int = 1
) -> SweepResult:
    """Re-run the experiment for each value of ``parameter``; inadmissible values are skipped."""
    parameter = {"T": "horizon"}.get(parameter, parameter)
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError(
            f"cannot sweep {parameter!r}; choose from {', '.join(SWEEP_PARAMETERS)}"
        )

    results: List[Tuple[Any, ExperimentResult]] = []
    skipped: List[Tuple[Any, str]] = []
    for value in values:
        try:
            sub_config = _configure_sweep(config, parameter, value)
            result = run_experiment(sub_config, jobs=jobs)
        except Error as ex:
            logger.warning("Skipping %s=%r: %s", parameter, value, ex)
            skipped.append((value, str(ex)))
            continue
        logger.info("Finished %s=%r", parameter, value)
        results.append((value, result))

    return SweepResult(
        config=config,
        parameter=parameter,
        values=tuple(values),
        results=tuple(results),
        skipped=tuple(skipped),
    )


def _write_csv(frame: pd.DataFrame, path: str) -> str:
    frame.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
    logger.info("Wrote %s", path)
    return path


def _manifest(config: ExperimentConfig) -> Dict[str, Any]:
    from . import __version__  # pylint: disable=import-outside-toplevel,cyclic-import

    return {
        "manifest_version": MANIFEST_VERSION,
        "package_version": __version__,
        "config": config.to_dict(),
        "master_seed": config.master_seed,
    }


def _emit_experiment(result: ExperimentResult, out_dir: str) -> List[str]:
    config = result.config
    paths = [
        _write_csv(
            pd.DataFrame(
                [(name, s.mean, s.p95, s.count) for name, s in result.stats.items()],
                columns=["algorithm", "mean", "p95", "count"],
            ),
            os.path.join(out_dir, "summary.csv"),
        )
    ]

    for name, stats in result.stats.items():
        paths.append(
            _write_csv(
                pd.DataFrame(stats.cdf(), columns=["value", "cumulative_fraction"]),
                os.path.join(out_dir, f"cdf_{name}.csv"),
            )
        )

    paths.append(
        _write_csv(
            pd.DataFrame(
                [dataclasses.astuple(row) for row in result.rows],
                columns=[field.name for field in dataclasses.fields(RecordRow)],
            ),
            os.path.join(out_dir, "records.csv"),
        )
    )
    paths.append(
        _write_csv(
            pd.DataFrame(
                [
                    (trace, name, s.mean, s.p95, s.count)
                    for (trace, name), s in result.stats_by_trace.items()
                ],
                columns=["trace", "algorithm", "mean", "p95", "count"],
            ),
            os.path.join(out_dir, "summary_by_trace.csv"),
        )
    )

    manifest = _manifest(config)
    manifest.update(
        {
            "kind": "experiment",
            "instance_seeds": list(result.instance_seeds),
            "failures": [{"index": index, "error": error} for index, error in result.failures],
            "bound_violations": dict(sorted(result.bound_violations.items())),
            "trust_star": result.trust_star,
        }
    )
    path = os.path.join(out_dir, "manifest.json")
    dump_json(manifest, path)
    paths.append(path)
    return paths


def _emit_sweep(result: SweepResult, out_dir: str) -> List[str]:
    paths = [
        _write_csv(
            pd.DataFrame(
                [(value, name, mean) for value, name, mean, _, _ in result.table()],
                columns=["param_value", "algorithm", "mean_cr"],
            ),
            os.path.join(out_dir, f"sweep_{result.parameter}.csv"),
        )
    ]

    manifest = _manifest(result.config)
    manifest.update(
        {
            "kind": "sweep",
            "parameter": result.parameter,
            "values": list(result.values),
            "skipped": [{"value": value, "error": error} for value, error in result.skipped],
            "failures": {
                str(value): len(sub.failures) for value, sub in result.results if sub.failures
            },
        }
    )
    path = os.path.join(out_dir, "manifest.json")
    dump_json(manifest, path)
    paths.append(path)
    return paths


def emit_report(result: Union[ExperimentResult, SweepResult], out_dir: str) -> List[str]:
    """Write plot-ready CSV files and a replayable ``manifest.json``; returns the paths written.

    An experiment writes ``summary.csv`` and one ``cdf_<algorithm>.csv`` per algorithm, plus
    ``records.csv`` (one row per instance and algorithm) and ``summary_by_trace.csv``. A sweep
    writes ``sweep_<parameter>.csv``."""
    os.makedirs(out_dir, exist_ok=True)
    if isinstance(result, SweepResult):
        if not result.results:
            raise InvalidParameters("the sweep produced no results")
        return _emit_sweep(result, out_dir)
    return _emit_experiment(result, out_dir)


def replay_manifest(path: str, out_dir: str, *, jobs: int = 1) -> List[str]:
    """Re-run the experiment or sweep recorded in a manifest and emit its reports again."""
    manifest = load_json(path)
    if manifest.get("manifest_version") != MANIFEST_VERSION or "config" not in manifest:
        raise ConfigError(f"{path} is not a pysasp manifest")

    config = ExperimentConfig.from_dict(manifest["config"])
    if manifest.get("kind") == "sweep":
        return emit_report(
            sweep(config, manifest["parameter"], manifest["values"], jobs=jobs), out_dir
        )
    return emit_report(run_experiment(config, jobs=jobs), out_dir)
