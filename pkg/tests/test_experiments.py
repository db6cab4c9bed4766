import dataclasses
import json
import os
import pathlib

import pandas as pd
import pytest

import pysasp

from .util import make_instance


def _config(**kwargs: object) -> pysasp.ExperimentConfig:
    defaults: dict = {
        "synthetic": (pysasp.SyntheticTraceSpec(length=120, seed=3),),
        "horizon": 4,
        "beta": 10.0,
        "n_instances": 4,
        "sweep_instances": 3,
        "dus_eval_budget": 20,
        "dus_n_starts": 4,
        "dus_refine_iters": 4,
    }
    defaults.update(kwargs)
    return pysasp.ExperimentConfig(**defaults)


def test_empirical_cr() -> None:
    assert pysasp.empirical_cr(200.0, 100.0) == 2.0
    assert pysasp.empirical_cr(100.0 - 1e-8, 100.0) == 1.0

    with pytest.raises(pysasp.InvalidParameters, match="below the optimal cost"):
        pysasp.empirical_cr(90.0, 100.0)
    with pytest.raises(pysasp.InvalidParameters, match="positive"):
        pysasp.empirical_cr(90.0, 0.0)

    instance = make_instance([300.0, 150.0])
    record = pysasp.threshold_run(instance)
    opt = pysasp.solve_opt(instance.params, instance.prices)
    assert pysasp.empirical_cr(record, opt) == pytest.approx(1.0, abs=1e-6)


def test_aggregate() -> None:
    stats = pysasp.aggregate([1.3, 1.0, 1.1])

    assert stats.mean == pytest.approx(1.1333333333)
    assert stats.p95 == pytest.approx(1.28)
    assert stats.count == 3
    assert stats.samples == (1.0, 1.1, 1.3)
    assert stats.cdf() == [(1.0, 1 / 3), (1.1, 2 / 3), (1.3, 1.0)]

    assert pysasp.aggregate([1.0, 1.1, 1.3], method="higher").p95 == 1.3

    with pytest.raises(pysasp.InvalidParameters):
        pysasp.aggregate([])


def test_config_validation() -> None:
    with pytest.raises(pysasp.ConfigError, match="unknown algorithm"):
        _config(algorithms=("roro", "greedy"))
    with pytest.raises(pysasp.ConfigError, match="at least one algorithm"):
        _config(algorithms=())
    with pytest.raises(pysasp.ConfigError, match="need either xi"):
        _config(algorithms=("uq-advice",))
    with pytest.raises(pysasp.ConfigError, match="one file per trace"):
        _config(traces=("a.csv",), forecasts=("a.csv", "b.csv"))
    with pytest.raises(pysasp.ConfigError, match="xi"):
        _config(xi=1.5)
    with pytest.raises(pysasp.ConfigError, match="trust"):
        _config(trust=-0.5)
    with pytest.raises(pysasp.ConfigError, match="percentile_method"):
        _config(percentile_method="median")
    with pytest.raises(pysasp.ConfigError, match="at least n_starts"):
        _config(dus_eval_budget=2, dus_n_starts=4)
    with pytest.raises(pysasp.ConfigError, match="positive"):
        _config(n_instances=0)


def test_config_round_trip(tmp_path: pathlib.Path) -> None:
    config = _config(algorithms=("roro", "uq-advice"), xi=0.25, band=(50.0, 350.0))
    path = str(tmp_path / "config.json")
    config.dump(path)

    assert pysasp.ExperimentConfig.load(path) == config

    with pytest.raises(pysasp.ConfigError, match="unknown configuration key"):
        pysasp.ExperimentConfig.from_dict({"horizon": 4, "colour": "blue"})
    with pytest.raises(pysasp.ConfigError, match="malformed"):
        pysasp.ExperimentConfig.from_dict({"synthetic": [{"lenght": 5}]})


def test_run_experiment() -> None:
    config = _config(algorithms=("roro", "threshold", "uq-advice", "ro-advice"), xi=0.3)
    result = pysasp.run_experiment(config)

    assert not result.failures
    assert len(result.rows) == 16
    assert result.bound_violations == {}
    assert len(result.instance_seeds) == 4
    assert list(result.stats) == ["roro", "threshold", "uq-advice", "ro-advice"]
    for name, stats in result.stats.items():
        assert stats.count == 4
        assert stats.mean >= 1.0
        assert stats.p95 >= 1.0
        assert all(row.cr >= 1.0 for row in result.records(name))

    assert set(result.stats_by_trace) == {
        ("synthetic", name) for name in ("roro", "threshold", "uq-advice", "ro-advice")
    }
    assert all(row.gamma is not None for row in result.records("uq-advice"))
    assert all(row.gamma == 0.5 for row in result.records("ro-advice"))
    assert all(row.gamma is None for row in result.records("roro"))
    assert result.trust_star is None


def test_run_experiment_is_deterministic() -> None:
    config = _config(algorithms=("roro", "uq-advice"), xi=0.3, n_instances=3)
    first = pysasp.run_experiment(config)
    second = pysasp.run_experiment(config, jobs=2)

    assert first.rows == second.rows
    assert first.instance_seeds == second.instance_seeds


def test_exact_advice_is_near_optimal() -> None:
    config = _config(algorithms=("uq-advice", "ro-advice-star"), xi=0.0)
    result = pysasp.run_experiment(config)

    assert result.stats["uq-advice"].mean == pytest.approx(1.0, abs=1e-5)
    assert result.trust_star is not None
    assert 0.0 <= result.trust_star <= 1.0
    assert result.stats["ro-advice-star"].mean == pytest.approx(1.0, abs=1e-5)
    assert all(row.gamma == result.trust_star for row in result.records("ro-advice-star"))


def test_lambda_star_search() -> None:
    config = _config(algorithms=("roro",), xi=0.2)
    trust = pysasp.lambda_star_search(config, grid_step=0.25)

    assert trust in (0.0, 0.25, 0.5, 0.75, 1.0)

    with pytest.raises(pysasp.ConfigError):
        pysasp.lambda_star_search(config, grid_step=0.0)


def test_trace_files(tmp_path: pathlib.Path) -> None:
    trace = pysasp.synthetic_trace("grid", 30, 60.0, 300.0, seed=5)
    path = tmp_path / "grid.csv"
    pd.DataFrame({"timestamp": trace.timestamps, "value": trace.values}).to_csv(
        path, index=False
    )

    config = pysasp.ExperimentConfig(
        traces=(str(path),), horizon=3, n_instances=5, algorithms=("roro",)
    )
    result = pysasp.run_experiment(config)

    assert {row.trace for row in result.rows} == {"grid"}
    assert result.stats["roro"].count == 5


def test_emit_report(tmp_path: pathlib.Path) -> None:
    config = _config(algorithms=("roro", "threshold"))
    result = pysasp.run_experiment(config)
    out_dir = str(tmp_path / "report")
    paths = pysasp.emit_report(result, out_dir)

    assert sorted(os.path.basename(path) for path in paths) == [
        "cdf_roro.csv",
        "cdf_threshold.csv",
        "manifest.json",
        "records.csv",
        "summary.csv",
        "summary_by_trace.csv",
    ]

    summary = pathlib.Path(out_dir, "summary.csv").read_text(encoding="utf8").splitlines()
    assert summary[0] == "algorithm,mean,p95,count"
    assert summary[1].startswith("roro,")
    assert len(summary) == 3

    cdf = pathlib.Path(out_dir, "cdf_roro.csv").read_text(encoding="utf8").splitlines()
    assert cdf[0] == "value,cumulative_fraction"
    assert cdf[-1].endswith(",1.000000")
    assert len(cdf) == 5

    records = pd.read_csv(os.path.join(out_dir, "records.csv"))
    assert list(records.columns) == [
        "index",
        "trace",
        "algorithm",
        "cost",
        "opt_cost",
        "cr",
        "gamma",
        "dus",
    ]
    assert len(records) == 8

    manifest = json.loads(pathlib.Path(out_dir, "manifest.json").read_text(encoding="utf8"))
    assert manifest["kind"] == "experiment"
    assert manifest["package_version"] == pysasp.__version__
    assert manifest["master_seed"] == 0
    assert len(manifest["instance_seeds"]) == 4
    assert manifest["failures"] == []


def test_replay_is_byte_identical(tmp_path: pathlib.Path) -> None:
    config = _config(algorithms=("roro", "uq-advice"), xi=0.3, n_instances=3)
    first = tmp_path / "first"
    second = tmp_path / "second"
    paths = pysasp.emit_report(pysasp.run_experiment(config), str(first))

    replayed = pysasp.replay_manifest(str(first / "manifest.json"), str(second))

    assert sorted(os.path.basename(p) for p in replayed) == sorted(
        os.path.basename(p) for p in paths
    )
    for path in paths:
        name = os.path.basename(path)
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_replay_errors(tmp_path: pathlib.Path) -> None:
    path = tmp_path / "manifest.json"
    path.write_text('{"manifest_version": 7}\n', encoding="utf8")

    with pytest.raises(pysasp.ConfigError, match="not a pysasp manifest"):
        pysasp.replay_manifest(str(path), str(tmp_path / "out"))


def test_sweep(tmp_path: pathlib.Path) -> None:
    config = _config(algorithms=("roro",))
    # beta must stay below half the price spread
    result = pysasp.sweep(config, "beta", [5.0, 1e6])

    assert result.parameter == "beta"
    assert [value for value, _ in result.results] == [5.0]
    assert [value for value, _ in result.skipped] == [1e6]
    assert result.results[0][1].stats["roro"].count == 3

    table = result.table()
    assert len(table) == 1
    assert table[0][:2] == (5.0, "roro")

    paths = pysasp.emit_report(result, str(tmp_path))
    assert sorted(os.path.basename(path) for path in paths) == ["manifest.json", "sweep_beta.csv"]
    lines = (tmp_path / "sweep_beta.csv").read_text(encoding="utf8").splitlines()
    assert lines[0] == "param_value,algorithm,mean_cr"
    assert lines[1].startswith("5.000000,roro,")

    manifest = json.loads((tmp_path / "manifest.json").read_text(encoding="utf8"))
    assert manifest["kind"] == "sweep"
    assert manifest["values"] == [5.0, 1e6]
    assert len(manifest["skipped"]) == 1


def test_sweep_horizon_and_trace() -> None:
    config = _config(
        algorithms=("roro",),
        synthetic=(
            pysasp.SyntheticTraceSpec(name="a", length=60, seed=1),
            pysasp.SyntheticTraceSpec(name="b", length=60, seed=2),
        ),
    )

    by_horizon = pysasp.sweep(config, "T", [2, 3])
    assert by_horizon.parameter == "horizon"
    assert [value for value, _ in by_horizon.results] == [2, 3]

    by_trace = pysasp.sweep(config, "trace", ["b"])
    rows = by_trace.results[0][1].rows
    assert {row.trace for row in rows} == {"b"}

    with pytest.raises(pysasp.ConfigError, match="cannot sweep"):
        pysasp.sweep(config, "lambda_reg", [1.0])


def test_sweep_all_skipped(tmp_path: pathlib.Path) -> None:
    result = pysasp.sweep(_config(algorithms=("roro",)), "xi", [2.0])

    assert not result.results
    with pytest.raises(pysasp.InvalidParameters):
        pysasp.emit_report(result, str(tmp_path))


def test_config_replace_keeps_validation() -> None:
    config = _config()
    with pytest.raises(pysasp.ConfigError):
        dataclasses.replace(config, algorithms=("nope",))


def test_xi_sweep_shape() -> None:
    config = _config(
        algorithms=("roro", "ro-advice", "uq-advice"),
        xi=0.5,
        sweep_instances=20,
        dus_eval_budget=40,
        dus_n_starts=8,
    )
    result = pysasp.sweep(config, "xi", [0.0, 0.9, 1.0])
    stats = {value: run.stats for value, run in result.results}

    assert stats[0.0]["uq-advice"].mean <= 1.001
    # Wide boxes: UQ-Advice falls back to RORO and beats half trust in a misleading forecast
    assert stats[0.9]["uq-advice"].mean <= 1.02 * stats[0.9]["ro-advice"].mean
    assert stats[1.0]["uq-advice"].mean <= 1.05 * stats[1.0]["roro"].mean
    for _, run in result.results:
        assert run.bound_violations == {}
