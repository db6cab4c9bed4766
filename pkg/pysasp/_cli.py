import argparse
import dataclasses
import logging
import os
import sys
from typing import Any, Callable, NoReturn, Optional, Sequence

from ._data import (
    SynthUqConfig,
    forecast_to_dict,
    load_forecast_json,
    load_instance_json,
    synth_uq,
)
from ._dus import DusConfig, dus_solve
from ._errors import Error, SolverFailure
from ._experiments import (
    ExperimentConfig,
    ExperimentResult,
    emit_report,
    empirical_cr,
    replay_manifest,
    run_experiment,
    sweep,
)
from ._offline import solve_opt
from ._online import (
    ALGORITHM_RO_ADVICE,
    ALGORITHM_RORO,
    ALGORITHM_THRESHOLD,
    ALGORITHM_UQ_ADVICE,
    RunRecord,
    ro_advice_run,
    roro_run,
    threshold_run,
    uq_advice_run,
)
from ._util import dump_json, fmt6

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SOLVER = 3

JOBS_ENV = "PYSASP_JOBS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Reports usage errors with exit status 1 instead of argparse's 2."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _trust(value: str) -> float:
    try:
        trust = float(value)
    except ValueError as ex:
        raise argparse.ArgumentTypeError(f"{value!r} is not a number") from ex
    if not 0 <= trust <= 1:
        raise argparse.ArgumentTypeError(f"trust must lie in [0, 1] (got {trust})")
    return trust


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError as ex:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer") from ex
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer (got {number})")
    return number


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV)
    if raw is None:
        return 1
    try:
        return _positive_int(raw)
    except argparse.ArgumentTypeError as ex:
        raise UsageError(f"{JOBS_ENV}: {ex}") from ex


def _jobs(args: argparse.Namespace) -> int:
    return args.jobs if args.jobs is not None else _default_jobs()


def _print_summary(result: ExperimentResult) -> None:
    print(f"{'algorithm':<16} {'mean':>10} {'p95':>10} {'count':>6}")
    for name, stats in result.stats.items():
        print(f"{name:<16} {fmt6(stats.mean):>10} {fmt6(stats.p95):>10} {stats.count:>6}")
    if result.failures:
        print(f"{len(result.failures)} instance(s) failed; see manifest.json")


def cmd_solve(args: argparse.Namespace) -> int:
    instance = load_instance_json(args.instance)
    report = solve_opt(instance.params, instance.prices)
    if args.out:
        dump_json(report.to_dict(), args.out)
    print(fmt6(report.cost.total))
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    if args.algorithm in (ALGORITHM_UQ_ADVICE, ALGORITHM_RO_ADVICE) and args.forecast is None:
        raise UsageError(f"--forecast is required for {args.algorithm}")
    if args.trust is not None and args.algorithm != ALGORITHM_RO_ADVICE:
        raise UsageError("--trust only applies to ro-advice")

    instance = load_instance_json(args.instance)
    record: RunRecord
    if args.algorithm == ALGORITHM_RORO:
        record = roro_run(instance)
    elif args.algorithm == ALGORITHM_THRESHOLD:
        record = threshold_run(instance)
    elif args.algorithm == ALGORITHM_RO_ADVICE:
        forecast = load_forecast_json(args.forecast)
        trust = 0.5 if args.trust is None else args.trust
        record = ro_advice_run(instance, forecast.point, trust)
    else:
        forecast = load_forecast_json(args.forecast)
        record = uq_advice_run(instance, forecast, DusConfig(seed=args.seed))

    opt = solve_opt(instance.params, instance.prices)
    record = dataclasses.replace(record, empirical_cr=empirical_cr(record, opt))
    if args.out:
        dump_json(record.to_dict(), args.out)
    assert record.empirical_cr is not None
    print(fmt6(record.empirical_cr))
    return EXIT_OK


def cmd_dus(args: argparse.Namespace) -> int:
    instance = load_instance_json(args.instance)
    forecast = load_forecast_json(args.forecast)
    result = dus_solve(
        instance.params,
        forecast.clip_to(instance.params),
        DusConfig(eval_budget=args.budget, n_starts=min(16, args.budget), seed=args.seed),
    )
    if args.out:
        dump_json(result.to_dict(), args.out)
    print(fmt6(result.score))
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    instance = load_instance_json(args.instance)
    forecast = synth_uq(
        instance, SynthUqConfig(xi=args.xi, seed=args.seed), DusConfig(seed=args.seed)
    )
    dump_json(forecast_to_dict(forecast), args.out)
    logger.info("Wrote %s", args.out)
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    config = ExperimentConfig.load(args.config)
    result = run_experiment(config, jobs=_jobs(args))
    emit_report(result, args.out)
    _print_summary(result)
    return EXIT_OK


def _sweep_value(parameter: str, raw: str) -> Any:
    if parameter == "trace":
        return raw
    try:
        return int(raw) if parameter == "T" else float(raw)
    except ValueError as ex:
        raise UsageError(f"invalid value {raw!r} for {parameter}") from ex


def cmd_sweep(args: argparse.Namespace) -> int:
    config = ExperimentConfig.load(args.config)
    values = [_sweep_value(args.param, raw) for raw in args.values]
    result = sweep(config, args.param, values, jobs=_jobs(args))
    emit_report(result, args.out)
    for value, algorithm, mean, _, count in result.table():
        print(f"{args.param}={value} {algorithm:<16} {fmt6(mean)} ({count})")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    for path in replay_manifest(args.manifest, args.out, jobs=_jobs(args)):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="pysasp", description="Signal-aware workload shifting: solvers and experiments."
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="more logging (-vv for debug output)"
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(
        name: str, func: Callable[[argparse.Namespace], int], text: str
    ) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=text, description=text)
        sub.set_defaults(func=func)
        return sub

    def add_jobs(sub: argparse.ArgumentParser) -> None:
        sub.add_argument(
            "--jobs",
            type=_positive_int,
            default=None,
            help=f"worker processes (default: ${JOBS_ENV} or 1)",
        )

    sub = add("solve", cmd_solve, "Solve an instance offline and print the optimal cost.")
    sub.add_argument("--instance", required=True, metavar="FILE", help="instance JSON file")
    sub.add_argument("--out", metavar="FILE", help="write the solve report as JSON")

    sub = add("run", cmd_run, "Run an online algorithm on an instance and print its ratio.")
    sub.add_argument(
        "--algorithm",
        required=True,
        choices=[ALGORITHM_RORO, ALGORITHM_UQ_ADVICE, ALGORITHM_RO_ADVICE, ALGORITHM_THRESHOLD],
        help="online algorithm",
    )
    sub.add_argument("--instance", required=True, metavar="FILE", help="instance JSON file")
    sub.add_argument("--forecast", metavar="FILE", help="forecast JSON file (advice algorithms)")
    sub.add_argument(
        "--trust", type=_trust, help="fixed advice weight for ro-advice (default: 0.5)"
    )
    sub.add_argument("--seed", type=int, default=0, help="seed of the DUS search (default: 0)")
    sub.add_argument("--out", metavar="FILE", help="write the run record as JSON")

    sub = add("dus", cmd_dus, "Compute the decision uncertainty score of a forecast.")
    sub.add_argument("--instance", required=True, metavar="FILE", help="instance JSON file")
    sub.add_argument("--forecast", required=True, metavar="FILE", help="forecast JSON file")
    sub.add_argument("--seed", type=int, default=0, help="search seed (default: 0)")
    sub.add_argument(
        "--budget", type=_positive_int, default=500, help="offline solves to spend (default: 500)"
    )
    sub.add_argument("--out", metavar="FILE", help="write the DUS result as JSON")

    sub = add("synth", cmd_synth, "Generate a synthetic uncertainty-box forecast.")
    sub.add_argument("--instance", required=True, metavar="FILE", help="instance JSON file")
    sub.add_argument("--xi", type=float, required=True, help="box width knob in [0, 1]")
    sub.add_argument("--seed", type=int, default=0, help="seed (default: 0)")
    sub.add_argument("--out", required=True, metavar="FILE", help="forecast JSON output")

    sub = add("experiment", cmd_experiment, "Run a batch experiment and emit reports.")
    sub.add_argument("--config", required=True, metavar="FILE", help="experiment config JSON")
    sub.add_argument("--out", required=True, metavar="DIR", help="report directory")
    add_jobs(sub)

    sub = add("sweep", cmd_sweep, "Sweep one experiment parameter and emit reports.")
    sub.add_argument("--config", required=True, metavar="FILE", help="experiment config JSON")
    sub.add_argument(
        "--param", required=True, choices=["xi", "T", "beta", "trace"], help="swept parameter"
    )
    sub.add_argument("--values", required=True, nargs="+", metavar="V", help="parameter values")
    sub.add_argument("--out", required=True, metavar="DIR", help="report directory")
    add_jobs(sub)

    sub = add("report", cmd_report, "Replay a manifest and emit its reports again.")
    sub.add_argument("--manifest", required=True, metavar="FILE", help="manifest.json to replay")
    sub.add_argument("--out", required=True, metavar="DIR", help="report directory")
    add_jobs(sub)

    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    if args.quiet:
        level = logging.ERROR
    else:
        level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)

    try:
        return int(args.func(args))
    except UsageError as ex:
        parser.print_usage(sys.stderr)
        print(f"pysasp: error: {ex}", file=sys.stderr)
        return EXIT_USAGE
    except SolverFailure as ex:
        print(ex, file=sys.stderr)
        return EXIT_SOLVER
    except Error as ex:
        print(ex, file=sys.stderr)
        return EXIT_DATA
    except OSError as ex:
        print(f"pysasp: {ex}", file=sys.stderr)
        return EXIT_DATA
