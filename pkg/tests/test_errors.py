import numpy as np

import pysasp


def test_invalid_parameters() -> None:
    ex = pysasp.InvalidParameters("horizon must be positive (got 0)")

    assert ex.message == "horizon must be positive (got 0)"
    assert str(ex) == "pysasp.InvalidParameters: horizon must be positive (got 0)"
    assert repr(ex) == "pysasp.InvalidParameters('horizon must be positive (got 0)')"


def test_dimension_mismatch() -> None:
    ex = pysasp.DimensionMismatch("prices", 3, 2)

    assert ex.what == "prices"
    assert ex.expected == 3
    assert ex.actual == 2
    assert str(ex) == "pysasp.DimensionMismatch: prices has length 2 (expected 3)"
    assert repr(ex) == "pysasp.DimensionMismatch('prices', expected=3, actual=2)"


def test_out_of_domain() -> None:
    ex1 = pysasp.OutOfDomain("trust", 1.5, 0.0, 1.0)

    assert ex1.name == "trust"
    assert ex1.value == 1.5
    assert str(ex1) == "pysasp.OutOfDomain: trust=1.5 is outside [0.0, 1.0]"
    assert repr(ex1) == "pysasp.OutOfDomain('trust', 1.5, low=0.0, high=1.0)"

    ex2 = pysasp.OutOfDomain("x", -1.0, low=-0.5)

    assert ex2.high is None
    assert str(ex2) == "pysasp.OutOfDomain: x=-1.0 is outside [-0.5, inf]"

    ex3 = pysasp.OutOfDomain("horizon", 5, high=4)
    assert str(ex3) == "pysasp.OutOfDomain: horizon=5 is outside [-inf, 4]"


def test_infeasible_schedule() -> None:
    violation = pysasp.Violation(pysasp.ViolationKind.BUDGET, None, 0.5, 1.0)
    ex1 = pysasp.InfeasibleSchedule(violation)

    assert ex1.violation is violation
    assert ex1.total == 1
    assert str(ex1) == "pysasp.InfeasibleSchedule: decisions sum to 0.5 (expected 1.0)"

    ex2 = pysasp.InfeasibleSchedule(
        pysasp.Violation(pysasp.ViolationKind.RATE_LIMIT, 2, 0.75, 0.5), total=3
    )
    assert str(ex2) == (
        "pysasp.InfeasibleSchedule: x_2=0.75 exceeds the rate limit 0.5 (and 2 more)"
    )


def test_solver_failure() -> None:
    iterate = np.array([0.5, 0.5])
    ex = pysasp.SolverFailure(
        "infeasible_inaccurate", best_iterate=iterate, residual=0.25, iterations=40
    )

    assert ex.status == "infeasible_inaccurate"
    assert ex.best_iterate is iterate
    assert ex.residual == 0.25
    assert ex.iterations == 40
    assert str(ex) == (
        "pysasp.SolverFailure: solver stopped with status 'infeasible_inaccurate' after "
        "40 iterations (residual=0.25)"
    )
    assert repr(ex) == (
        "pysasp.SolverFailure('infeasible_inaccurate', residual=0.25, iterations=40)"
    )

    bare = pysasp.SolverFailure("solver_error")
    assert bare.best_iterate is None
    assert bare.residual == float("inf")


def test_policy_error() -> None:
    ex = pysasp.PolicyError(3, -0.5)

    assert ex.step == 3
    assert ex.proposal == -0.5
    assert str(ex) == "pysasp.PolicyError: invalid proposal -0.5 at step 3"
    assert repr(ex) == "pysasp.PolicyError(step=3, proposal=-0.5)"


def test_data_format_error() -> None:
    ex1 = pysasp.DataFormatError("trace.csv", "unparseable value")

    assert ex1.lines == []
    assert str(ex1) == "pysasp.DataFormatError: trace.csv: unparseable value"

    ex2 = pysasp.DataFormatError("trace.csv", "unparseable value", [3, 7])
    assert str(ex2) == "pysasp.DataFormatError: trace.csv: unparseable value at line(s) 3, 7"
    assert repr(ex2) == "pysasp.DataFormatError('trace.csv', 'unparseable value', lines=[3, 7])"

    ex3 = pysasp.DataFormatError("trace.csv", "duplicate timestamp", range(2, 14))
    assert str(ex3) == (
        "pysasp.DataFormatError: trace.csv: duplicate timestamp at line(s) "
        "2, 3, 4, 5, 6, 7, 8, 9, 10, 11 (+2 more)"
    )


def test_config_error() -> None:
    ex = pysasp.ConfigError("unknown algorithm 'greedy'", algorithm="greedy")

    assert ex.message == "unknown algorithm 'greedy'"
    assert ex.context == {"algorithm": "greedy"}
    assert str(ex) == "pysasp.ConfigError: unknown algorithm 'greedy'"
    assert repr(ex) == "pysasp.ConfigError(\"unknown algorithm 'greedy'\")"


def test_hierarchy() -> None:
    for cls in (
        pysasp.InvalidParameters,
        pysasp.DimensionMismatch,
        pysasp.OutOfDomain,
        pysasp.InfeasibleSchedule,
        pysasp.SolverFailure,
        pysasp.PolicyError,
        pysasp.DataFormatError,
        pysasp.ConfigError,
    ):
        assert issubclass(cls, pysasp.Error)
