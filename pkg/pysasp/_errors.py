from typing import TYPE_CHECKING, Any, List, Optional, Sequence

if TYPE_CHECKING:  # pragma: no cover
    import numpy as np

    from ._core import Violation


class Error(Exception):
    pass


class InvalidParameters(Error):
    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message

    def __repr__(self) -> str:
        return f"pysasp.InvalidParameters({self.message!r})"

    def __str__(self) -> str:
        return f"pysasp.InvalidParameters: {self.message}"


class DimensionMismatch(Error):
    def __init__(self, what: str, expected: int, actual: int) -> None:
        super().__init__()
        self.what = what
        self.expected = expected
        self.actual = actual

    def __repr__(self) -> str:
        return (
            f"pysasp.DimensionMismatch({self.what!r}, expected={self.expected!r}, "
            f"actual={self.actual!r})"
        )

    def __str__(self) -> str:
        return (
            f"pysasp.DimensionMismatch: {self.what} has length {self.actual} "
            f"(expected {self.expected})"
        )


class OutOfDomain(Error):
    def __init__(
        self, name: str, value: float, low: Optional[float] = None, high: Optional[float] = None
    ) -> None:
        super().__init__()
        self.name = name
        self.value = value
        self.low = low
        self.high = high

    def __repr__(self) -> str:
        return (
            f"pysasp.OutOfDomain({self.name!r}, {self.value!r}, low={self.low!r}, "
            f"high={self.high!r})"
        )

    def __str__(self) -> str:
        low = "-inf" if self.low is None else repr(self.low)
        high = "inf" if self.high is None else repr(self.high)
        return f"pysasp.OutOfDomain: {self.name}={self.value!r} is outside [{low}, {high}]"


class InfeasibleSchedule(Error):
    def __init__(self, violation: "Violation", total: int = 1) -> None:
        super().__init__()
        self.violation = violation
        self.total = total

    def __repr__(self) -> str:
        return f"pysasp.InfeasibleSchedule({self.violation!r}, total={self.total!r})"

    def __str__(self) -> str:
        return (
            f"pysasp.InfeasibleSchedule: {self.violation.describe()}"
            + (f" (and {self.total - 1} more)" if self.total > 1 else "")
        )


class SolverFailure(Error):
    def __init__(
        self,
        status: str,
        *,
        best_iterate: Optional["np.ndarray"] = None,
        residual: float = float("inf"),
        iterations: int = 0,
    ) -> None:
        super().__init__()
        self.status = status
        self.best_iterate = best_iterate
        self.residual = residual
        self.iterations = iterations

    def __repr__(self) -> str:
        return (
            f"pysasp.SolverFailure({self.status!r}, residual={self.residual!r}, "
            f"iterations={self.iterations!r})"
        )

    def __str__(self) -> str:
        return (
            f"pysasp.SolverFailure: solver stopped with status {self.status!r} after "
            f"{self.iterations} iterations (residual={self.residual:.3g})"
        )


class PolicyError(Error):
    def __init__(self, step: int, proposal: float) -> None:
        super().__init__()
        self.step = step
        self.proposal = proposal

    def __repr__(self) -> str:
        return f"pysasp.PolicyError(step={self.step!r}, proposal={self.proposal!r})"

    def __str__(self) -> str:
        return f"pysasp.PolicyError: invalid proposal {self.proposal!r} at step {self.step}"


class DataFormatError(Error):
    def __init__(self, path: str, message: str, lines: Sequence[int] = ()) -> None:
        super().__init__()
        self.path = path
        self.message = message
        self.lines: List[int] = list(lines)

    def __repr__(self) -> str:
        return f"pysasp.DataFormatError({self.path!r}, {self.message!r}, lines={self.lines!r})"

    def __str__(self) -> str:
        where = ""
        if self.lines:
            shown = ", ".join(str(line) for line in self.lines[:10])
            more = "" if len(self.lines) <= 10 else f" (+{len(self.lines) - 10} more)"
            where = f" at line(s) {shown}{more}"
        return f"pysasp.DataFormatError: {self.path}: {self.message}{where}"


class ConfigError(Error):
    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context = context

    def __repr__(self) -> str:
        return f"pysasp.ConfigError({self.message!r})"

    def __str__(self) -> str:
        return f"pysasp.ConfigError: {self.message}"
