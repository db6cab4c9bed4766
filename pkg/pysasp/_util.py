import dataclasses
import enum
import functools
import json
import math
from typing import Any, Callable, Dict, Optional, Sequence, TypeVar, Union, cast

import cvxpy as cp
import numpy as np

from ._errors import DataFormatError, DimensionMismatch, SolverFailure

# Absolute tolerance on the deadline (budget) constraint
BUDGET_TOL = 1e-9

FloatVector = Union[Sequence[float], np.ndarray]


def as_vector(values: FloatVector, what: str, length: Optional[int] = None) -> np.ndarray:
    """Copy ``values`` into a read-only 1-D float64 array, checking its length if requested."""
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if length is not None and arr.shape[0] != length:
        raise DimensionMismatch(what, length, arr.shape[0])
    arr.setflags(write=False)
    return arr


def is_finite_number(value: float) -> bool:
    return isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value)


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Return an independent counter-based generator for ``(seed, *keys)``.

    Streams for distinct key tuples never overlap, so per-instance streams can be
    consumed in any order (or in parallel) without changing the values drawn."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *keys])))


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit seed derived from ``(seed, *keys)``."""
    state = np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def fmt6(value: float) -> str:
    return f"{value:.6f}"


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return [to_jsonable(item) for item in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else repr(value)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            field.name: to_jsonable(getattr(obj, field.name)) for field in dataclasses.fields(obj)
        }
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(item) for item in obj]
    return obj


def dump_json(data: Any, path: str) -> None:
    with open(path, "w", encoding="utf8") as file:
        json.dump(to_jsonable(data), file, indent=2, sort_keys=True)
        file.write("\n")


def load_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf8") as file:
            data = json.load(file)
    except FileNotFoundError as ex:
        raise DataFormatError(path, "file does not exist") from ex
    except json.JSONDecodeError as ex:
        raise DataFormatError(path, f"invalid JSON ({ex.msg})", [ex.lineno]) from ex

    if not isinstance(data, dict):
        raise DataFormatError(path, "top-level JSON value must be an object")

    return data


def check_schema_version(data: Dict[str, Any], path: str, current: int) -> None:
    version = data.get("schema_version")
    if version != current:
        raise DataFormatError(path, f"unsupported schema_version {version!r} (expected {current})")


# https://mypy.readthedocs.io/en/stable/generics.html#declaring-decorators
F = TypeVar("F", bound=Callable[..., Any])  # pylint: disable=invalid-name


def translate_solver_errors(func: F) -> F:
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except cp.error.SolverError as ex:
            raise SolverFailure("solver_error") from ex

    return cast(F, wrapper)
