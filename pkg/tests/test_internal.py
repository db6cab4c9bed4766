# pylint: disable=protected-access
import json
import pathlib
import threading
from typing import Dict, List

import cvxpy as cp
import numpy as np
import pytest

import pysasp
import pysasp._cache
import pysasp._util


def test_thread_local_cache() -> None:
    calls: List[str] = []

    def factory(key: object) -> str:
        calls.append(str(key))
        return f"value-{key}"

    cache = pysasp._cache.ThreadLocalCache(factory, maxsize=2)

    assert cache("a") == "value-a"
    assert cache("a") == "value-a"
    assert calls == ["a"]

    cache("b")
    # "a" was used most recently before "c" arrives, so "b" is evicted
    cache("a")
    cache("c")
    assert len(cache) == 2
    cache("b")
    assert calls == ["a", "b", "c", "b"]

    cache.clear()
    assert len(cache) == 0


def test_thread_local_cache_threads() -> None:
    cache = pysasp._cache.ThreadLocalCache(lambda key: object())
    main_value = cache("key")
    seen: Dict[str, object] = {}

    def worker() -> None:
        seen["value"] = cache("key")
        seen["len"] = len(cache)

    thread = threading.Thread(target=worker)
    thread.start()
    thread.join()

    assert seen["value"] is not main_value
    assert seen["len"] == 1
    assert cache("key") is main_value


def test_translate_solver_errors() -> None:
    @pysasp._util.translate_solver_errors
    def fail() -> None:
        raise cp.error.SolverError("boom")

    with pytest.raises(pysasp.SolverFailure) as info:
        fail()
    assert info.value.status == "solver_error"

    @pysasp._util.translate_solver_errors
    def succeed(value: int) -> int:
        return value * 2

    assert succeed(4) == 8

    @pysasp._util.translate_solver_errors
    def other() -> None:
        raise ValueError

    with pytest.raises(ValueError):
        other()


def test_substream_determinism() -> None:
    a = pysasp._util.substream(7, 0).random(5)
    b = pysasp._util.substream(7, 0).random(5)
    c = pysasp._util.substream(7, 1).random(5)

    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)

    assert pysasp._util.derive_seed(3, 0, 1) == pysasp._util.derive_seed(3, 0, 1)
    assert pysasp._util.derive_seed(3, 0, 1) != pysasp._util.derive_seed(3, 0, 2)
    assert pysasp._util.derive_seed(3, 0, 1) >= 0


def test_as_vector() -> None:
    source = [1, 2, 3]
    arr = pysasp._util.as_vector(source, "prices", 3)

    assert arr.dtype == np.float64
    assert not arr.flags.writeable
    assert arr.tolist() == [1.0, 2.0, 3.0]

    with pytest.raises(pysasp.DimensionMismatch):
        pysasp._util.as_vector(source, "prices", 4)

    mutable = np.array([1.0, 2.0])
    copy = pysasp._util.as_vector(mutable, "x")
    mutable[0] = 5.0
    assert copy[0] == 1.0


def test_is_finite_number() -> None:
    assert pysasp._util.is_finite_number(1)
    assert pysasp._util.is_finite_number(np.float64(2.5))
    assert not pysasp._util.is_finite_number(float("nan"))
    assert not pysasp._util.is_finite_number(float("inf"))
    assert not pysasp._util.is_finite_number("1.0")  # type: ignore[arg-type]


def test_to_jsonable() -> None:
    data = pysasp._util.to_jsonable(
        {
            "x": np.array([0.5, 0.5]),
            "n": np.int64(3),
            "inf": float("inf"),
            "kind": pysasp.ViolationKind.BUDGET,
            "flag": True,
            "tuple": (np.float64(1.5),),
        }
    )

    assert data == {
        "x": [0.5, 0.5],
        "n": 3,
        "inf": "inf",
        "kind": "budget",
        "flag": True,
        "tuple": [1.5],
    }
    json.dumps(data)


def test_dump_load_json(tmp_path: pathlib.Path) -> None:
    path = str(tmp_path / "out.json")
    pysasp._util.dump_json({"b": 1, "a": np.array([1.0])}, path)

    text = pathlib.Path(path).read_text(encoding="utf8")
    assert text == '{\n  "a": [\n    1.0\n  ],\n  "b": 1\n}\n'
    assert pysasp._util.load_json(path) == {"a": [1.0], "b": 1}


def test_load_json_errors(tmp_path: pathlib.Path) -> None:
    with pytest.raises(pysasp.DataFormatError, match="does not exist"):
        pysasp._util.load_json(str(tmp_path / "missing.json"))

    bad = tmp_path / "bad.json"
    bad.write_text("{\n  oops\n}\n", encoding="utf8")
    with pytest.raises(pysasp.DataFormatError) as info:
        pysasp._util.load_json(str(bad))
    assert info.value.lines == [2]

    array = tmp_path / "array.json"
    array.write_text("[1, 2]\n", encoding="utf8")
    with pytest.raises(pysasp.DataFormatError, match="must be an object"):
        pysasp._util.load_json(str(array))


def test_check_schema_version() -> None:
    pysasp._util.check_schema_version({"schema_version": 1}, "x.json", 1)

    with pytest.raises(pysasp.DataFormatError, match="unsupported schema_version 2"):
        pysasp._util.check_schema_version({"schema_version": 2}, "x.json", 1)
    with pytest.raises(pysasp.DataFormatError, match="None"):
        pysasp._util.check_schema_version({}, "x.json", 1)


def test_fmt6() -> None:
    assert pysasp._util.fmt6(200) == "200.000000"
    assert pysasp._util.fmt6(1.0 / 3) == "0.333333"
