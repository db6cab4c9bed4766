import collections
import threading
from typing import Callable, Generic, Hashable, TypeVar

T = TypeVar("T")


class ThreadLocalCache(Generic[T]):
    """A small LRU cache whose entries are private to the calling thread.

    Compiled solver programs carry mutable parameter values, so a program must never be shared
    between threads that solve concurrently."""

    def __init__(self, factory: Callable[[Hashable], T], maxsize: int = 32) -> None:
        self._factory = factory
        self._maxsize = maxsize
        self._storage = threading.local()

    def _data(self) -> "collections.OrderedDict[Hashable, T]":
        try:
            return self._storage.data  # type: ignore
        except AttributeError:
            self._storage.data = collections.OrderedDict()
            return self._storage.data  # type: ignore

    def __call__(self, key: Hashable) -> T:
        data = self._data()
        try:
            value = data[key]
        except KeyError:
            pass
        else:
            data.move_to_end(key)
            return value

        value = self._factory(key)
        data[key] = value
        if len(data) > self._maxsize:
            data.popitem(last=False)
        return value

    def __len__(self) -> int:
        return len(self._data())

    def clear(self) -> None:
        self._data().clear()
