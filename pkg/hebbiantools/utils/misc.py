import hashlib
import json
import multiprocessing as mp
import time
from collections.abc import Callable, Iterable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(func: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> list[R]:
    """
    Applies ``func`` to every item, optionally across a pool of worker processes.

    Results are returned in input order whatever the pool size, so callers stay deterministic.

    :param func: A picklable callable taking one item.
    :type func: Callable[[T], R]
    :param items: The inputs.
    :type items: Iterable[T]
    :param jobs: The number of worker processes. ``1`` runs in the calling process.
    :type jobs: int
    :return: The results, ordered like ``items``.
    :rtype: list[R]
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with mp.Pool(processes=min(jobs, len(items))) as pool:
        return pool.map(func, items)


def canonical_json(data: Any) -> str:
    """JSON with sorted keys and compact separators."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_digest(data: Any) -> str:
    """
    The SHA-256 digest of the canonical JSON form of ``data``.

    :return: The hex digest, unaffected by the key order of ``data``.
    :rtype: str
    """
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def file_sha256(path: Path) -> str:
    """The SHA-256 hex digest of a file's bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@contextmanager
def stopwatch() -> Iterator[dict[str, float]]:
    """
    Measures the wall time spent in the ``with`` block.

    The yielded dictionary gets an ``elapsed`` entry, in seconds, once the block exits.

    :return: A generator that yields the timing record.
    :rtype: Iterator[dict[str, float]]
    """
    record = {"elapsed": 0.0}
    start = time.perf_counter()
    try:
        yield record
    finally:
        record["elapsed"] = time.perf_counter() - start
