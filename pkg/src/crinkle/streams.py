"""Per-replicate random streams and the replicate scheduler.

Every replicate (or fixed-size block of draws) gets its own generator derived
from ``(master seed, purpose, index)`` through :class:`numpy.random.SeedSequence`,
which hashes the full key into the PCG64 state.  Results are collected into a
table indexed by task, so output never depends on the number of workers.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Sequence

import numpy as np

MASK64 = (1 << 64) - 1


def seed_stream(master: int, replicate: int, purpose=0) -> np.random.Generator:
    """Independent generator for replicate ``replicate`` of run ``master``.

    ``purpose`` (an int or tuple of ints) separates families of streams inside
    one run, e.g. walk replicates versus a reference sample drawn alongside.
    """
    tag = tuple(int(p) for p in np.atleast_1d(purpose))
    seq = np.random.SeedSequence(
        entropy=int(master) & MASK64, spawn_key=(*tag, int(replicate))
    )
    return np.random.Generator(np.random.PCG64(seq))


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("CRINKLE_WORKERS")
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    return workers


def _call(args):
    fn, task = args
    return fn(task)


def run_tasks(fn: Callable[[Any], Any], tasks: Sequence[Any], workers: int = 1) -> list:
    """``[fn(t) for t in tasks]``, optionally spread over worker processes.

    ``fn`` must be picklable (a module-level function or a ``functools.partial``
    of one) when ``workers > 1``.
    """
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    n = min(workers, len(tasks))
    chunksize = max(1, len(tasks) // (4 * n))
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_call, [(fn, t) for t in tasks], chunksize=chunksize))
