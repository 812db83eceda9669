"""Per-item process-pool fan-out with input-order results.

Workers receive the shared payload once (pool initializer); jobs=1 stays
in-process. Falls back to sequential execution where fork is unavailable.
"""
from __future__ import annotations

import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor

from .errors import UsageError

_PAYLOAD = None


def _init_worker(payload):
    global _PAYLOAD
    _PAYLOAD = payload


def _call(args):
    fn, item = args
    return fn(_PAYLOAD, item)


def resolve_jobs(jobs: int | None = None) -> int:
    if jobs is None:
        env = os.environ.get("REWEAVE_JOBS") or os.environ.get("TRG_JOBS")
        if env is not None:
            try:
                jobs = int(env)
            except ValueError:
                raise UsageError(f"jobs environment override is not an integer: {env!r}") from None
        else:
            jobs = os.cpu_count() or 1
    if jobs < 1:
        raise UsageError(f"jobs must be >= 1, got {jobs}")
    return jobs


def parallel_map(fn, payload, items, jobs: int = 1) -> list:
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(payload, item) for item in items]
    try:
        ctx = mp.get_context("fork")
    except ValueError:
        return [fn(payload, item) for item in items]
    workers = min(jobs, len(items))
    chunk = max(1, len(items) // (workers * 4))
    with ProcessPoolExecutor(
        max_workers=workers, mp_context=ctx, initializer=_init_worker, initargs=(payload,)
    ) as pool:
        return list(pool.map(_call, [(fn, item) for item in items], chunksize=chunk))
