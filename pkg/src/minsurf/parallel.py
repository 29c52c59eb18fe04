"""Thread-cap helper honoring the MINSURF_THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

_ENV = "MINSURF_THREADS"
_MAX_AUTO = 8


def thread_count() -> int:
    """Worker cap: MINSURF_THREADS, with 0 or unset meaning auto."""
    raw = os.environ.get(_ENV, "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        return min(os.cpu_count() or 1, _MAX_AUTO)
    return n


def run_chunked(fn, chunks: list):
    """Apply fn to each chunk, threaded when the cap allows it."""
    workers = min(thread_count(), len(chunks))
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))
