"""Execution context: thread pool and precision mode.

strict mode pins BLAS to a single thread and accumulates in float64, so
outputs are bit-identical for any worker count; fast mode hands the thread
budget to BLAS and allows float32 reassociation (documented 1e-4 drift).
"""

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

from threadpoolctl import threadpool_limits

from .errors import ConfigError

MODES = ("strict", "fast")


@contextmanager
def engine_context(threads: int = 1, mode: str = "strict"):
    """Yields (executor_or_None, precise_flag)."""
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}",
                          field="mode")
    if threads < 1:
        raise ConfigError("threads must be >= 1", field="threads")
    precise = mode == "strict"
    blas_threads = 1 if precise else threads
    executor = None
    try:
        with threadpool_limits(limits=blas_threads, user_api="blas"):
            if precise and threads > 1:
                executor = ThreadPoolExecutor(max_workers=threads)
            yield executor, precise
    finally:
        if executor is not None:
            executor.shutdown(wait=True)
