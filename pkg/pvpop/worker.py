"""Ordered batch execution for replication chunks and enumeration stripes."""

from __future__ import annotations

import logging
import os
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor

from pvpop.errors import ConfigError, SimulationCancelled

logger = logging.getLogger(__name__)


def resolve_workers(n_workers: int | None) -> int:
    """``None`` or 0 means one worker per CPU; negative values are rejected."""
    if n_workers is None or n_workers == 0:
        return os.cpu_count() or 1
    if n_workers < 0:
        raise ConfigError(f"n_workers must be >= 0, got {n_workers!r}")
    return int(n_workers)


class BatchWorker:
    """Maps a picklable function over tasks, returning results in task order.

    Tasks are snapshotted in __init__, so later mutation of the caller's list
    does not affect the run. With one worker everything runs in-process;
    otherwise tasks go to a process pool and are collected in submission
    order, which keeps the output independent of scheduling.
    """

    def __init__(
        self,
        func: Callable,
        tasks: Iterable,
        n_workers: int | None = 1,
    ):
        """
        Parameters
        ----------
        func : callable
            Module-level function applied to each task.
        tasks : iterable
            Task arguments, one per call.
        n_workers : int or None
            Process count; 1 runs serially, None/0 uses every CPU.
        """
        self._func = func
        self._tasks: Sequence = tuple(tasks)
        self._n_workers = resolve_workers(n_workers)

    @property
    def total(self) -> int:
        return len(self._tasks)

    def run(
        self,
        progress_callback: Callable[[int, int], None] | None = None,
        cancel_check: Callable[[], bool] | None = None,
    ) -> list:
        total = self.total
        results: list = []

        def _step(result):
            results.append(result)
            if progress_callback is not None:
                progress_callback(len(results), total)

        def _cancelled() -> bool:
            return cancel_check is not None and cancel_check()

        workers = min(self._n_workers, total) if total else 1
        logger.debug("running %d tasks on %d worker(s)", total, workers)

        if workers <= 1:
            for task in self._tasks:
                if _cancelled():
                    raise SimulationCancelled(f"cancelled after {len(results)}/{total} tasks")
                _step(self._func(task))
            return results

        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(self._func, task) for task in self._tasks]
            try:
                for future in futures:
                    if _cancelled():
                        raise SimulationCancelled(
                            f"cancelled after {len(results)}/{total} tasks"
                        )
                    _step(future.result())
            except BaseException:
                for future in futures:
                    future.cancel()
                raise
        return results
