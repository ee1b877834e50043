"""Tests for BatchWorker — ordered batch execution with progress and cancellation."""

import math
import os

import pytest

from pvpop.errors import ConfigError, SimulationCancelled
from pvpop.worker import BatchWorker, resolve_workers


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture
def tasks():
    return [5, 3, 0, 7, 1, 4]


@pytest.fixture
def expected(tasks):
    return [math.factorial(t) for t in tasks]


# ---------------------------------------------------------------------------
# resolve_workers
# ---------------------------------------------------------------------------


class TestResolveWorkers:
    def test_explicit(self):
        assert resolve_workers(3) == 3

    def test_all_cpus(self):
        assert resolve_workers(None) == (os.cpu_count() or 1)
        assert resolve_workers(0) == (os.cpu_count() or 1)

    def test_negative(self):
        with pytest.raises(ConfigError):
            resolve_workers(-2)


# ---------------------------------------------------------------------------
# __init__
# ---------------------------------------------------------------------------


class TestWorkerInit:
    """BatchWorker.__init__ snapshots the task list."""

    def test_total(self, tasks):
        assert BatchWorker(math.factorial, tasks).total == len(tasks)

    def test_snapshot_isolated(self, tasks, expected):
        worker = BatchWorker(math.factorial, tasks)
        tasks.append(10)
        tasks[0] = 2
        assert worker.total == len(expected)
        assert worker.run() == expected

    def test_accepts_generator(self):
        worker = BatchWorker(abs, (x for x in (-1, -2, 3)))
        assert worker.run() == [1, 2, 3]


# ---------------------------------------------------------------------------
# run()
# ---------------------------------------------------------------------------


class TestWorkerRun:
    def test_serial_order(self, tasks, expected):
        assert BatchWorker(math.factorial, tasks, n_workers=1).run() == expected

    def test_pool_order(self, tasks, expected):
        assert BatchWorker(math.factorial, tasks, n_workers=3).run() == expected

    def test_empty(self):
        assert BatchWorker(abs, [], n_workers=4).run() == []

    def test_progress(self, tasks):
        calls = []
        BatchWorker(math.factorial, tasks).run(progress_callback=lambda c, t: calls.append((c, t)))
        assert calls == [(i, len(tasks)) for i in range(1, len(tasks) + 1)]

    def test_progress_in_pool(self, tasks):
        calls = []
        BatchWorker(math.factorial, tasks, n_workers=2).run(
            progress_callback=lambda c, t: calls.append(c)
        )
        assert calls == list(range(1, len(tasks) + 1))

    def test_error_propagates(self):
        with pytest.raises(ValueError):
            BatchWorker(math.factorial, [3, -1, 2]).run()

    def test_error_propagates_from_pool(self):
        with pytest.raises(ValueError):
            BatchWorker(math.factorial, [3, -1, 2], n_workers=2).run()


class TestWorkerCancel:
    def test_cancel_before_start(self, tasks):
        with pytest.raises(SimulationCancelled):
            BatchWorker(math.factorial, tasks).run(cancel_check=lambda: True)

    def test_cancel_midway(self, tasks):
        done = []

        def progress(current, total):
            done.append(current)

        with pytest.raises(SimulationCancelled, match="2/6"):
            BatchWorker(math.factorial, tasks).run(
                progress_callback=progress, cancel_check=lambda: len(done) >= 2
            )
        assert done == [1, 2]

    def test_cancel_in_pool(self, tasks):
        with pytest.raises(SimulationCancelled):
            BatchWorker(math.factorial, tasks, n_workers=2).run(cancel_check=lambda: True)

    def test_no_cancel(self, tasks, expected):
        assert BatchWorker(math.factorial, tasks).run(cancel_check=lambda: False) == expected
