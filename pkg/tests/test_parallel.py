from __future__ import annotations

import pytest

from paragroup.core import parallel


@pytest.fixture(autouse=True)
def _reset_mode():
    yield
    parallel.configure(deterministic=False)


def test_worker_count_from_env(monkeypatch):
    monkeypatch.setenv(parallel.THREADS_ENV, "3")
    assert parallel.worker_count() == 3


@pytest.mark.parametrize("raw", ["0", "-2", "abc"])
def test_worker_count_rejects_bad_env(monkeypatch, raw):
    monkeypatch.setenv(parallel.THREADS_ENV, raw)
    with pytest.raises(ValueError):
        parallel.worker_count()


def test_deterministic_mode_uses_one_worker(monkeypatch):
    monkeypatch.setenv(parallel.THREADS_ENV, "8")
    parallel.configure(deterministic=True)
    assert parallel.worker_count() == 1


def test_parallel_map_preserves_order(monkeypatch):
    monkeypatch.setenv(parallel.THREADS_ENV, "4")
    assert parallel.parallel_map(lambda x: x * x, range(10)) == [x * x for x in range(10)]
