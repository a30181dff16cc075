"""The compiled and numpy kernels must agree bit for bit."""

import itertools

import numpy as np
import pytest

from ecomode import kernels
from helpers import random_instance

IMPLS = kernels.available()


def test_fallback_always_available():
    assert "python" in IMPLS


def test_compiled_extension_built():
    # the package ships the extension; a missing build is a packaging bug, not a skip
    assert "cython" in IMPLS, "run `pip install --no-build-isolation -e .` to build ecomode._kernels"


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_solve_rows_empty(name):
    impl = IMPLS[name]
    out = impl.solve_rows(np.zeros((0, 3)), np.zeros((0, 3)), np.zeros((0, 3), bool), np.zeros(0), np.zeros(0, np.intp), 1.0, 1.0)
    assert out.shape == (0,)


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_solve_rows_tie_prefers_clicked(name):
    P = np.array([[100.0, 100.0]])
    Q = np.array([[500.0, 500.0]])
    out = IMPLS[name].solve_rows(P, Q, np.ones((1, 2), bool), np.array([500.0]), np.array([1], np.intp), 1.0, 1.0)
    assert out.tolist() == [1]


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_solve_rows_tie_prefers_lower_co2_over_clicked(name):
    # equal objective, column 0 emits less
    P = np.array([[50.0, 100.0]])
    Q = np.array([[550.0, 500.0]])
    out = IMPLS[name].solve_rows(P, Q, np.ones((1, 2), bool), np.array([550.0]), np.array([1], np.intp), 1.0, 1.0)
    assert out.tolist() == [0]


def test_implementations_agree_on_random_instances():
    rng = np.random.default_rng(1234)
    for _ in range(300):
        inst = random_instance(rng, m=int(rng.integers(1, 50)), n=int(rng.integers(1, 9)), grid=bool(rng.integers(2)))
        args = (inst.P, inst.Q, inst.offered, inst.qprime, inst.clicked, inst.alpha, inst.beta)
        results = {name: impl.solve_rows(*args).tolist() for name, impl in IMPLS.items()}
        assert len({tuple(r) for r in results.values()}) == 1, results


def _naive_enumerate(values):
    best = None
    for combo in itertools.product(*[range(len(v)) for v in values]):
        total = 0.0
        for row, r in enumerate(combo):
            total = values[row][r] if row == 0 else total + values[row][r]
        if best is None or total < best[0]:
            best = (total, combo)
    return best


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_enumerate_min_matches_itertools(name):
    rng = np.random.default_rng(99)
    for _ in range(200):
        m = int(rng.integers(1, 6))
        values = [rng.integers(0, 4, int(rng.integers(1, 5))).astype(float) for _ in range(m)]
        total, ranks = IMPLS[name].enumerate_min(values)
        exp_total, exp_ranks = _naive_enumerate(values)
        assert total == exp_total
        assert tuple(ranks.tolist()) == exp_ranks


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_enumerate_min_empty(name):
    total, ranks = IMPLS[name].enumerate_min([])
    assert total == 0.0 and ranks.size == 0


def test_worker_count(monkeypatch):
    monkeypatch.setenv("ECOMODE_THREADS", "3")
    assert kernels.worker_count() == 3
    monkeypatch.setenv("ECOMODE_THREADS", "0")
    assert kernels.worker_count() >= 1
    monkeypatch.setenv("ECOMODE_THREADS", "-1")
    with pytest.raises(ValueError):
        kernels.worker_count()
