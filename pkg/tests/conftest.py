import numpy as np
import pytest

from skanfem.adapt import run_adaptive
from skanfem.linsolve import solve_direct
from skanfem.model import FlowParams
from skanfem.oracle import solve_shooting

TABLE_M = [0.0, 0.2, 0.5, 0.8, 1.0, 1.5, 3.0, 7.0, 10.0, 20.0, 100.0]
ORACLE_M = [0.0, 0.2, 0.5, 1.0, 3.0, 10.0]


class _CrossCheck:
    """Collects the worst Krylov-vs-direct gap over every u-system of a run."""

    def __init__(self):
        self.worst = 0.0
        self.count = 0

    def __call__(self, system, x):
        xd = solve_direct(system)
        self.worst = max(self.worst, np.linalg.norm(x - xd) / np.linalg.norm(xd))
        self.count += 1


@pytest.fixture(scope="session")
def oracle():
    cache = {}

    def get(m, **kw):
        key = (m, tuple(sorted(kw.items())))
        if key not in cache:
            cache[key] = solve_shooting(FlowParams.from_m(m, **kw))
        return cache[key]

    return get


@pytest.fixture(scope="session")
def default_runs():
    """Default adaptive runs keyed by m, each with its solver cross-check."""
    cache = {}

    def get(m):
        if m not in cache:
            check = _CrossCheck()
            run = run_adaptive(FlowParams.from_m(m), system_hook=check)
            cache[m] = (run, check)
        return cache[m]

    return get
