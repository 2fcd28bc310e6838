import numpy as np
import pytest

from paretolqr import problems
from paretolqr.errors import BadInput
from paretolqr.lqr import CostObjective, DynamicsModel, MultiObjectiveProblem

ACCEPTANCE_LINES = []


def random_spd(rng, k, floor=1.0):
    X = rng.standard_normal((k, k))
    return floor * np.eye(k) + X @ X.T / k


def random_problem(rng, n, d, m, a_scale=1.0):
    """Random stabilizable problem satisfying sigma_min(Q_i), sigma_min(R_i) >= 1."""
    while True:
        A = a_scale * rng.standard_normal((n, n)) / np.sqrt(n)
        B = rng.standard_normal((n, d))
        objs = [CostObjective(random_spd(rng, n), random_spd(rng, d), f"obj{i}") for i in range(m)]
        try:
            return MultiObjectiveProblem(DynamicsModel(A, B), objs)
        except BadInput:
            continue


def random_stabilizing_gain(rng, problem, scale=0.3):
    """Optimal gain for random costs plus a small perturbation that keeps stability."""
    from paretolqr.lqr import optimal_gain
    from paretolqr.solvers import is_stabilizing

    dyn = problem.dynamics
    K0, _ = optimal_gain(dyn, random_spd(rng, dyn.n), random_spd(rng, dyn.d))
    while scale > 1e-9:
        K = K0 + scale * rng.standard_normal(K0.shape)
        if is_stabilizing(dyn.A, dyn.B, K, margin_tol=0.02):
            return K
        scale *= 0.5
    return K0


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def sys0():
    return problems.sys0()


@pytest.fixture
def golden():
    return problems.golden()


@pytest.fixture
def sys2():
    return problems.sys2()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
