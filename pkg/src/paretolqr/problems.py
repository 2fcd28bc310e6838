"""Named reference problems used by the CLI, the tests and the demo."""
import numpy as np

from .lqr import CostObjective, DynamicsModel, MultiObjectiveProblem

GRAVITY = 9.81
PENDULUM_LENGTH = 1.0
PENDULUM_MASS = 1.0
PENDULUM_DT = 0.05


def sys0():
    """A = 0, B = 1, Q = R = 1: the Riccati solution is Q itself."""
    return MultiObjectiveProblem(DynamicsModel([[0.0]], [[1.0]]), [CostObjective([[1.0]], [[1.0]], "state")])


def golden():
    """A = B = Q = R = 1: P is the golden ratio."""
    return MultiObjectiveProblem(DynamicsModel([[1.0]], [[1.0]]), [CostObjective([[1.0]], [[1.0]], "state")])


def sys2():
    """Scalar plant a = 0.9, b = 1 with a cheap-control and an expensive-control objective."""
    return MultiObjectiveProblem(
        DynamicsModel([[0.9]], [[1.0]]),
        [CostObjective([[1.0]], [[1.0]], "cheap control"), CostObjective([[1.0]], [[10.0]], "expensive control")],
    )


def pendulum(dt=PENDULUM_DT):
    """Inverted pendulum linearized about upright, forward-Euler discretized.

    Objective 1 penalizes angle deviation, objective 2 control effort.
    This is a canonical textbook linearization, not a reproduction of any
    published parameter set.
    """
    Ac = np.array([[0.0, 1.0], [GRAVITY / PENDULUM_LENGTH, 0.0]])
    Bc = np.array([[0.0], [1.0 / (PENDULUM_MASS * PENDULUM_LENGTH**2)]])
    A = np.eye(2) + dt * Ac
    B = dt * Bc
    return MultiObjectiveProblem(
        DynamicsModel(A, B),
        [
            CostObjective(np.diag([100.0, 1.0]), np.eye(1), "distance to upright"),
            CostObjective(np.eye(2), 100.0 * np.eye(1), "control effort"),
        ],
        normalize=True,
    )


NAMED = {"sys0": sys0, "golden": golden, "sys2": sys2, "pendulum": pendulum}
