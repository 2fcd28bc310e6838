"""Weight-simplex machinery: epsilon-nets, weighted costs and scalarized solves."""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BadInput, DimensionMismatch, TooFine
from .lqr import cost_vector, optimal_gain
from .solvers import DareSolution

SIMPLEX_TOL = 1e-12
DEFAULT_POINT_BUDGET = 10**7


def as_weight(w, m=None):
    """Validate a point of the probability simplex."""
    w = np.asarray(w, dtype=np.float64).ravel()
    if m is not None and w.shape[0] != m:
        raise DimensionMismatch(f"weight has length {w.shape[0]}, expected {m}")
    if np.any(w < -SIMPLEX_TOL) or abs(w.sum() - 1.0) > 1e-9:
        raise BadInput(f"weight {w} is not in the simplex")
    return np.clip(w, 0.0, None)


@dataclass(frozen=True, eq=False)
class WeightNet:
    """Composition grid ``{j / resolution : j >= 0, sum j = resolution}``.

    Rows of ``points`` are in lexicographic order of ``j``.
    """

    epsilon: float
    m: int
    resolution: int
    points: np.ndarray

    def __len__(self):
        return self.points.shape[0]

    def index_of(self, w):
        idx, dist = kernels.nearest_index(self.points, np.asarray(w, dtype=float))
        return idx if dist <= 1e-12 else None


@dataclass(frozen=True, eq=False)
class ParetoPoint:
    w: np.ndarray
    K: np.ndarray
    P: DareSolution
    losses: np.ndarray

    @property
    def scalarized_loss(self):
        return float(self.w @ self.losses)


def net_resolution(m, epsilon):
    if m == 1:
        return 1
    # guard against 2/0.1 landing a hair above an integer
    return max(1, math.ceil(2 * (m - 1) / epsilon * (1 - 1e-12)))


def epsilon_net(m, epsilon, max_points=DEFAULT_POINT_BUDGET):
    if m < 1:
        raise BadInput("m must be >= 1")
    if not 0 < epsilon <= 1:
        raise BadInput("epsilon must lie in (0, 1]")
    k = net_resolution(m, epsilon)
    count = math.comb(k + m - 1, m - 1)
    if count > max_points:
        raise TooFine(f"net with resolution {k} has {count} points (budget {max_points})")
    grid = kernels.composition_grid(m, k)
    return WeightNet(epsilon=float(epsilon), m=m, resolution=k, points=grid / k)


def nearest_net_point(net, w):
    """Exhaustive l1 scan; ties resolve to the lowest net index."""
    w = as_weight(w, net.m)
    idx, dist = kernels.nearest_index(net.points, w)
    return net.points[idx].copy(), float(dist)


def round_to_net(net, w):
    """Largest-remainder rounding onto the grid, O(m log m).

    Attains the minimal l1 distance, but may pick a different point than
    :func:`nearest_net_point` when several are equally close.
    """
    w = as_weight(w, net.m)
    k = net.resolution
    scaled = w * k
    base = np.floor(scaled).astype(np.int64)
    short = k - int(base.sum())
    order = np.argsort(-(scaled - base), kind="stable")
    base[order[:short]] += 1
    point = base / k
    return point, float(np.abs(point - w).sum())


def sample_simplex(m, size, rng):
    """Uniform draws from the simplex (normalized exponentials)."""
    e = rng.exponential(size=(size, m))
    return e / e.sum(axis=1, keepdims=True)


def combine_costs(problem, w):
    """``(sum_i w_i Q_i, sum_i w_i R_i)``."""
    w = as_weight(w, problem.m)
    Q = sum(wi * o.Q for wi, o in zip(w, problem.objectives))
    R = sum(wi * o.R for wi, o in zip(w, problem.objectives))
    return Q, R


def solve_scalarized(problem, w, **solver_kw):
    """Optimal gain for the weighted objective and its loss vector."""
    w = as_weight(w, problem.m)
    Q, R = combine_costs(problem, w)
    K, sol = optimal_gain(problem.dynamics, Q, R, **solver_kw)
    return ParetoPoint(w=w, K=K, P=sol, losses=cost_vector(problem, K))
