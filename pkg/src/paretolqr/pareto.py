"""Pareto-front approximation over an epsilon-net, dominance logic, the
brute-force reference front and the lifting-map certificate."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimensionMismatch, EmptyGrid, LQRError, Unstable
from .lqr import cost_vector, state_gramian
from .scalarization import ParetoPoint, epsilon_net, solve_scalarized
from .solvers import as_matrix, min_eig_sym, spectral_radius

LOSS_ATOL = 1e-9
LOSS_RTOL = 1e-9


@dataclass(frozen=True)
class LiftingCertificate:
    min_eig_schur: float
    objective_gap: np.ndarray
    feasible: bool


@dataclass(eq=False)
class ParetoFrontApprox:
    """Image of an epsilon-net under the scalarized solve.

    ``points[i]`` was solved at ``net.points[indices[i]]``; weights whose
    solve failed are listed in ``failures`` as ``(net_index, message)``.
    """

    epsilon: float
    net: object
    points: list
    problem_digest: str
    indices: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    dynamics: object = None

    @property
    def complete(self):
        return not self.failures

    @property
    def weights(self):
        return np.array([p.w for p in self.points])

    @property
    def losses(self):
        return np.array([p.losses for p in self.points])

    def __len__(self):
        return len(self.points)


def approximate_front(problem, epsilon, workers=1, net=None, **solver_kw):
    """Solve the scalarized problem at every net weight.

    Solver failures at individual weights are recorded and the sweep
    continues. ``workers > 1`` fans the solves out over a thread pool;
    output order always follows the net.
    """
    if net is None:
        net = epsilon_net(problem.m, epsilon)

    def solve(i):
        try:
            return solve_scalarized(problem, net.points[i], **solver_kw)
        except LQRError as exc:
            return exc

    idx = range(len(net))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, idx))
    else:
        results = [solve(i) for i in idx]

    front = ParetoFrontApprox(
        epsilon=float(epsilon), net=net, points=[], problem_digest=problem.digest(), dynamics=problem.dynamics
    )
    for i, res in zip(idx, results):
        if isinstance(res, ParetoPoint):
            front.points.append(res)
            front.indices.append(i)
        else:
            front.failures.append((i, f"{type(res).__name__}: {res}"))
    return front


def default_tol(losses):
    losses = np.asarray(losses, dtype=float)
    finite = losses[np.isfinite(losses)]
    scale = float(np.max(np.abs(finite))) if finite.size else 0.0
    return LOSS_ATOL + LOSS_RTOL * scale


def dominates(l1, l2, tol=0.0):
    """True when l1 is no worse than l2 everywhere (up to tol) and strictly better somewhere."""
    l1 = np.asarray(l1, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    if l1.shape != l2.shape:
        raise DimensionMismatch("loss vectors differ in length")
    return bool(np.all(l1 <= l2 + tol) and np.any(l1 < l2 - tol))


def dominance_filter(points, tol=0.0):
    """Indices of the nondominated loss vectors, in input order."""
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return []
    arr = np.atleast_2d(arr)
    return [int(i) for i in np.flatnonzero(kernels.dominance_mask(arr, tol))]


def scalar_gain_grid(dynamics, step, margin=1e-3):
    """Evenly spaced gains covering the stable interval of a scalar system, shrunk by ``margin``."""
    if dynamics.n != 1 or dynamics.d != 1:
        raise DimensionMismatch("scalar_gain_grid needs n = d = 1")
    a, b = float(dynamics.A[0, 0]), float(dynamics.B[0, 0])
    if b == 0.0:
        raise EmptyGrid("B = 0: no gain changes the closed loop")
    lo, hi = sorted(((-1.0 - a) / b, (1.0 - a) / b))
    return np.arange(lo + margin, hi - margin + 0.5 * step, step)


def brute_force_front(problem, control_grid):
    """Evaluate every stabilizing grid gain and keep the nondominated ones.

    Returns a list of ``(K, losses)``. Scalar problems with a 1-D grid use
    the compiled closed-form loss kernel.
    """
    grid = list(control_grid) if not isinstance(control_grid, np.ndarray) else control_grid
    dyn = problem.dynamics
    if isinstance(grid, np.ndarray) and grid.ndim == 1 and dyn.n == 1 and dyn.d == 1:
        q = np.array([o.Q[0, 0] for o in problem.objectives])
        r = np.array([o.R[0, 0] for o in problem.objectives])
        losses = kernels.scalar_losses(float(dyn.A[0, 0]), float(dyn.B[0, 0]), grid, q, r)
        ok = np.all(np.isfinite(losses), axis=1)
        gains = [np.array([[k]]) for k in grid[ok]]
        losses = losses[ok]
    else:
        gains, rows = [], []
        for K in grid:
            K = as_matrix(K, "K", shape=(dyn.d, dyn.n))
            if spectral_radius(dyn.closed_loop(K)) < 1.0:
                gains.append(K)
                rows.append(cost_vector(problem, K))
        losses = np.array(rows)
    if len(gains) == 0:
        raise EmptyGrid("no stabilizing gain in the grid")
    keep = dominance_filter(losses, default_tol(losses))
    return [(gains[i], losses[i]) for i in keep]


def verify_lifting(dynamics, K, objectives):
    """Check the explicit feasible point ``(P, L, G) = (P^L_K, K P^L_K, P^L_K - I)``.

    ``min_eig_schur`` is the smallest eigenvalue of
    ``[[G, AP + BL], [(AP + BL)^T, P]]`` and ``objective_gap[i]`` is
    ``Tr(Q_i P) + Tr(L P^-1 L^T R_i) - L_i(K)``.
    """
    objectives = getattr(objectives, "objectives", objectives)
    K = np.atleast_2d(K)
    if spectral_radius(dynamics.closed_loop(K)) >= 1.0:
        raise Unstable("K does not stabilize (A, B)")
    A, B = dynamics.A, dynamics.B
    P = state_gramian(dynamics, K)
    Lm = K @ P
    G = P - np.eye(dynamics.n)
    off = A @ P + B @ Lm
    block = np.block([[G, off], [off.T, P]])
    min_eig = min_eig_sym(block)
    lifted_term = Lm @ np.linalg.solve(P, Lm.T)
    gaps, losses = [], []
    for o in objectives:
        loss = float(np.trace((o.Q + K.T @ o.R @ K) @ P))
        gaps.append(float(np.trace(o.Q @ P) + np.trace(lifted_term @ o.R)) - loss)
        losses.append(loss)
    gaps = np.array(gaps)
    feasible = bool(min_eig >= -1e-8 and np.all(np.abs(gaps) <= 1e-8 * (1.0 + np.abs(losses))))
    return LiftingCertificate(min_eig_schur=min_eig, objective_gap=gaps, feasible=feasible)


def _one_sided(query, target):
    tw, tl = target.weights, target.losses
    weighted = uniform = 0.0
    for p in query.points:
        j, _ = kernels.nearest_index(tw, p.w)
        diff = p.losses - tl[j]
        weighted = max(weighted, abs(float(p.w @ diff)))
        uniform = max(uniform, float(np.max(np.abs(diff))))
    return weighted, uniform


def front_distance(front_a, front_b):
    """Largest weighted and uniform loss gaps between two fronts.

    Each point of one front is matched with the l1-nearest weight of the
    other (ties to the lowest index); both directions are scanned, so the
    result does not depend on argument order. The weighted gap is measured
    with the query point's own weight.
    """
    if front_a.net.m != front_b.net.m:
        raise DimensionMismatch("fronts have different numbers of objectives")
    if front_a.problem_digest != front_b.problem_digest:
        raise DimensionMismatch("fronts were built for different problems")
    wa, ua = _one_sided(front_a, front_b)
    wb, ub = _one_sided(front_b, front_a)
    return max(wa, wb), max(ua, ub)


def coverage_gap(reference, candidates, scale=None):
    """Max over reference loss vectors of the l-inf distance to the closest candidate.

    With ``scale`` (one entry per objective) every coordinate is divided
    by it first.
    """
    ref = np.atleast_2d(np.asarray(reference, dtype=float))
    cand = np.atleast_2d(np.asarray(candidates, dtype=float))
    if scale is not None:
        scale = np.asarray(scale, dtype=float)
        ref = ref / scale
        cand = cand / scale
    gaps = [np.min(np.max(np.abs(cand - r), axis=1)) for r in ref]
    return float(max(gaps))
