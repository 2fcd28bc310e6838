"""Certainty-equivalent fronts: design on estimated dynamics, audit on the true ones."""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadInput, CannotStabilize, LQRError, NetMismatch, RankDeficient
from .lqr import DynamicsModel, cost_vector
from .pareto import ParetoFrontApprox, approximate_front
from .solvers import is_stabilizing, norm2


@dataclass(frozen=True, eq=False)
class EstimatedDynamics:
    A_hat: np.ndarray
    B_hat: np.ndarray
    err_A: float
    err_B: float
    provenance: str

    @property
    def epsilon(self):
        return max(self.err_A, self.err_B)

    def model(self):
        return DynamicsModel(self.A_hat, self.B_hat)


@dataclass(eq=False)
class CEFront:
    base: ParetoFrontApprox
    true_stable_flags: list
    true_losses: list
    estimates: EstimatedDynamics = None


@dataclass
class CEReport:
    epsilon_dyn: float
    provenance: str
    per_weight: list = field(default_factory=list)
    sup_weighted: float = 0.0
    sup_uniform: float = 0.0
    stable_fraction: float = 1.0

    def to_dict(self):
        return {
            "epsilon_dyn": self.epsilon_dyn,
            "provenance": self.provenance,
            "per_weight": self.per_weight,
            "sup_weighted": self.sup_weighted,
            "sup_uniform": self.sup_uniform,
            "stable_fraction": self.stable_fraction,
        }


def _direction(rng, shape):
    E = rng.standard_normal(shape)
    return E / norm2(E)


def perturb_dynamics(dynamics, epsilon, seed, max_retries=50):
    """``A + E_A, B + E_B`` with ``||E_A|| = ||E_B|| = epsilon`` exactly.

    Directions are redrawn until the perturbed pair is stabilizable.
    """
    if epsilon < 0:
        raise BadInput("epsilon must be nonnegative")
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        A_hat = dynamics.A + epsilon * _direction(rng, dynamics.A.shape)
        B_hat = dynamics.B + epsilon * _direction(rng, dynamics.B.shape)
        try:
            DynamicsModel(A_hat, B_hat)
        except BadInput:
            continue
        return EstimatedDynamics(A_hat, B_hat, float(epsilon), float(epsilon), "synthetic")
    raise CannotStabilize(f"no stabilizable perturbation of size {epsilon:g} in {max_retries} draws")


def identify_dynamics(dynamics, excitation_std, horizon, rollouts, noise_std, seed, K=None):
    """Least-squares estimate of (A, B) from simulated rollouts.

    Each rollout starts at ``x0 ~ N(0, I)`` and applies
    ``u_t = K x_t + excitation_std * N(0, I)`` to
    ``x_{t+1} = A x_t + B u_t + noise_std * N(0, I)``. ``K`` defaults to 0.
    """
    n, d = dynamics.n, dynamics.d
    K = np.zeros((d, n)) if K is None else np.atleast_2d(K)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((rollouts, n))
    regs, targets = [], []
    for _ in range(horizon):
        U = X @ K.T + excitation_std * rng.standard_normal((rollouts, d))
        X_next = X @ dynamics.A.T + U @ dynamics.B.T + noise_std * rng.standard_normal((rollouts, n))
        regs.append(np.hstack([X, U]))
        targets.append(X_next)
        X = X_next
    Z = np.vstack(regs)
    Y = np.vstack(targets)
    theta, _, rank, _ = np.linalg.lstsq(Z, Y, rcond=None)
    if rank < n + d:
        raise RankDeficient(f"regressor rank {rank} < n + d = {n + d}")
    A_hat = theta[:n].T
    B_hat = theta[n:].T
    return EstimatedDynamics(
        A_hat, B_hat, norm2(dynamics.A - A_hat), norm2(dynamics.B - B_hat), "identified"
    )


def ce_front(problem, estimates, epsilon, workers=1, net=None):
    """Front designed on the estimates, with every gain re-evaluated on the true dynamics."""
    est_problem = problem.with_dynamics(estimates.model())
    base = approximate_front(est_problem, epsilon, workers=workers, net=net)
    flags, losses = [], []
    for p in base.points:
        stable = is_stabilizing(problem.dynamics.A, problem.dynamics.B, p.K)
        flags.append(stable)
        losses.append(cost_vector(problem, p.K) if stable else np.full(problem.m, math.inf))
    return CEFront(base=base, true_stable_flags=flags, true_losses=losses, estimates=estimates)


def ce_error_report(problem, true_front, ce):
    """Per-weight loss errors of the CE gains against the true optimal gains."""
    if not np.array_equal(true_front.net.points, ce.base.net.points):
        raise NetMismatch("true and CE fronts use different nets")
    true_by_idx = dict(zip(true_front.indices, true_front.points))
    rows = []
    for idx, p, stable, loss in zip(ce.base.indices, ce.base.points, ce.true_stable_flags, ce.true_losses):
        ref = true_by_idx.get(idx)
        if ref is None:
            continue
        if stable:
            diff = ref.losses - loss
            weighted = abs(float(ref.w @ diff))
            uniform = float(np.max(np.abs(diff)))
        else:
            weighted = uniform = math.inf
        rows.append({"w": [float(x) for x in ref.w], "stable_true": bool(stable), "weighted_err": weighted, "uniform_err": uniform})
    est = ce.estimates
    return CEReport(
        epsilon_dyn=est.epsilon if est is not None else math.nan,
        provenance=est.provenance if est is not None else "unknown",
        per_weight=rows,
        sup_weighted=max((r["weighted_err"] for r in rows), default=0.0),
        sup_uniform=max((r["uniform_err"] for r in rows), default=0.0),
        stable_fraction=(sum(r["stable_true"] for r in rows) / len(rows)) if rows else math.nan,
    )


def locate_stability_threshold(problem, epsilon, seed, hi=1.0, iters=30):
    """Bisection for the largest dynamics error at which every CE gain still stabilizes.

    The perturbation ray is fixed by ``seed``; sizes whose perturbed pair is
    not stabilizable count as failures.
    """
    def all_stable(eps):
        try:
            est = perturb_dynamics(problem.dynamics, eps, seed, max_retries=1)
            ce = ce_front(problem, est, epsilon)
        except LQRError:
            return False
        return bool(ce.true_stable_flags) and all(ce.true_stable_flags) and ce.base.complete

    lo = 0.0
    if all_stable(hi):
        return hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if all_stable(mid):
            lo = mid
        else:
            hi = mid
    return lo
