"""Problem data, optimal single-objective gains and the LQR cost.

The loss of a stabilizing gain K (control ``u = K x``) is the expected
cumulative cost from ``x0 ~ N(0, I)``:

    L(K, Q, R) = Tr(P_K),   P_K = (A + BK)^T P_K (A + BK) + Q + K^T R K.
"""
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BadInput, DimensionMismatch, NonConvergence, Unstable
from .solvers import (
    DareSolution,
    as_matrix,
    check_spd,
    is_stabilizing,
    min_eig_sym,
    solve_dare,
    solve_dlyap,
    spectral_radius,
)

ASSUMPTION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DynamicsModel:
    """``x_{t+1} = A x_t + B u_t``; stabilizability is checked on construction."""

    A: np.ndarray
    B: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        if B.shape[0] != A.shape[0]:
            raise DimensionMismatch(f"B must have {A.shape[0]} rows, got {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if self.check:
            try:
                solve_dare(A, B, np.eye(self.n), np.eye(self.d), tol=1e-10)
            except NonConvergence as exc:
                raise BadInput(f"(A, B) is not stabilizable: {exc}") from None

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def d(self):
        return self.B.shape[1]

    def closed_loop(self, K):
        return self.A + self.B @ np.atleast_2d(K)


@dataclass(frozen=True, eq=False)
class CostObjective:
    Q: np.ndarray
    R: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "Q", check_spd(self.Q, "Q"))
        object.__setattr__(self, "R", check_spd(self.R, "R"))

    def sigma_min(self):
        return min(min_eig_sym(self.Q), min_eig_sym(self.R))

    def normalized(self):
        """Rescale so that ``min(sigma_min(Q), sigma_min(R)) == 1``; the optimal gain is unchanged."""
        scale = 1.0 / self.sigma_min()
        label = f"{self.label} (x{scale:.6g})" if self.label else f"x{scale:.6g}"
        return CostObjective(self.Q * scale, self.R * scale, label)


@dataclass(frozen=True, eq=False)
class MultiObjectiveProblem:
    dynamics: DynamicsModel
    objectives: tuple
    normalize: bool = field(default=False, repr=False)

    def __post_init__(self):
        objs = tuple(self.objectives)
        if not objs:
            raise BadInput("at least one objective is required")
        if self.normalize:
            objs = tuple(o.normalized() for o in objs)
        n, d = self.dynamics.n, self.dynamics.d
        for i, o in enumerate(objs):
            if o.Q.shape != (n, n) or o.R.shape != (d, d):
                raise DimensionMismatch(f"objective {i} has Q {o.Q.shape}, R {o.R.shape}; expected ({n},{n}), ({d},{d})")
            if o.sigma_min() < 1.0 - ASSUMPTION_TOL:
                raise BadInput(
                    f"objective {i} has sigma_min {o.sigma_min():.6g} < 1; pass normalize=True to rescale"
                )
        object.__setattr__(self, "objectives", objs)

    @property
    def m(self):
        return len(self.objectives)

    @property
    def n(self):
        return self.dynamics.n

    @property
    def d(self):
        return self.dynamics.d

    @property
    def Qs(self):
        return [o.Q for o in self.objectives]

    @property
    def Rs(self):
        return [o.R for o in self.objectives]

    def with_dynamics(self, dynamics):
        return MultiObjectiveProblem(dynamics, self.objectives)

    def to_dict(self):
        return {
            "A": self.dynamics.A.tolist(),
            "B": self.dynamics.B.tolist(),
            "objectives": [{"label": o.label, "Q": o.Q.tolist(), "R": o.R.tolist()} for o in self.objectives],
        }

    @classmethod
    def from_dict(cls, data, normalize=False):
        try:
            dyn = DynamicsModel(np.array(data["A"], dtype=float), np.array(data["B"], dtype=float))
            objs = [
                CostObjective(np.array(o["Q"], dtype=float), np.array(o["R"], dtype=float), str(o.get("label", "")))
                for o in data["objectives"]
            ]
        except (KeyError, TypeError) as exc:
            raise BadInput(f"malformed problem document: {exc!r}") from None
        return cls(dyn, objs, normalize=normalize)

    def digest(self):
        """sha256 of the canonical JSON form of the problem matrices."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def load_problem(path, normalize=False):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BadInput(f"{path}: {exc}") from None
    return MultiObjectiveProblem.from_dict(data, normalize=normalize)


def save_problem(problem, path):
    Path(path).write_text(json.dumps(problem.to_dict(), indent=2) + "\n")


def optimal_gain(dynamics, Q, R, **solver_kw):
    """Optimal gain ``K = -(R + B^T P B)^-1 B^T P A`` and the Riccati solution it came from."""
    A, B = dynamics.A, dynamics.B
    sol = solve_dare(A, B, Q, R, **solver_kw)
    P = sol.P
    K = -np.linalg.solve(np.atleast_2d(R) + B.T @ P @ B, B.T @ P @ A)
    return K, sol


def _stage_cost(K, Q, R):
    K = np.atleast_2d(K)
    return np.atleast_2d(Q) + K.T @ np.atleast_2d(R) @ K


def _require_stable(dynamics, K):
    L = dynamics.closed_loop(K)
    rho = spectral_radius(L)
    if rho >= 1.0:
        raise Unstable(f"closed loop spectral radius {rho:.6g} >= 1; the loss is infinite")
    return L


def value_matrix(dynamics, K, Q, R):
    """``P_K`` solving ``P = L^T P L + Q + K^T R K``."""
    L = _require_stable(dynamics, K)
    return solve_dlyap(L, _stage_cost(K, Q, R), transpose=True)


def state_gramian(dynamics, K):
    """``P^L_K`` solving ``P = L P L^T + I``."""
    L = _require_stable(dynamics, K)
    return solve_dlyap(L, np.eye(dynamics.n))


def cost_via_value(dynamics, K, Q, R):
    return float(np.trace(value_matrix(dynamics, K, Q, R)))


def cost_via_gramian(dynamics, K, Q, R):
    return float(np.trace(_stage_cost(K, Q, R) @ state_gramian(dynamics, K)))


def cost_vector(problem, K):
    """Loss of K under every objective; one Gramian solve shared across objectives."""
    G = state_gramian(problem.dynamics, K)
    return np.array([float(np.trace(_stage_cost(K, o.Q, o.R) @ G)) for o in problem.objectives])


def cost_difference_exact(dynamics, K, K_prime, Q, R):
    """``L(K') - L(K)`` written through the gradient term at K.

    With controls ``u = K x`` the gradient-like term is
    ``E_K = (R + B^T P_K B) K + B^T P_K A`` and

        L(K') - L(K) = -2 Tr(P^L_{K'} (K - K')^T E_K)
                       + Tr(P^L_{K'} (K - K')^T (R + B^T P_K B) (K - K')).
    """
    A, B = dynamics.A, dynamics.B
    K = np.atleast_2d(K)
    K_prime = np.atleast_2d(K_prime)
    R = np.atleast_2d(R)
    P_K = value_matrix(dynamics, K, Q, R)
    G_prime = state_gramian(dynamics, K_prime)
    H = R + B.T @ P_K @ B
    E = H @ K + B.T @ P_K @ A
    D = K - K_prime
    return float(-2.0 * np.trace(G_prime @ D.T @ E) + np.trace(G_prime @ D.T @ H @ D))


def simulate_cost(dynamics, K, Q, R, horizon, rollouts, seed, mode="cumulative"):
    """Monte Carlo estimate of the cost from ``x0 ~ N(0, I)``.

    ``mode="cumulative"`` sums the stage cost over ``t < horizon`` (its
    expectation tends to ``Tr(P_K)``); ``mode="averaged"`` divides by the
    horizon, which tends to 0 for any stabilizing gain.

    Returns ``(estimate, std_error)``.
    """
    if mode not in ("cumulative", "averaged"):
        raise ValueError(f"unknown mode {mode!r}")
    if horizon < 1 or rollouts < 1:
        raise BadInput("horizon and rollouts must be >= 1")
    L = _require_stable(dynamics, K)
    M = _stage_cost(K, Q, R)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((rollouts, dynamics.n))
    total = np.zeros(rollouts)
    for _ in range(horizon):
        total += np.einsum("ri,ij,rj->r", X, M, X)
        X = X @ L.T
        if not np.any(X):
            break
    if mode == "averaged":
        total /= horizon
    err = float(np.std(total, ddof=1) / np.sqrt(rollouts)) if rollouts > 1 else float("nan")
    return float(np.mean(total)), err


__all__ = [
    "CostObjective",
    "DareSolution",
    "DynamicsModel",
    "MultiObjectiveProblem",
    "cost_difference_exact",
    "cost_vector",
    "cost_via_gramian",
    "cost_via_value",
    "is_stabilizing",
    "load_problem",
    "optimal_gain",
    "save_problem",
    "simulate_cost",
    "state_gramian",
    "value_matrix",
]
