"""Matrix-equation solvers and spectral utilities.

Conventions: the Riccati equation is

    P = A^T P A - A^T P B (R + B^T P B)^-1 B^T P A + Q

and ``solve_dlyap(A, Q)`` returns the solution of ``P = A P A^T + Q``
(``transpose=True`` gives ``P = A^T P A + Q``). All norms are spectral
norms unless stated otherwise.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    BadInput,
    DimensionMismatch,
    Diverging,
    NonConvergence,
    NotPositiveDefinite,
    SingularInnerMatrix,
    Unstable,
)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000
DEFAULT_K_MAX = 500


@dataclass(frozen=True, eq=False)
class DareSolution:
    """Stabilizing solution of the Riccati equation."""

    P: np.ndarray
    residual_norm: float
    iterations: int


@dataclass(frozen=True)
class GrowthRate:
    """``tau = sup_k ||L^k|| rho^-k`` evaluated up to ``k_truncation``.

    ``tail_certified`` means some power ``K >= 1`` satisfied
    ``||L^K|| <= rho^K``; submultiplicativity then bounds every later term
    by the ones already scanned, so ``tau`` is exact.
    """

    tau: float
    rho: float
    k_truncation: int
    tail_certified: bool


def as_matrix(M, name="matrix", shape=None):
    arr = np.atleast_2d(np.asarray(M, dtype=np.float64))
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise BadInput(f"{name} has non-finite entries")
    if shape is not None and arr.shape != tuple(shape):
        raise DimensionMismatch(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
    return arr


def symmetrize(X):
    return 0.5 * (X + X.T)


def norm2(M):
    """Spectral norm."""
    return float(np.linalg.norm(np.atleast_2d(M), 2))


def check_spd(M, name="matrix"):
    """Validate a symmetric positive-definite matrix and return it as float array."""
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.T)) > 1e-10 * scale:
        raise BadInput(f"{name} is not symmetric")
    try:
        np.linalg.cholesky(symmetrize(M))
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"{name} is not positive definite") from None
    return symmetrize(M)


def min_eig_sym(M):
    return float(np.linalg.eigvalsh(symmetrize(np.atleast_2d(M)))[0])


def spectral_radius(M):
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def is_stabilizing(A, B, K, margin_tol=0.0):
    A = np.atleast_2d(A)
    L = A + np.atleast_2d(B) @ np.atleast_2d(K)
    return spectral_radius(L) < 1.0 - margin_tol


def _check_dare_inputs(A, B, Q, R):
    A = as_matrix(A, "A")
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    B = as_matrix(B, "B")
    if B.shape[0] != n:
        raise DimensionMismatch(f"B has {B.shape[0]} rows, A has {n}")
    Q = check_spd(Q, "Q")
    R = check_spd(R, "R")
    if Q.shape != (n, n) or R.shape != (B.shape[1], B.shape[1]):
        raise DimensionMismatch("Q/R shapes do not match (A, B)")
    return A, B, Q, R


def riccati_map(P, A, B, Q, R):
    """One application of the Riccati operator to P."""
    PB = P @ B
    inner = R + B.T @ PB
    try:
        gain_term = np.linalg.solve(inner, PB.T @ A)
    except np.linalg.LinAlgError:
        raise SingularInnerMatrix("R + B^T P B is singular") from None
    return symmetrize(A.T @ P @ A - A.T @ PB @ gain_term + Q)


def dare_residual(P, A, B, Q, R):
    """Spectral norm of ``X - A^T X A + A^T X B (R + B^T X B)^-1 B^T X A - Q`` at X = P."""
    P = as_matrix(P, "P")
    A, B, Q, R = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (A, B, Q, R))
    PB = P @ B
    inner = R + B.T @ PB
    if np.linalg.matrix_rank(inner) < inner.shape[0]:
        raise SingularInnerMatrix("R + B^T P B is singular")
    F = P - A.T @ P @ A + A.T @ PB @ np.linalg.solve(inner, PB.T @ A) - Q
    return norm2(F)


def _fixed_point(P, A, B, Q, R, tol, max_iter):
    for it in range(max_iter):
        nxt = riccati_map(P, A, B, Q, R)
        if not np.all(np.isfinite(nxt)) or np.max(np.abs(nxt)) > 1e150:
            raise NonConvergence(f"Riccati iterates diverged after {it} steps; (A, B) may not be stabilizable")
        # Frobenius >= spectral, so this test is conservative
        if np.linalg.norm(P - nxt) <= tol * max(1.0, norm2(P)):
            return P, it
        P = nxt
    raise NonConvergence(f"Riccati iteration did not reach tol={tol:g} in {max_iter} steps")


def _doubling(A, B, Q, R, tol, max_iter):
    n = A.shape[0]
    I = np.eye(n)
    Ak = A.copy()
    G = symmetrize(B @ np.linalg.solve(R, B.T))
    H = Q.copy()
    for it in range(max(1, min(max_iter, 100))):
        W = I + G @ H
        try:
            WA = np.linalg.solve(W, Ak)
            WG = np.linalg.solve(W, G)
        except np.linalg.LinAlgError:
            raise NonConvergence("singular step in structured doubling") from None
        H_next = symmetrize(H + Ak.T @ H @ WA)
        G = symmetrize(G + Ak @ WG @ Ak.T)
        Ak = Ak @ WA
        if not np.all(np.isfinite(H_next)) or np.max(np.abs(H_next)) > 1e150:
            raise NonConvergence("structured doubling diverged; (A, B) may not be stabilizable")
        if np.linalg.norm(H_next - H) <= tol * max(1.0, norm2(H_next)):
            return H_next, it + 1
        H = H_next
    raise NonConvergence("structured doubling did not converge")


def solve_dare(A, B, Q, R, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, method="fixed_point"):
    """Solve the discrete algebraic Riccati equation.

    ``method="fixed_point"`` iterates the Riccati map from ``P = Q``;
    ``method="doubling"`` runs structured doubling and then polishes with a
    few fixed-point steps so the same residual contract holds.

    Raises NonConvergence when the budget is exhausted or iterates blow up,
    and BadInput for non-symmetric or non-definite Q/R.
    """
    A, B, Q, R = _check_dare_inputs(A, B, Q, R)
    if method == "fixed_point":
        P, iters = _fixed_point(Q.copy(), A, B, Q, R, tol, max_iter)
    elif method == "doubling":
        P0, iters = _doubling(A, B, Q, R, tol, max_iter)
        P, extra = _fixed_point(P0, A, B, Q, R, tol, max_iter)
        iters += extra
    else:
        raise ValueError(f"unknown method {method!r}")
    P = symmetrize(P)
    return DareSolution(P=P, residual_norm=dare_residual(P, A, B, Q, R), iterations=iters)


def solve_dlyap(A, Q, transpose=False):
    """Solve ``P = A P A^T + Q`` (or ``P = A^T P A + Q`` with ``transpose=True``)."""
    A = as_matrix(A, "A")
    Q = as_matrix(Q, "Q", shape=A.shape)
    rho = spectral_radius(A)
    if rho >= 1.0:
        raise Unstable(f"spectral radius {rho:.6g} >= 1; the Lyapunov series diverges")
    M = A.T if transpose else A
    return symmetrize(scipy.linalg.solve_discrete_lyapunov(M, Q))


def growth_rate_tau(L, rho, k_max=DEFAULT_K_MAX):
    """Scan ``||L^k|| rho^-k`` for k = 0..k_max and return the running maximum."""
    L = as_matrix(L, "L")
    if rho <= 0:
        raise BadInput("rho must be positive")
    sr = spectral_radius(L)
    if rho < sr * (1.0 - 1e-12):
        raise Diverging(f"rho={rho:.6g} is below the spectral radius {sr:.6g}")
    M = L / rho
    power = np.eye(L.shape[0])
    tau = 1.0
    for k in range(1, k_max + 1):
        power = power @ M
        term = norm2(power)
        if term <= 1.0:
            return GrowthRate(tau=tau, rho=rho, k_truncation=k, tail_certified=True)
        tau = max(tau, term)
    return GrowthRate(tau=tau, rho=rho, k_truncation=k_max, tail_certified=False)


def reduce_to_identity_cost(A, B, R):
    """Return ``B L^-T`` with ``R = L L^T``; the Riccati solution is unchanged with R replaced by I."""
    B = as_matrix(B, "B")
    R = as_matrix(R, "R")
    try:
        chol = np.linalg.cholesky(symmetrize(R))
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("R is not positive definite") from None
    return scipy.linalg.solve_triangular(chol, B.T, lower=True).T
