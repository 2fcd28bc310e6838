"""Riccati sensitivity: closed-form bounds, sampled stability margins,
contraction constants and empirical perturbation studies.

Every theoretical bound carries an unspecified universal constant; it is
exposed as ``universal_c`` (default 1) and reports say so.
"""
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import BadInput, DegenerateB, DegenerateBWarning, LQRError, UnstablePoint
from .pareto import ParetoFrontApprox
from .scalarization import WeightNet, as_weight, combine_costs, solve_scalarized
from .solvers import growth_rate_tau, min_eig_sym, norm2, solve_dare, spectral_radius, symmetrize

MARGIN_CAP = 1.0 - 1e-6


@dataclass(frozen=True)
class StabilityMargins:
    """Sampled at net resolution: ``gamma_bar`` caps every sampled closed-loop
    spectral radius and ``tau_bar`` every sampled growth rate at ``gamma_bar``."""

    gamma_bar: float
    tau_bar: float
    sampled_weights: int
    certified: bool
    max_rho: float = math.nan


@dataclass(frozen=True)
class SensitivityConstants:
    p_max: float
    k_max: float
    gamma_cap: float
    c1: float
    c2: float
    c3: float
    c4: float
    r_bar: float
    # quantities at the reference weight, needed by the perturbation bound
    reference_w: tuple = ()
    a_norm: float = 0.0
    b_norm: float = 0.0
    p_norm: float = 0.0
    l_norm: float = 0.0
    s_norm: float = 0.0
    tau: float = 1.0
    worst_case: dict = field(default_factory=dict)


@dataclass
class PerturbationReport:
    epsilons: list
    empirical_dP: list
    theoretical_bound: list
    slope_loglog: float
    universal_c: float = 1.0
    validity_threshold: float = math.nan
    inside_validity: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    note: str = "theoretical bound up to universal constant"


def _lam_max(M):
    return float(np.linalg.eigvalsh(symmetrize(M))[-1])


def _lam_min(M):
    return min_eig_sym(M)


def p_max_bound(problem, strict=False):
    """Closed-form upper bound on ``||dare(A, B, Q_w, R_w)||`` over the whole simplex.

    Returns ``inf`` (with a DegenerateBWarning) when ``B (sum_j R_j)^-1 B^T``
    is singular; ``strict=True`` raises DegenerateB instead.
    """
    A, B, m = problem.dynamics.A, problem.dynamics.B, problem.m
    denom = _lam_min(B @ np.linalg.solve(sum(problem.Rs), B.T))
    if denom <= 1e-14 * max(1.0, norm2(B) ** 2):
        msg = "B (sum_j R_j)^-1 B^T is singular; the Riccati bound is infinite"
        if strict:
            raise DegenerateB(msg)
        warnings.warn(msg, DegenerateBWarning, stacklevel=2)
        return math.inf
    lam_n = max(_lam_min(B @ np.linalg.solve(R, B.T)) for R in problem.Rs)
    lam_q = max(_lam_max(Q) for Q in problem.Qs)
    a_bar = 1.0 + _lam_max(A @ A.T) + m * m * lam_q * lam_n
    return (math.sqrt(a_bar**2 + 4 * m * m * lam_n * lam_q) + a_bar) / (2.0 * denom)


def k_max_bound(problem, p_max=None, strict=False):
    if p_max is None:
        p_max = p_max_bound(problem, strict=strict)
    A, B, m = problem.dynamics.A, problem.dynamics.B, problem.m
    r_inv = max(norm2(np.linalg.inv(R)) for R in problem.Rs)
    scale = m * r_inv * norm2(B) * norm2(A)
    if scale == 0.0:
        return 0.0
    return scale * p_max


def estimate_margins(front, rho_slack=None, k_max=500):
    """Empirical ``gamma_bar`` / ``tau_bar`` over the solved net.

    ``rho_slack`` defaults to ``0.05 * (1 - max sampled rho)``.
    """
    if not front.points:
        raise BadInput("front has no points")
    loops = [front.dynamics.closed_loop(p.K) for p in front.points]
    rhos = [spectral_radius(L) for L in loops]
    max_rho = max(rhos)
    if max_rho >= 1.0:
        raise UnstablePoint(f"a front gain has closed-loop spectral radius {max_rho:.6g}")
    if rho_slack is None:
        rho_slack = 0.05 * (1.0 - max_rho)
    gamma_bar = min(MARGIN_CAP, max_rho + rho_slack)
    taus = [growth_rate_tau(L, gamma_bar, k_max) for L in loops]
    return StabilityMargins(
        gamma_bar=gamma_bar,
        tau_bar=max(t.tau for t in taus),
        sampled_weights=len(loops),
        certified=all(t.tail_certified for t in taus),
        max_rho=max_rho,
    )


def contraction_constants(L, rho, S, A, B, P, r_bar, k_max=500):
    """Contraction constants ``(C1, C2, C3, C4)`` of the Riccati fixed-point map."""
    tau = growth_rate_tau(L, rho, k_max).tau
    lyap = tau**2 / (1.0 - rho**2)
    a_p, b_p, p_p = norm2(A) + 1.0, norm2(B) + 1.0, norm2(P) + 1.0
    c1 = lyap * norm2(L) ** 2 * norm2(S)
    c2 = 8.0 * lyap * a_p**2 * p_p**2 * b_p**2 * r_bar**2
    c4 = 44.0 * lyap * p_p**3 * a_p**2 * b_p**5 * r_bar**3
    return c1, c2, 3.0 * c1, c4


def _reference_point(front, w):
    if w is None:
        center = np.full(front.net.m, 1.0 / front.net.m)
        dists = [np.abs(p.w - center).sum() for p in front.points]
        return front.points[int(np.argmin(dists))]
    w = as_weight(w, front.net.m)
    for p in front.points:
        if np.allclose(p.w, w, atol=1e-12):
            return p
    raise BadInput(f"weight {w} is not a solved point of the front")


def gamma_constant(problem, margins, front, w=None, k_max=500):
    """Fill Gamma from the closed-form bounds and C1..C4 at the reference weight.

    The reference defaults to the front point nearest the simplex centre;
    ``worst_case`` holds the maxima of C1..C4 over every front point.
    """
    A, B, m = problem.dynamics.A, problem.dynamics.B, problem.m
    p_max = p_max_bound(problem)
    k_max_ = k_max_bound(problem, p_max=p_max)
    r_inv = [norm2(np.linalg.inv(R)) for R in problem.Rs]
    gamma_cap = max(
        1.0 + p_max,
        1.0 + k_max_,
        norm2(A) + 1.0,
        norm2(B) + 1.0,
        max(norm2(Q) for Q in problem.Qs),
        max(norm2(R) for R in problem.Rs),
        1.0 + m * max(r_inv),
    )
    rho = margins.gamma_bar

    def at(point):
        _, R_w = combine_costs(problem, point.w)
        S = B @ np.linalg.solve(R_w, B.T)
        L = A + B @ point.K
        return L, S, point.P.P

    r_bar = 1.0 + max(norm2(np.linalg.inv(combine_costs(problem, p.w)[1])) for p in front.points)
    worst = np.zeros(4)
    for p in front.points:
        L, S, P = at(p)
        worst = np.maximum(worst, contraction_constants(L, rho, S, A, B, P, r_bar, k_max))
    ref = _reference_point(front, w)
    L, S, P = at(ref)
    c1, c2, c3, c4 = contraction_constants(L, rho, S, A, B, P, r_bar, k_max)
    return SensitivityConstants(
        p_max=p_max,
        k_max=k_max_,
        gamma_cap=gamma_cap,
        c1=c1,
        c2=c2,
        c3=c3,
        c4=c4,
        r_bar=r_bar,
        reference_w=tuple(float(x) for x in ref.w),
        a_norm=norm2(A),
        b_norm=norm2(B),
        p_norm=norm2(P),
        l_norm=norm2(L),
        s_norm=norm2(S),
        tau=growth_rate_tau(L, rho, k_max).tau,
        worst_case=dict(zip(("c1", "c2", "c3", "c4"), (float(x) for x in worst))),
    )


def dare_perturbation_bound(constants, margins, epsilon, universal_c=1.0, universal_c_threshold=1.0):
    """Riccati perturbation bound (linear in epsilon) and the epsilon below which it is valid."""
    tau, rho = margins.tau_bar, margins.gamma_bar
    lyap = tau**2 / (1.0 - rho**2)
    a_p, b_p = constants.a_norm + 1.0, constants.b_norm + 1.0
    p_p, l_p = constants.p_norm + 1.0, constants.l_norm + 1.0
    r = constants.r_bar
    bound = universal_c * lyap * a_p**2 * p_p**2 * b_p**2 * r**2 * epsilon
    threshold = (
        universal_c_threshold
        * (1.0 - rho**2) ** 4
        / tau**4
        * a_p**-2
        * p_p**-3
        * b_p**-4
        * r**-3
        * l_p**-2
    )
    return bound, threshold


def gain_perturbation_bound(constants, dP):
    """``7 Gamma^4 dP``: gain movement allowed by a Riccati-solution movement dP."""
    if dP < 0:
        raise BadInput("dP must be nonnegative")
    return 7.0 * constants.gamma_cap**4 * dP


def _unit_direction(rng, shape, symmetric):
    E = rng.standard_normal(shape)
    if symmetric:
        E = symmetrize(E)
    return E / norm2(E)


def loglog_slope(xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    ok = (xs > 0) & (ys > 0) & np.isfinite(ys)
    if ok.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(xs[ok]), np.log(ys[ok]), 1)[0])


def single_point_front(problem, w):
    point = solve_scalarized(problem, w)
    net = WeightNet(epsilon=0.0, m=problem.m, resolution=0, points=point.w[None, :])
    return ParetoFrontApprox(
        epsilon=0.0, net=net, points=[point], problem_digest=problem.digest(), indices=[0], dynamics=problem.dynamics
    )


def empirical_dare_sensitivity(
    problem,
    w,
    epsilons,
    directions="QR",
    seed=0,
    universal_c=1.0,
    constants=None,
    margins=None,
):
    """Perturb the weighted problem by matrices of spectral norm exactly eps and measure ``||P - P_eps||``.

    ``directions`` is any subset of ``"ABQR"``. One random direction per
    matrix is drawn from ``seed`` and rescaled for every eps, so the sweep
    traces a single ray. Perturbations that leave the problem unsolvable
    are recorded in ``skipped`` with ``nan`` in ``empirical_dP``.
    """
    bad = set(directions) - set("ABQR")
    if bad:
        raise BadInput(f"unknown perturbation targets {sorted(bad)}")
    w = as_weight(w, problem.m)
    A, B = problem.dynamics.A, problem.dynamics.B
    Q, R = combine_costs(problem, w)
    base = solve_dare(A, B, Q, R)
    if min_eig_sym(base.P) < 1.0 - 1e-9:
        raise BadInput("sigma_min(P) < 1; objectives must satisfy sigma_min(Q_i), sigma_min(R_i) >= 1")
    if margins is None or constants is None:
        front = single_point_front(problem, w)
        margins = margins or estimate_margins(front)
        constants = constants or gamma_constant(problem, margins, front)

    rng = np.random.default_rng(seed)
    dirs = {
        "A": _unit_direction(rng, A.shape, False),
        "B": _unit_direction(rng, B.shape, False),
        "Q": _unit_direction(rng, Q.shape, True),
        "R": _unit_direction(rng, R.shape, True),
    }
    eps_list, dPs, bounds, inside, skipped = [], [], [], [], []
    threshold = dare_perturbation_bound(constants, margins, 0.0, universal_c)[1]
    for eps in epsilons:
        eps = float(eps)
        mats = {"A": A, "B": B, "Q": Q, "R": R}
        for key in directions:
            mats[key] = mats[key] + eps * dirs[key]
        try:
            pert = solve_dare(mats["A"], mats["B"], mats["Q"], mats["R"])
            dP = norm2(base.P - pert.P)
        except LQRError as exc:
            skipped.append((eps, f"{type(exc).__name__}: {exc}"))
            dP = math.nan
        eps_list.append(eps)
        dPs.append(dP)
        bounds.append(dare_perturbation_bound(constants, margins, eps, universal_c)[0])
        inside.append(eps <= threshold)
    return PerturbationReport(
        epsilons=eps_list,
        empirical_dP=dPs,
        theoretical_bound=bounds,
        slope_loglog=loglog_slope(eps_list, dPs),
        universal_c=universal_c,
        validity_threshold=threshold,
        inside_validity=inside,
        skipped=skipped,
    )


def margins_dict(margins):
    return asdict(margins)


def constants_dict(constants):
    return asdict(constants)
