import math
import warnings

import numpy as np
import pytest

from conftest import random_problem
from paretolqr.errors import DegenerateB, DegenerateBWarning
from paretolqr.lqr import CostObjective, DynamicsModel, MultiObjectiveProblem
from paretolqr.pareto import approximate_front
from paretolqr.scalarization import solve_scalarized
from paretolqr.sensitivity import (
    contraction_constants,
    dare_perturbation_bound,
    empirical_dare_sensitivity,
    estimate_margins,
    gain_perturbation_bound,
    gamma_constant,
    k_max_bound,
    p_max_bound,
    single_point_front,
)
from paretolqr.solvers import growth_rate_tau, norm2, solve_dare, spectral_radius

GOLDEN_PMAX = (math.sqrt(13) + 3) / 2


def constants_for(problem, eps=None, w=None):
    front = approximate_front(problem, eps) if eps else single_point_front(problem, w or [1.0])
    margins = estimate_margins(front)
    return front, margins, gamma_constant(problem, margins, front)


class TestBounds:
    def test_p_max_examples(self, sys0, golden):
        assert p_max_bound(sys0) == pytest.approx(1 + math.sqrt(2), rel=1e-12)
        assert p_max_bound(golden) == pytest.approx(GOLDEN_PMAX, rel=1e-12)
        assert GOLDEN_PMAX == pytest.approx(3.3028, abs=1e-4)

    def test_degenerate_b(self):
        p = MultiObjectiveProblem(
            DynamicsModel(np.diag([0.5, 0.5]), [[1.0], [0.0]]), [CostObjective(np.eye(2), [[1.0]])]
        )
        with pytest.warns(DegenerateBWarning):
            assert p_max_bound(p) == math.inf
        with pytest.raises(DegenerateB):
            p_max_bound(p, strict=True)

    def test_k_max_examples(self, sys0, golden, sys2):
        assert k_max_bound(sys0) == 0.0
        assert k_max_bound(golden) == pytest.approx(GOLDEN_PMAX, rel=1e-12)
        assert k_max_bound(sys2) == pytest.approx(2 * 0.9 * p_max_bound(sys2), rel=1e-12)

    def test_sweep_soundness_sys2(self, sys2):
        front = approximate_front(sys2, 0.01)
        assert max(norm2(p.P.P) for p in front.points) <= p_max_bound(sys2)
        assert max(norm2(p.K) for p in front.points) <= k_max_bound(sys2)

    def test_sweep_soundness_random(self, rng):
        for _ in range(5):
            p = random_problem(rng, 2, 2, 2)
            front = approximate_front(p, 0.1)
            assert max(norm2(pt.P.P) for pt in front.points) <= p_max_bound(p)
            assert max(norm2(pt.K) for pt in front.points) <= k_max_bound(p)


class TestMargins:
    def test_golden(self, golden):
        m = estimate_margins(single_point_front(golden, [1.0]))
        assert m.max_rho == pytest.approx((3 - math.sqrt(5)) / 2, rel=1e-9)
        assert m.tau_bar == 1.0 and m.certified
        assert m.gamma_bar == pytest.approx(m.max_rho + 0.05 * (1 - m.max_rho))

    def test_duplicated(self, golden):
        o = golden.objectives[0]
        dup = MultiObjectiveProblem(golden.dynamics, [o, o])
        a = estimate_margins(single_point_front(golden, [1.0]))
        b = estimate_margins(approximate_front(dup, 0.5))
        assert a.gamma_bar == pytest.approx(b.gamma_bar) and a.tau_bar == b.tau_bar

    def test_sys2(self, sys2):
        m = estimate_margins(approximate_front(sys2, 0.05))
        assert m.gamma_bar < 1 and m.tau_bar == 1.0

    def test_soundness_random(self, rng):
        p = random_problem(rng, 3, 2, 2)
        front = approximate_front(p, 0.2)
        m = estimate_margins(front)
        for pt in front.points:
            L = p.dynamics.closed_loop(pt.K)
            assert spectral_radius(L) <= m.gamma_bar
            assert growth_rate_tau(L, m.gamma_bar).tau <= m.tau_bar


class TestGamma:
    def test_sys0(self, sys0):
        _, _, c = constants_for(sys0)
        assert c.gamma_cap == pytest.approx(2 + math.sqrt(2), rel=1e-12)

    def test_golden(self, golden):
        _, _, c = constants_for(golden)
        assert c.gamma_cap == pytest.approx(1 + GOLDEN_PMAX, rel=1e-12)
        assert c.gamma_cap == pytest.approx(4.303, abs=1e-3)

    def test_monotone_in_q(self, sys2):
        _, _, base = constants_for(sys2, eps=0.5)
        scaled = MultiObjectiveProblem(
            sys2.dynamics, [CostObjective(10 * o.Q, o.R, o.label) for o in sys2.objectives]
        )
        _, _, big = constants_for(scaled, eps=0.5)
        assert big.gamma_cap >= base.gamma_cap

    def test_constants_nonnegative(self, sys2):
        _, _, c = constants_for(sys2, eps=0.2)
        assert min(c.c1, c.c2, c.c3, c.c4) >= 0 and c.gamma_cap >= 1
        assert c.c3 == pytest.approx(3 * c.c1)
        assert c.worst_case["c2"] >= c.c2


class TestContraction:
    def test_examples(self):
        c1, c2, c3, c4 = contraction_constants([[0.0]], 0.5, [[1.0]], [[0.0]], [[1.0]], [[1.0]], 2.0)
        assert c1 == 0.0 and c3 == 0.0
        assert c2 == pytest.approx(8 / 0.75 * 64)
        assert c2 == pytest.approx(682.67, abs=0.01)
        assert c4 == pytest.approx(44 / 0.75 * 8 * 1 * 32 * 8)

    def test_c3_ratio_random(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 4))
            L = rng.standard_normal((n, n))
            L *= 0.7 / max(spectral_radius(L), 1e-9)
            S = rng.standard_normal((n, n))
            S = S @ S.T
            c = contraction_constants(L, 0.8, S, rng.standard_normal((n, n)), rng.standard_normal((n, 1)), np.eye(n), 1.5)
            assert c[2] == pytest.approx(3 * c[0], rel=1e-15)


class TestPerturbationBound:
    def test_zero_and_linear(self, sys2):
        _, m, c = constants_for(sys2, eps=0.2)
        assert dare_perturbation_bound(c, m, 0.0)[0] == 0.0
        b1, t1 = dare_perturbation_bound(c, m, 1e-3)
        b2, t2 = dare_perturbation_bound(c, m, 2e-3)
        assert b2 == pytest.approx(2 * b1, rel=1e-15) and t1 == t2

    def test_a_zero_arithmetic(self, sys0):
        _, m, c = constants_for(sys0)
        bound, _ = dare_perturbation_bound(c, m, 1e-3)
        assert m.tau_bar == 1.0 and c.r_bar == pytest.approx(2.0)
        assert bound == pytest.approx(1 / (1 - m.gamma_bar**2) * 1 * 4 * 4 * 4 * 1e-3, rel=1e-12)

    def test_gain_bound(self, sys2):
        _, _, c = constants_for(sys2, eps=0.2)
        assert gain_perturbation_bound(c, 0.0) == 0.0
        c1 = type(c)(**{**c.__dict__, "gamma_cap": 1.0})
        assert gain_perturbation_bound(c1, 1.0) == 7.0

    def test_gain_bound_adjacent_weights(self, sys2):
        front, _, c = constants_for(sys2, eps=0.05)
        pts = sorted(front.points, key=lambda p: p.w[0])
        for a, b in zip(pts, pts[1:]):
            dK = norm2(a.K - b.K)
            assert dK <= gain_perturbation_bound(c, norm2(a.P.P - b.P.P))


class TestEmpirical:
    def test_zero_epsilon(self, golden):
        rep = empirical_dare_sensitivity(golden, [1.0], [0.0])
        assert rep.empirical_dP == [0.0]

    def test_golden_slope(self, golden):
        rep = empirical_dare_sensitivity(golden, [1.0], [1e-2, 1e-3, 1e-4], directions="Q")
        assert 0.9 <= rep.slope_loglog <= 1.1

    def test_inside_validity_bounded(self, golden):
        rep = empirical_dare_sensitivity(golden, [1.0], np.logspace(-2, -10, 9), directions="QR", universal_c=100.0)
        assert any(rep.inside_validity)
        for dP, bound, inside in zip(rep.empirical_dP, rep.theoretical_bound, rep.inside_validity):
            if inside:
                assert dP <= bound

    def test_random_slopes(self, rng):
        for _ in range(5):
            n = int(rng.integers(2, 7))
            p = random_problem(rng, n, n, 2)
            rep = empirical_dare_sensitivity(p, [0.5, 0.5], [1e-2, 1e-3, 1e-4], directions="ABQR", seed=3)
            assert 0.8 <= rep.slope_loglog <= 1.2

    def test_seed_determinism(self, sys2):
        a = empirical_dare_sensitivity(sys2, [0.5, 0.5], [1e-3, 1e-4], seed=5)
        b = empirical_dare_sensitivity(sys2, [0.5, 0.5], [1e-3, 1e-4], seed=5)
        assert a.empirical_dP == b.empirical_dP


def test_gain_inheritance(rng):
    checked = 0
    for _ in range(10):
        p = random_problem(rng, 2, 2, 1, a_scale=0.8)
        o = p.objectives[0]
        A, B = p.dynamics.A, p.dynamics.B
        front = single_point_front(p, [1.0])
        margins = estimate_margins(front)
        consts = gamma_constant(p, margins, front)
        gamma = margins.gamma_bar
        K, P = front.points[0].K, front.points[0].P.P
        tau = growth_rate_tau(A + B @ K, gamma).tau
        E = rng.standard_normal(o.Q.shape)
        E = (E + E.T) / 2
        E /= norm2(E)
        limit = (1 - gamma) / (2 * tau * norm2(B))
        eps = 1e-3
        while True:
            P2 = solve_dare(A, B, o.Q + eps * E, o.R).P
            if 7 * consts.gamma_cap**4 * norm2(P - P2) <= limit:
                break
            eps /= 10
        K2 = -np.linalg.solve(o.R + B.T @ P2 @ B, B.T @ P2 @ A)
        assert growth_rate_tau(A + B @ K2, (1 + gamma) / 2).tau <= tau + 1e-12
        checked += 1
    assert checked == 10
