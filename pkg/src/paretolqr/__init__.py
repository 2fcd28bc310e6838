"""Pareto-front approximation for multi-objective discrete-time LQR.

Linear scalarization over an epsilon-net of the weight simplex, Riccati
perturbation diagnostics, and a certainty-equivalence pipeline for
estimated dynamics.
"""
from .errors import LQRError
from .kernels import BACKEND
from .lqr import (
    CostObjective,
    DynamicsModel,
    MultiObjectiveProblem,
    cost_difference_exact,
    cost_vector,
    cost_via_gramian,
    cost_via_value,
    load_problem,
    optimal_gain,
    save_problem,
    simulate_cost,
)
from .pareto import (
    ParetoFrontApprox,
    approximate_front,
    brute_force_front,
    dominance_filter,
    dominates,
    front_distance,
    verify_lifting,
)
from .scalarization import ParetoPoint, WeightNet, combine_costs, epsilon_net, nearest_net_point, solve_scalarized
from .solvers import (
    DareSolution,
    GrowthRate,
    dare_residual,
    growth_rate_tau,
    is_stabilizing,
    reduce_to_identity_cost,
    solve_dare,
    solve_dlyap,
    spectral_radius,
)

__version__ = "0.1.0"
