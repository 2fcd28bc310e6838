"""Command-line interface.

    paretolqr solve PROBLEM [--weight 0.5,0.5]
    paretolqr front PROBLEM --epsilon 0.1 [--format csv|json] [--out FILE]
    paretolqr sensitivity PROBLEM [--epsilon 0.1] [--seed 0]
    paretolqr ce PROBLEM --dyn-epsilon 1e-3 | --identify
    paretolqr demo-pendulum [--out FILE]
    paretolqr verify [PROBLEM]

PROBLEM is a JSON file (fields ``A``, ``B``, ``objectives``) or ``@name``
for a built-in problem (``@sys0``, ``@golden``, ``@sys2``, ``@pendulum``).

Exit codes: 0 success, 1 failed verification, 2 bad input, 3 solver failure.
"""
import argparse
import sys
from pathlib import Path

import numpy as np

from . import problems, reports
from .certainty import ce_error_report, ce_front, identify_dynamics, perturb_dynamics
from .errors import BadInput, LQRError
from .lqr import cost_difference_exact, cost_via_value, load_problem, optimal_gain, save_problem
from .pareto import (
    approximate_front,
    brute_force_front,
    coverage_gap,
    dominance_filter,
    scalar_gain_grid,
    verify_lifting,
)
from .scalarization import as_weight, combine_costs, solve_scalarized
from .sensitivity import empirical_dare_sensitivity, estimate_margins, gamma_constant
from .solvers import is_stabilizing

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3
PENDULUM_EPSILON = 10**-1.5


def read_problem(spec):
    if spec.startswith("@"):
        try:
            return problems.NAMED[spec[1:]]()
        except KeyError:
            raise BadInput(f"unknown built-in problem {spec!r}; choose from {sorted(problems.NAMED)}") from None
    try:
        return load_problem(spec)
    except OSError as exc:
        raise BadInput(str(exc)) from None


def parse_weight(text, m):
    try:
        w = [float(x) for x in text.split(",")]
    except ValueError:
        raise BadInput(f"cannot parse weight {text!r}") from None
    return as_weight(w, m)


def emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args):
    problem = read_problem(args.problem)
    if args.weight:
        w = parse_weight(args.weight, problem.m)
    elif problem.m == 1:
        w = np.ones(1)
    else:
        w = np.full(problem.m, 1.0 / problem.m)
    point = solve_scalarized(problem, w)
    report = {
        "schema": reports.SCHEMA,
        "w": point.w,
        "K": point.K,
        "P": point.P.P,
        "losses": point.losses,
        "scalarized_loss": point.scalarized_loss,
        "dare_residual": point.P.residual_norm,
        "iterations": point.P.iterations,
    }
    emit(reports.dumps(report), args.out)
    return EXIT_OK


def cmd_front(args):
    problem = read_problem(args.problem)
    front = approximate_front(problem, args.epsilon, workers=args.workers)
    text = reports.front_csv(front) if args.format == "csv" else reports.dumps(reports.front_dict(front))
    emit(text, args.out)
    print(f"points: {len(front)} of {len(front.net)}", file=sys.stderr)
    if not front.complete:
        print(f"warning: {len(front.failures)} weights failed; front is incomplete", file=sys.stderr)
    return EXIT_OK


def cmd_sensitivity(args):
    problem = read_problem(args.problem)
    front = approximate_front(problem, args.epsilon, workers=args.workers)
    margins = estimate_margins(front)
    w = parse_weight(args.weight, problem.m) if args.weight else None
    constants = gamma_constant(problem, margins, front, w=w)
    ref_w = np.array(constants.reference_w)
    study = empirical_dare_sensitivity(
        problem,
        ref_w,
        args.perturbations,
        directions=args.directions,
        seed=args.seed,
        universal_c=args.universal_c,
        constants=constants,
        margins=margins,
    )
    report = {
        "schema": reports.SCHEMA,
        "note": "theoretical bounds up to universal constant; margins sampled at net resolution",
        "margins": {
            "gamma_bar": margins.gamma_bar,
            "tau_bar": margins.tau_bar,
            "sampled_weights": margins.sampled_weights,
            "certified": margins.certified,
            "max_rho": margins.max_rho,
        },
        "constants": {
            "p_max": constants.p_max,
            "k_max": constants.k_max,
            "gamma": constants.gamma_cap,
            "c1": constants.c1,
            "c2": constants.c2,
            "c3": constants.c3,
            "c4": constants.c4,
            "r_bar": constants.r_bar,
            "reference_w": list(constants.reference_w),
            "worst_case": constants.worst_case,
        },
        "epsilons": study.epsilons,
        "empirical_dP": study.empirical_dP,
        "theoretical_bound": study.theoretical_bound,
        "slope": study.slope_loglog,
        "universal_c": study.universal_c,
        "validity_threshold": study.validity_threshold,
        "inside_validity": study.inside_validity,
    }
    emit(reports.dumps(report), args.out)
    return EXIT_OK


def cmd_ce(args):
    problem = read_problem(args.problem)
    if args.identify:
        est = identify_dynamics(
            problem.dynamics,
            excitation_std=1.0,
            horizon=args.horizon,
            rollouts=args.rollouts,
            noise_std=args.noise_std,
            seed=args.seed,
        )
    else:
        if args.dyn_epsilon is None:
            raise BadInput("ce needs --dyn-epsilon or --identify")
        est = perturb_dynamics(problem.dynamics, args.dyn_epsilon, args.seed)
    true_front = approximate_front(problem, args.epsilon, workers=args.workers)
    ce = ce_front(problem, est, args.epsilon, workers=args.workers, net=true_front.net)
    report = {"schema": reports.SCHEMA, **ce_error_report(problem, true_front, ce).to_dict()}
    emit(reports.dumps(report), args.out)
    return EXIT_OK


def normalize_losses(losses):
    """Affine map of each objective from [min, max] over the front onto [0, 1]."""
    losses = np.asarray(losses, dtype=float)
    lo = losses.min(axis=0)
    span = losses.max(axis=0) - lo
    span[span == 0] = 1.0
    return np.clip((losses - lo) / span, 0.0, 1.0)


def cmd_demo_pendulum(args):
    problem = problems.pendulum()
    eps = args.epsilon if args.epsilon is not None else PENDULUM_EPSILON
    front = approximate_front(problem, eps, workers=args.workers)
    norm = normalize_losses(front.losses)
    if args.save_problem:
        save_problem(problem, args.save_problem)
    plot_lines = ["w_1,w_2,loss_1_normalized,loss_2_normalized"]
    for p, l in zip(front.points, norm):
        plot_lines.append(",".join(reports._num(x) for x in (*p.w, *l)))
    plot = "\n".join(plot_lines) + "\n"
    if args.out:
        text = reports.front_csv(front) if args.format == "csv" else reports.dumps(reports.front_dict(front))
        Path(args.out).write_text(text)
        plot_path = args.plot_out or str(Path(args.out).with_suffix(".plot.csv"))
        Path(plot_path).write_text(plot)
        print(f"front: {args.out}\nplot data: {plot_path}", file=sys.stderr)
    else:
        sys.stdout.write(plot)
    print(
        f"canonical linearized pendulum, epsilon={eps:.6g}, points={len(front)}",
        file=sys.stderr,
    )
    return EXIT_OK


def run_verify(problem, epsilon=0.01, step=0.002, seed=0):
    """Sufficiency, lifting and cost-difference checks; returns a list of (name, value, threshold, ok)."""
    checks = []
    dyn = problem.dynamics
    front = approximate_front(problem, epsilon)
    if dyn.n == 1 and dyn.d == 1:
        brute = brute_force_front(problem, scalar_gain_grid(dyn, step))
        brute_losses = np.array([l for _, l in brute])
        scale = np.ptp(brute_losses, axis=0)
        scale[scale == 0] = 1.0
        gap = coverage_gap(brute_losses, front.losses, scale)
        checks.append(("sufficiency_gap", gap, 0.05, gap <= 0.05))
    worst_eig = min(verify_lifting(dyn, p.K, problem).min_eig_schur for p in front.points)
    all_feasible = all(verify_lifting(dyn, p.K, problem).feasible for p in front.points)
    checks.append(("lifting_min_eig", worst_eig, -1e-8, all_feasible))
    rng = np.random.default_rng(seed)
    worst = 0.0
    Q, R = combine_costs(problem, front.points[0].w)
    K0, _ = optimal_gain(dyn, Q, R)
    for _ in range(20):
        Ka = K0 + 0.05 * rng.standard_normal(K0.shape)
        Kb = K0 + 0.05 * rng.standard_normal(K0.shape)
        if not (is_stabilizing(dyn.A, dyn.B, Ka) and is_stabilizing(dyn.A, dyn.B, Kb)):
            continue
        exact = cost_via_value(dyn, Kb, Q, R) - cost_via_value(dyn, Ka, Q, R)
        ident = cost_difference_exact(dyn, Ka, Kb, Q, R)
        worst = max(worst, abs(exact - ident) / max(1.0, abs(exact)))
    checks.append(("cost_difference_residual", worst, 1e-8, worst <= 1e-8))
    nd = dominance_filter(front.losses, 1e-9 * (1 + np.max(np.abs(front.losses))))
    checks.append(("front_nondominated", len(front) - len(nd), 0, len(nd) == len(front)))
    return checks


def cmd_verify(args):
    problem = read_problem(args.problem)
    failed = 0
    for name, value, threshold, ok in run_verify(problem, seed=args.seed):
        print(f"{'PASS' if ok else 'FAIL'} {name}: {value:.6g} (threshold {threshold:g})")
        failed += not ok
    return EXIT_FAIL if failed else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="paretolqr", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, problem=True, epsilon=0.1):
        if problem:
            p.add_argument("problem", help="problem JSON file or @builtin")
        p.add_argument("--epsilon", type=float, default=epsilon)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="json")

    p = sub.add_parser("solve", help="single-objective or fixed-weight solve")
    common(p)
    p.add_argument("--weight", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("front", help="approximate the Pareto front over an epsilon-net")
    common(p)
    p.set_defaults(func=cmd_front)

    p = sub.add_parser("sensitivity", help="margins, constants and a perturbation sweep")
    common(p)
    p.add_argument("--weight", default=None, help="reference weight (default: nearest to the centre)")
    p.add_argument("--perturbations", type=float, nargs="+", default=[1e-2, 1e-3, 1e-4])
    p.add_argument("--directions", default="QR", help="subset of ABQR to perturb")
    p.add_argument("--universal-c", type=float, default=1.0)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("ce", help="certainty-equivalent front audited on the true dynamics")
    common(p)
    p.add_argument("--dyn-epsilon", type=float, default=None)
    p.add_argument("--identify", action="store_true")
    p.add_argument("--noise-std", type=float, default=1e-3)
    p.add_argument("--horizon", type=int, default=50)
    p.add_argument("--rollouts", type=int, default=20)
    p.set_defaults(func=cmd_ce)

    p = sub.add_parser("demo-pendulum", help="front of the canonical inverted-pendulum problem")
    common(p, problem=False, epsilon=None)
    p.add_argument("--plot-out", default=None)
    p.add_argument("--save-problem", default=None)
    p.set_defaults(func=cmd_demo_pendulum, format="csv")

    p = sub.add_parser("verify", help="sufficiency / lifting / identity checks on a scalar problem")
    p.add_argument("problem", nargs="?", default="@sys2")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    eps = getattr(args, "epsilon", None)
    if eps is not None and not 0 < eps <= 1:
        parser.error("--epsilon must lie in (0, 1]")
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be >= 1")
    try:
        return args.func(args)
    except BadInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LQRError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
