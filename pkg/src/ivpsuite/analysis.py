"""Chaos and verification analytics built on top of the integrators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateR, ErrorFloorReached, NoJacobian
from .integrators import IntegratorOptions, integrate_adaptive, integrate_fixed

__all__ = [
    "LyapunovResult",
    "ConvergenceResult",
    "lyapunov_spectrum",
    "kaplan_yorke_dimension",
    "convergence_order",
    "check_jacobian",
]


@dataclass
class LyapunovResult:
    exponents: np.ndarray  # descending, per unit time
    fractal_dimension: float
    averaging_span: tuple
    step_count: int


def kaplan_yorke_dimension(exponents) -> float:
    """k + (sum of the first k exponents) / |exponent k+1|.

    ``k`` counts the prefixes with strictly positive sum.  All prefixes
    positive gives the full phase-space dimension; none gives zero.
    """
    les = np.asarray(exponents, dtype=float)
    prefix = np.cumsum(les)
    k = int(np.sum(prefix > 0.0))
    if k == 0:
        return 0.0
    if k == len(les):
        return float(len(les))
    return float(k + prefix[k - 1] / abs(les[k]))


def lyapunov_spectrum(
    problem,
    spinup_span=None,
    averaging_span=500.0,
    tolerances=None,
    max_step=None,
) -> LyapunovResult:
    """Lyapunov exponents by QR re-orthonormalization along a trajectory.

    The problem is first integrated over ``spinup_span`` (its own time
    span by default) at everyday tolerances to land on the attractor.
    The averaging window of length ``averaging_span`` is then integrated
    at near round-off tolerance and an orthonormal frame is propagated
    across the accepted steps with the trapezoidal average of consecutive
    Jacobians, re-orthonormalized by QR with the R diagonals forced
    positive.  The log diagonals accumulate over every interval except
    the last and are divided by the window length.
    """
    jac = problem.rhs.jacobian
    if jac is None:
        raise NoJacobian(f"'{problem.name}' provides no Jacobian")

    spin_span = spinup_span if spinup_span is not None else problem.time_span
    spin = integrate_adaptive(
        problem, IntegratorOptions(store="last"), time_span=spin_span
    )
    y_start = spin.states[-1]
    t_start = spin.times[-1]

    if tolerances is None:
        tol = 100.0 * np.finfo(float).eps
        tolerances = (tol, tol)
    options = IntegratorOptions(
        abs_tol=tolerances[0], rel_tol=tolerances[1], max_step=max_step
    )
    window = (t_start, t_start + float(averaging_span))
    traj = integrate_adaptive(problem, options, time_span=window, y0=y_start)

    t, states = traj.times, traj.states
    n = states.shape[1]
    q = np.eye(n)
    les = np.zeros(n)
    jac_cur = np.asarray(jac(t[0], states[0]), dtype=float)
    m = len(t)
    for i in range(m - 2):
        dt = t[i + 1] - t[i]
        w1 = jac_cur @ q
        jac_cur = np.asarray(jac(t[i + 1], states[i + 1]), dtype=float)
        w2 = jac_cur @ q
        q, r = np.linalg.qr(q + (0.5 * dt) * (w1 + w2))
        diag = np.diagonal(r)
        if np.any(diag == 0.0):
            raise DegenerateR("zero diagonal in R during re-orthonormalization")
        signs = np.sign(diag)
        q = q * signs
        les += np.log(signs * diag)

    les /= t[-1] - t[0]
    order = np.argsort(les)[::-1]
    les = les[order]
    return LyapunovResult(
        exponents=les,
        fractal_dimension=kaplan_yorke_dimension(les),
        averaging_span=window,
        step_count=m - 1,
    )


@dataclass
class ConvergenceResult:
    order: float
    step_counts: list
    step_sizes: np.ndarray
    errors: np.ndarray


def convergence_order(problem, method, step_ladder) -> ConvergenceResult:
    """Least-squares slope of log(error) vs log(h) against the exact
    solution, over a ladder of fixed step counts."""
    step_ladder = [int(s) for s in step_ladder]
    if len(step_ladder) < 3:
        raise ValueError("need at least 3 ladder entries")
    t0, tf = problem.time_span
    exact = np.atleast_1d(np.asarray(problem.exact_solution(tf), dtype=float))
    floor = 100.0 * np.finfo(float).eps * max(1.0, float(np.linalg.norm(exact)))
    hs = []
    errors = []
    for count in step_ladder:
        traj = integrate_fixed(problem, count, method)
        err = float(np.linalg.norm(traj.states[-1] - exact))
        if err <= floor:
            raise ErrorFloorReached(
                f"error {err:.3e} at {count} steps is below round-off"
            )
        hs.append((tf - t0) / count)
        errors.append(err)
    slope = np.polyfit(np.log(hs), np.log(errors), 1)[0]
    return ConvergenceResult(
        order=float(slope),
        step_counts=step_ladder,
        step_sizes=np.array(hs),
        errors=np.array(errors),
    )


def check_jacobian(problem, sample_count=50, seed=0) -> float:
    """Worst relative row error of the hand-coded Jacobian against
    Richardson-extrapolated central differences at seeded random states."""
    jac = problem.rhs.jacobian
    if jac is None:
        raise NoJacobian(f"'{problem.name}' provides no Jacobian")
    rng = np.random.default_rng(seed)
    box = problem.extras.get("jacobian_sample_box")
    if box is None:
        width = np.maximum(1.0, np.abs(problem.y0))
        box = (problem.y0 - width, problem.y0 + width)
    lo, hi = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
    t0, tf = problem.time_span
    f = problem.rhs.f
    n = problem.num_vars
    base_h = np.finfo(float).eps ** 0.2

    worst = 0.0
    for _ in range(sample_count):
        t = rng.uniform(t0, tf)
        y = rng.uniform(lo, hi)
        analytic = jac(t, y)
        if sp.issparse(analytic):
            analytic = analytic.toarray()
        analytic = np.asarray(analytic, dtype=float)
        fd = np.empty((n, n))
        for j in range(n):
            h = base_h * max(1.0, abs(y[j]))
            e = np.zeros(n)
            e[j] = 1.0
            d1 = (f(t, y + h * e) - f(t, y - h * e)) / (2.0 * h)
            d2 = (f(t, y + 2.0 * h * e) - f(t, y - 2.0 * h * e)) / (4.0 * h)
            fd[:, j] = (4.0 * d1 - d2) / 3.0
        row_norm = np.max(np.abs(analytic), axis=1)
        scale = float(row_norm.max())
        if scale == 0.0:
            scale = 1.0
        denom = np.maximum(row_norm, 1e-3 * scale)
        err = np.max(np.abs(fd - analytic), axis=1) / denom
        worst = max(worst, float(np.max(err)))
    return worst
