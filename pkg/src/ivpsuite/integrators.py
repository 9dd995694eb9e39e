"""Reference time integrators for exercising the problem library.

``integrate_adaptive`` is an embedded 5(4) explicit Runge-Kutta pair with
PI step control, ``integrate_fixed`` provides classic RK4 and Euler for
convergence studies, ``integrate_implicit`` is an adaptive trapezoidal
rule with modified Newton iterations for stiff problems, and
``integrate_with_events`` wraps the adaptive stepper in an event-detect /
transform / restart loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import lu_factor, lu_solve
from scipy.sparse.linalg import splu

from .errors import (
    EventStall,
    MaxStepsExceeded,
    NewtonDivergence,
    NonFiniteState,
    StepUnderflow,
    ValidationError,
)

__all__ = [
    "IntegratorOptions",
    "Trajectory",
    "Event",
    "integrate_adaptive",
    "integrate_fixed",
    "integrate_implicit",
    "integrate_with_events",
]


class Event(NamedTuple):
    time: float
    pre_state: np.ndarray
    post_state: np.ndarray


@dataclass
class IntegratorOptions:
    """Tolerances and limits shared by the adaptive steppers."""

    abs_tol: float = 1e-6
    rel_tol: float = 1e-3
    max_step: Optional[float] = None
    initial_step: Optional[float] = None
    max_steps: int = 5_000_000
    jacobian: Optional[Callable] = None
    store: str = "all"  # "all" keeps every accepted step, "last" only tf
    newton_tol_factor: float = 1e-4

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValidationError(name, "positive")
        if self.max_step is not None and not self.max_step > 0:
            raise ValidationError("max_step", "positive")
        if self.store not in ("all", "last"):
            raise ValidationError("store", "one of all, last")


@dataclass
class Trajectory:
    """Times, states, and event markers produced by one integration run."""

    times: np.ndarray
    states: np.ndarray
    events: list = field(default_factory=list)
    status: str = "complete"
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if self.states.shape[0] != self.times.shape[0]:
            raise ValueError("state rows must match times")


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) tableau

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_E = np.array(
    [
        71 / 57600,
        0.0,
        -71 / 16695,
        71 / 1920,
        -17253 / 339200,
        22 / 525,
        -1 / 40,
    ]
)

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0


def _weighted_error(err_vec, y_old, y_new, atol, rtol):
    scale = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.max(np.abs(err_vec) / scale))


def _initial_step_size(f, t0, tf, y0, f0, atol, rtol, order, max_step):
    span = tf - t0
    if not np.any(f0):
        # quadrature-free RHS: one step covers the span
        return span if max_step is None else min(span, max_step)
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.linalg.norm(y0 / scale))
    d1 = float(np.linalg.norm(f0 / scale))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = float(np.linalg.norm((f1 - f0) / scale)) / h0
    dmax = max(d1, d2)
    h1 = (0.01 / dmax) ** (1.0 / order) if dmax > 1e-15 else max(1e-6, h0 * 1e-3)
    h = min(100.0 * h0, h1, span)
    if max_step is not None:
        h = min(h, max_step)
    return h


def _dp54_steps(f, t0, tf, y0, options):
    """Generator of accepted steps (t, y, f, t_new, y_new, f_new)."""
    atol, rtol = options.abs_tol, options.rel_tol
    t = t0
    y = np.array(y0, dtype=float)
    k0 = np.asarray(f(t, y), dtype=float)
    h = options.initial_step or _initial_step_size(
        f, t0, tf, y, k0, atol, rtol, 5, options.max_step
    )
    if options.max_step is not None:
        h = min(h, options.max_step)
    h = min(h, tf - t)
    err_prev = None
    stages = [k0] + [np.empty_like(k0) for _ in range(6)]
    naccept = nreject = 0
    span_scale = max(abs(t0), abs(tf))

    while t < tf:
        if naccept + nreject >= options.max_steps:
            raise MaxStepsExceeded(options.max_steps)
        if h < 16.0 * np.finfo(float).eps * max(abs(t), span_scale):
            raise StepUnderflow(t, h)
        # stretch marginally onto tf so no rounding sliver remains
        if t + 1.0001 * h >= tf:
            h = tf - t
            last = True
        else:
            last = False

        for i in range(1, 7):
            yi = y + h * (_DP_A[i] @ stages[:i])
            stages[i] = np.asarray(f(t + _DP_C[i] * h, yi), dtype=float)
        t_new = tf if last else t + h
        y_new = yi  # stage 7 is evaluated at the 5th-order solution (FSAL)
        err_vec = h * (_DP_E @ stages)
        finite = np.all(np.isfinite(y_new)) and np.all(np.isfinite(err_vec))
        err = _weighted_error(err_vec, y, y_new, atol, rtol) if finite else np.inf

        if err <= 1.0:
            naccept += 1
            f_new = stages[6]
            yield t, y, stages[0], t_new, y_new, f_new
            t, y = t_new, y_new
            stages[0] = f_new
            if err == 0.0:
                fac = _FAC_MAX
            elif err_prev is None:
                fac = _SAFETY * err ** (-0.2)
            else:
                fac = _SAFETY * err ** (-0.14) * err_prev**0.08
            err_prev = max(err, 1e-10)
            h *= min(_FAC_MAX, max(_FAC_MIN, fac))
        else:
            nreject += 1
            fac = _SAFETY * err ** (-0.2) if np.isfinite(err) else 0.1
            h *= min(1.0, max(_FAC_MIN, fac))
        if options.max_step is not None:
            h = min(h, options.max_step)

    # expose counts to the caller through the generator's return value
    return {"naccept": naccept, "nreject": nreject}


def _resolve_span(problem, time_span):
    span = time_span if time_span is not None else problem.time_span
    return float(span[0]), float(span[1])


def integrate_adaptive(problem, options=None, time_span=None, y0=None):
    """Embedded 5(4) pair with PI step control; rows at accepted steps."""
    options = options or IntegratorOptions()
    t0, tf = _resolve_span(problem, time_span)
    start = np.array(problem.y0 if y0 is None else y0, dtype=float)
    f = problem.rhs.f

    times = [t0]
    rows = [start.copy()]
    gen = _dp54_steps(f, t0, tf, start, options)
    stats = {}
    try:
        while True:
            _, _, _, t_new, y_new, _ = next(gen)
            if options.store == "all":
                times.append(t_new)
                rows.append(y_new.copy())
            else:
                times[1:] = [t_new]
                rows[1:] = [y_new.copy()]
    except StopIteration as stop:
        stats = stop.value or {}
    return Trajectory(
        times=np.array(times),
        states=np.vstack(rows),
        status="complete",
        stats=stats,
    )


def integrate_fixed(problem, step_count, method="rk4", time_span=None, y0=None):
    """Classic fixed-step RK4 or explicit Euler, no error control."""
    if step_count < 1:
        raise ValidationError("step_count", "positive")
    if method not in ("rk4", "euler"):
        raise ValidationError("method", "one of rk4, euler")
    t0, tf = _resolve_span(problem, time_span)
    f = problem.rhs.f
    h = (tf - t0) / step_count
    y = np.array(problem.y0 if y0 is None else y0, dtype=float)
    times = np.empty(step_count + 1)
    states = np.empty((step_count + 1, len(y)))
    times[0] = t0
    states[0] = y
    for k in range(step_count):
        t = t0 + k * h
        if method == "euler":
            y = y + h * np.asarray(f(t, y), dtype=float)
        else:
            k1 = np.asarray(f(t, y), dtype=float)
            k2 = np.asarray(f(t + 0.5 * h, y + 0.5 * h * k1), dtype=float)
            k3 = np.asarray(f(t + 0.5 * h, y + 0.5 * h * k2), dtype=float)
            k4 = np.asarray(f(t + h, y + h * k3), dtype=float)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(t + h)
        times[k + 1] = tf if k == step_count - 1 else t0 + (k + 1) * h
        states[k + 1] = y
    return Trajectory(times=times, states=states, status="complete",
                      stats={"naccept": step_count, "nreject": 0})


# ---------------------------------------------------------------------------
# implicit trapezoidal rule


class _NewtonMatrix:
    """LU factors of I - gamma*h*J for dense or sparse Jacobians."""

    def __init__(self, jac, gamma_h):
        n = jac.shape[0]
        if sp.issparse(jac):
            m = (sp.identity(n) - gamma_h * jac).tocsc()
            self._solver = splu(m).solve
        else:
            m = np.eye(n) - gamma_h * np.asarray(jac)
            factors = lu_factor(m)
            self._solver = lambda b: lu_solve(factors, b)

    def solve(self, b):
        return self._solver(b)


def _fd_jacobian(f, t, y, f0):
    """Forward-difference Jacobian fallback, columnwise."""
    n = len(y)
    jac = np.empty((n, n))
    for j in range(n):
        h = math.sqrt(np.finfo(float).eps) * max(1.0, abs(y[j]))
        yp = y.copy()
        yp[j] += h
        jac[:, j] = (np.asarray(f(t, yp), dtype=float) - f0) / h
    return jac


def integrate_implicit(problem, options=None, time_span=None, y0=None):
    """Adaptive trapezoidal rule with modified Newton iterations.

    A-stable; consumes the problem's Jacobian (or a forward-difference
    fallback).  The local error estimate compares the corrector against a
    variable-step Adams-Bashforth predictor and is filtered through the
    Newton matrix so stiff components do not trigger spurious rejections.
    """
    options = options or IntegratorOptions()
    t0, tf = _resolve_span(problem, time_span)
    y = np.array(problem.y0 if y0 is None else y0, dtype=float)
    f = problem.rhs.f
    jac_fn = options.jacobian or problem.rhs.jacobian
    atol, rtol = options.abs_tol, options.rel_tol

    fn = np.asarray(f(t0, y), dtype=float)
    h = options.initial_step or _initial_step_size(
        f, t0, tf, y, fn, atol, rtol, 3, options.max_step
    )
    if options.max_step is not None:
        h = min(h, options.max_step)
    h = min(h, tf - t0)

    t = t0
    times = [t0]
    rows = [y.copy()]
    f_prev = None
    h_prev = None
    err_prev = None
    naccept = nreject = 0
    newton_total = 0
    newton_max = 0
    span_scale = max(abs(t0), abs(tf))
    nfail = 0

    while t < tf:
        if naccept + nreject >= options.max_steps:
            raise MaxStepsExceeded(options.max_steps)
        if h < 16.0 * np.finfo(float).eps * max(abs(t), span_scale):
            raise StepUnderflow(t, h)
        if t + 1.0001 * h >= tf:
            h = tf - t
            last = True
        else:
            last = False
        t_new = tf if last else t + h

        jac = jac_fn(t, y) if jac_fn is not None else _fd_jacobian(f, t, y, fn)
        matrix = _NewtonMatrix(jac, 0.5 * h)

        if f_prev is not None:
            r = h / h_prev
            y_guess = y + h * ((1.0 + 0.5 * r) * fn - 0.5 * r * f_prev)
        else:
            y_guess = y + h * fn

        rhs_const = y + 0.5 * h * fn
        scale = atol + rtol * np.abs(y)
        newton_tol = options.newton_tol_factor * float(np.min(scale))
        converged = False
        y_it = y_guess
        f_end = None
        solves = 0
        for _ in range(8):
            f_end = np.asarray(f(t_new, y_it), dtype=float)
            residual = y_it - 0.5 * h * f_end - rhs_const
            rnorm = float(np.max(np.abs(residual)))
            if not math.isfinite(rnorm):
                break
            if rnorm <= newton_tol:
                converged = True
                break
            y_it = y_it - matrix.solve(residual)
            solves += 1
        newton_total += solves
        newton_max = max(newton_max, solves)

        if not converged:
            nfail += 1
            if nfail > 15:
                raise NewtonDivergence(t, h)
            h *= 0.25
            nreject += 1
            continue
        nfail = 0

        y_new = y_it
        if f_prev is not None:
            # Milne-style estimate from the predictor-corrector difference
            r = h / h_prev
            est = (y_new - y_guess) / (3.0 * (1.0 + 1.0 / r))
        else:
            est = 0.5 * h * (f_end - fn)
        est = matrix.solve(est)  # damp stiff components of the estimate
        err = _weighted_error(est, y, y_new, atol, rtol)
        if not math.isfinite(err):
            err = np.inf
        if f_prev is not None and err <= 1.0:
            # local extrapolation: the filtered estimate is the leading
            # local error term, and subtracting it keeps |R(inf)| < 1
            y_new = y_new - est

        if err <= 1.0:
            naccept += 1
            f_prev, h_prev = fn, h
            t, y, fn = t_new, y_new, f_end
            if options.store == "all":
                times.append(t)
                rows.append(y.copy())
            else:
                times[1:] = [t]
                rows[1:] = [y.copy()]
            if err == 0.0:
                fac = _FAC_MAX
            elif err_prev is None:
                fac = _SAFETY * err ** (-1.0 / 3.0)
            else:
                fac = _SAFETY * err ** (-0.7 / 3.0) * err_prev ** (0.4 / 3.0)
            err_prev = max(err, 1e-10)
            h *= min(_FAC_MAX, max(_FAC_MIN, fac))
        else:
            nreject += 1
            fac = _SAFETY * err ** (-1.0 / 3.0) if np.isfinite(err) else 0.1
            h *= min(1.0, max(_FAC_MIN, fac))
        if options.max_step is not None:
            h = min(h, options.max_step)

    return Trajectory(
        times=np.array(times),
        states=np.vstack(rows),
        status="complete",
        stats={
            "naccept": naccept,
            "nreject": nreject,
            "newton_iterations": newton_total,
            "newton_max_per_step": newton_max,
        },
    )


# ---------------------------------------------------------------------------
# event loop


def _hermite(t, ta, ya, fa, tb, yb, fb):
    h = tb - ta
    theta = (t - ta) / h
    return (
        (1.0 - theta) * ya
        + theta * yb
        + theta * (theta - 1.0)
        * ((1.0 - 2.0 * theta) * (yb - ya) + (theta - 1.0) * h * fa + theta * h * fb)
    )


def _crossed(ga, gb, direction):
    if direction < 0:
        return ga > 0.0 and gb <= 0.0
    if direction > 0:
        return ga < 0.0 and gb >= 0.0
    return (ga > 0.0 and gb <= 0.0) or (ga < 0.0 and gb >= 0.0)


def integrate_with_events(problem, options=None, time_span=None, y0=None):
    """Adaptive integration with event location, transform, and restart.

    Accepted steps are scanned on a dense sample of the local Hermite
    interpolant; a sign change is refined by bisection to a time
    tolerance of 1e-12 of the span.  The event transform is applied to
    the located state and integration restarts from it, until the final
    time or a terminal flag.
    """
    options = options or IntegratorOptions()
    event = problem.rhs.event
    transform = problem.rhs.event_transform
    if event is None or transform is None:
        raise ValidationError("event", "defined for event integration")
    direction = problem.rhs.event_direction

    t0, tf = _resolve_span(problem, time_span)
    span = tf - t0
    time_tol = 1e-12 * span
    stall_tol = 1e-10 * span
    y = np.array(problem.y0 if y0 is None else y0, dtype=float)

    times = [t0]
    rows = [y.copy()]
    events = []
    t_cur = t0
    last_event_t = None
    status = "complete"
    samples = 8
    total_stats = {"naccept": 0, "nreject": 0}

    while t_cur < tf:
        gen = _dp54_steps(problem.rhs.f, t_cur, tf, y, options)
        hit = None
        try:
            while True:
                ta, ya, fa, tb, yb, fb = next(gen)
                g_lo = event(ta, ya)
                t_lo = ta
                found = False
                for k in range(1, samples + 1):
                    t_hi = ta + (tb - ta) * k / samples
                    y_hi = yb if k == samples else _hermite(t_hi, ta, ya, fa, tb, yb, fb)
                    g_hi = event(t_hi, y_hi)
                    if _crossed(g_lo, g_hi, direction):
                        found = True
                        break
                    t_lo, g_lo = t_hi, g_hi
                if not found:
                    times.append(tb)
                    rows.append(yb.copy())
                    continue
                while t_hi - t_lo > time_tol:
                    t_mid = 0.5 * (t_lo + t_hi)
                    g_mid = event(t_mid, _hermite(t_mid, ta, ya, fa, tb, yb, fb))
                    if _crossed(g_lo, g_mid, direction):
                        t_hi = t_mid
                    else:
                        t_lo, g_lo = t_mid, g_mid
                t_star = 0.5 * (t_lo + t_hi)
                y_star = _hermite(t_star, ta, ya, fa, tb, yb, fb)
                hit = (t_star, y_star)
                break
        except StopIteration as stop:
            for key, val in (stop.value or {}).items():
                total_stats[key] = total_stats.get(key, 0) + val

        if hit is None:
            break
        t_star, y_star = hit
        if last_event_t is not None and t_star - last_event_t < stall_tol:
            raise EventStall(t_star)
        last_event_t = t_star
        y_post, terminal = transform(t_star, y_star)
        y_post = np.asarray(y_post, dtype=float)
        events.append(Event(t_star, y_star.copy(), y_post.copy()))
        if t_star > times[-1]:
            times.append(t_star)
            rows.append(y_star.copy())
        t_cur = t_star
        y = y_post
        if terminal:
            status = "terminated_by_event"
            break

    total_stats["n_events"] = len(events)
    return Trajectory(
        times=np.array(times),
        states=np.vstack(rows),
        events=events,
        status=status,
        stats=total_stats,
    )
