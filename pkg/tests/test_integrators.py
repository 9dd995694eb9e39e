"""Adaptive, fixed-step, implicit, and event-driven integration."""

import numpy as np
import pytest

import ivpsuite as ivp
from ivpsuite.integrators import IntegratorOptions

EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# adaptive


def test_adaptive_dahlquist_tight_tolerance():
    problem = ivp.build_preset("linear")
    traj = ivp.integrate_adaptive(
        problem, IntegratorOptions(abs_tol=1e-10, rel_tol=1e-10)
    )
    assert abs(traj.states[-1, 0] - np.exp(-1.0)) <= 1e-8


def test_adaptive_zero_rhs_single_step():
    problem = ivp.build_preset("linear", "Canonical", {"A": np.zeros((2, 2))})
    problem.y0 = [3.0, -4.0]
    traj = ivp.integrate_adaptive(problem)
    assert traj.stats["naccept"] == 1
    assert np.array_equal(traj.states[-1], [3.0, -4.0])
    assert traj.times[0] == 0.0 and traj.times[-1] == 1.0


def test_adaptive_lorenz63_stays_in_trapping_region():
    problem = ivp.build_preset("lorenz63")
    traj = ivp.integrate_adaptive(problem)
    assert np.max(np.abs(traj.states)) <= 100.0
    assert traj.times[0] == problem.time_span[0]
    assert traj.times[-1] == problem.time_span[1]


def test_adaptive_tolerance_ladder_monotone():
    problem = ivp.build_preset("linear")
    exact = np.exp(-1.0)
    errors = []
    for tol in [1e-4, 5e-5, 2.5e-5, 1.25e-5, 1e-6, 5e-7, 1e-8, 5e-9, 1e-10]:
        traj = ivp.integrate_adaptive(
            problem, IntegratorOptions(abs_tol=tol, rel_tol=tol)
        )
        errors.append(abs(traj.states[-1, 0] - exact))
    for a, b in zip(errors, errors[1:]):
        assert b <= 2.0 * a + 1e-15


def test_adaptive_max_step_respected():
    problem = ivp.build_preset("linear")
    traj = ivp.integrate_adaptive(problem, IntegratorOptions(max_step=0.01))
    assert np.max(np.diff(traj.times)) <= 0.01 + 1e-12


def test_adaptive_store_last():
    problem = ivp.build_preset("lorenz63")
    full = ivp.integrate_adaptive(problem, time_span=(0, 1))
    tail = ivp.integrate_adaptive(
        problem, IntegratorOptions(store="last"), time_span=(0, 1)
    )
    assert len(tail.times) == 2
    assert np.array_equal(tail.states[-1], full.states[-1])


def test_adaptive_max_steps_exceeded():
    problem = ivp.build_preset("lorenz63")
    with pytest.raises(ivp.MaxStepsExceeded):
        ivp.integrate_adaptive(problem, IntegratorOptions(max_steps=10))


def test_options_validation():
    with pytest.raises(ivp.ValidationError):
        IntegratorOptions(abs_tol=-1.0)
    with pytest.raises(ivp.ValidationError):
        IntegratorOptions(rel_tol=np.inf)


# ---------------------------------------------------------------------------
# fixed step


def test_euler_single_step_cancellation():
    problem = ivp.build_preset("linear")  # A = -1, y0 = 1, span [0, 1]
    traj = ivp.integrate_fixed(problem, 1, "euler")
    assert traj.states[-1, 0] == 0.0


def test_rk4_richardson_factor():
    problem = ivp.build_preset("linear")
    exact = np.exp(-1.0)
    e1 = abs(ivp.integrate_fixed(problem, 20, "rk4").states[-1, 0] - exact)
    e2 = abs(ivp.integrate_fixed(problem, 40, "rk4").states[-1, 0] - exact)
    assert 16 * 0.8 <= e1 / e2 <= 16 * 1.2


def test_rk4_observed_order_on_diagonal_system():
    problem = ivp.build_preset("linear", "Canonical", {"A": np.diag([-1.0, -2.0])})
    exact = problem.exact_solution(1.0)
    errors = []
    counts = [16, 32, 64, 128]
    for n in counts:
        traj = ivp.integrate_fixed(problem, n, "rk4")
        errors.append(np.linalg.norm(traj.states[-1] - exact))
    slopes = np.diff(np.log(errors)) / np.diff(np.log(1.0 / np.array(counts)))
    assert np.all(slopes >= 3.8)


def test_fixed_nonfinite_detection():
    problem = ivp.build_preset("linear", "Canonical", {"A": 1e8})
    problem.time_span = (0.0, 350.0)
    with np.errstate(over="ignore"), pytest.raises(ivp.NonFiniteState):
        ivp.integrate_fixed(problem, 35, "euler")


def test_fixed_rejects_bad_arguments():
    problem = ivp.build_preset("linear")
    with pytest.raises(ivp.ValidationError):
        ivp.integrate_fixed(problem, 0, "rk4")
    with pytest.raises(ivp.ValidationError):
        ivp.integrate_fixed(problem, 10, "midpoint")


# ---------------------------------------------------------------------------
# implicit


def test_implicit_dahlquist_strongly_stiff():
    problem = ivp.build_preset("linear", "Canonical", {"A": -1e6})
    traj = ivp.integrate_implicit(problem)
    assert traj.stats["naccept"] + traj.stats["nreject"] <= 200
    assert abs(traj.states[-1, 0]) <= 1e-6


def test_implicit_newton_single_iteration_on_linear():
    problem = ivp.build_preset(
        "linear", "Canonical", {"A": np.array([[-1.0, 0.4], [0.1, -2.0]])}
    )
    traj = ivp.integrate_implicit(problem)
    assert traj.stats["newton_max_per_step"] == 1


def test_implicit_matches_adaptive_on_brusselator():
    problem = ivp.build_preset("brusselator")
    opts = IntegratorOptions(abs_tol=1e-9, rel_tol=1e-9)
    imp = ivp.integrate_implicit(problem, opts, time_span=(0, 5))
    ref = ivp.integrate_adaptive(
        problem, IntegratorOptions(abs_tol=1e-12, rel_tol=1e-12), time_span=(0, 5)
    )
    assert np.linalg.norm(imp.states[-1] - ref.states[-1]) <= 1e-6


def test_implicit_finite_difference_fallback():
    problem = ivp.build_preset("doublependulum")  # no analytic Jacobian
    traj = ivp.integrate_implicit(
        problem, IntegratorOptions(abs_tol=1e-9, rel_tol=1e-9), time_span=(0, 1)
    )
    ref = ivp.integrate_adaptive(
        problem, IntegratorOptions(abs_tol=1e-12, rel_tol=1e-12), time_span=(0, 1)
    )
    assert np.linalg.norm(traj.states[-1] - ref.states[-1]) <= 1e-5


def test_implicit_endpoints_exact():
    problem = ivp.build_preset("hires")
    traj = ivp.integrate_implicit(problem, IntegratorOptions(abs_tol=1e-6, rel_tol=1e-6))
    assert traj.times[0] == 0.0
    assert traj.times[-1] == problem.time_span[1]


# ---------------------------------------------------------------------------
# events


def drop_problem():
    problem = ivp.build_preset("bouncingball")  # flat ground, g = 9.8
    problem.y0 = [0.0, 1.0, 0.0, 0.0]
    return problem


def test_event_first_bounce_time():
    problem = drop_problem()
    traj = ivp.integrate_with_events(
        problem, IntegratorOptions(abs_tol=1e-9, rel_tol=1e-9), time_span=(0, 1.2)
    )
    assert len(traj.events) >= 1
    assert abs(traj.events[0].time - np.sqrt(2.0 / 9.8)) <= 1e-6


def test_event_speed_preserved():
    problem = drop_problem()
    traj = ivp.integrate_with_events(problem, time_span=(0, 3))
    assert len(traj.events) >= 2
    for ev in traj.events:
        pre = np.hypot(ev.pre_state[2], ev.pre_state[3])
        post = np.hypot(ev.post_state[2], ev.post_state[3])
        assert abs(pre - post) <= 1e-9 * max(1.0, pre)


def test_event_localization_residual():
    problem = drop_problem()
    traj = ivp.integrate_with_events(
        problem, IntegratorOptions(abs_tol=1e-9, rel_tol=1e-9), time_span=(0, 3)
    )
    event_fn = problem.rhs.event
    for ev in traj.events:
        assert abs(event_fn(ev.time, ev.pre_state)) <= 1e-9


def test_event_rows_strictly_increasing_and_marker_states():
    problem = drop_problem()
    traj = ivp.integrate_with_events(problem, time_span=(0, 3))
    assert np.all(np.diff(traj.times) > 0)
    # energy conserved across the full run: bounce height returns to 1
    heights = traj.states[:, 1]
    assert np.max(heights) <= 1.0 + 1e-6


def test_event_random_terrain_smoke():
    problem = ivp.build_preset("bouncingball", "RandomTerrain")
    traj = ivp.integrate_with_events(problem)
    assert len(traj.events) >= 1
    assert np.all(np.isfinite(traj.states))
    assert traj.status in ("complete", "terminated_by_event")


def test_event_terminal_flag():
    problem = drop_problem()
    original = problem.rhs.event_transform

    def stopping(t, y):
        y_new, _ = original(t, y)
        return y_new, True

    problem.rhs.event_transform = stopping
    traj = ivp.integrate_with_events(problem, time_span=(0, 3))
    assert traj.status == "terminated_by_event"
    assert len(traj.events) == 1


def test_event_requires_event_functions():
    problem = ivp.build_preset("lorenz63")
    with pytest.raises(ivp.ValidationError):
        ivp.integrate_with_events(problem)


def test_adaptive_step_underflow_near_blowup():
    import types

    from ivpsuite.core import RHSBundle

    # y' = y^2 blows up at t = 1; the controller collapses the step
    problem = types.SimpleNamespace(
        rhs=RHSBundle(f=lambda t, y: y * y),
        time_span=(0.0, 2.0),
        y0=np.array([1.0]),
    )
    with pytest.raises((ivp.StepUnderflow, ivp.MaxStepsExceeded)):
        ivp.integrate_adaptive(problem, IntegratorOptions(max_steps=100000))


def test_event_stall_zeno_guard():
    problem = drop_problem()

    def zeno_transform(t, y):
        # re-arm the event a hair above the ground, still falling
        return np.array([y[0], 1e-13, y[2], min(y[3], -1.0)]), False

    problem.rhs.event_transform = zeno_transform
    with pytest.raises(ivp.EventStall):
        ivp.integrate_with_events(problem, time_span=(0, 3))
