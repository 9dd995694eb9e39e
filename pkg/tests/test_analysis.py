"""Lyapunov spectrum, Kaplan-Yorke dimension, convergence, Jacobian checks."""

import numpy as np
import pytest

import ivpsuite as ivp
from ivpsuite.analysis import kaplan_yorke_dimension


# ---------------------------------------------------------------------------
# Kaplan-Yorke dimension edge cases


def test_ky_dimension_all_negative():
    assert kaplan_yorke_dimension([-0.5, -1.0, -2.0]) == 0.0


def test_ky_dimension_all_prefixes_positive():
    assert kaplan_yorke_dimension([1.0, -0.5]) == 2.0
    assert kaplan_yorke_dimension([1e-9, 1e-10]) == 2.0


def test_ky_dimension_middle():
    les = np.array([0.91, 0.0, -14.57])
    expected = 2.0 + (0.91 + 0.0) / 14.57
    assert np.isclose(kaplan_yorke_dimension(les), expected, rtol=1e-12)


# ---------------------------------------------------------------------------
# Lyapunov spectrum oracles


def test_lyapunov_linear_diagonal_matches_entries():
    # diagonal rates small enough that both bias sources sit below the
    # 1e-8 oracle tolerance: the trapezoidal propagation bias a^2 dt / 2
    # and the skipped final interval worth a * dt / T
    rates = np.array([3e-5, -1e-5, -2e-5])
    problem = ivp.build_preset("linear", "Canonical", {"A": np.diag(rates)})
    problem.time_span = (0.0, 2.0)
    result = ivp.lyapunov_spectrum(
        problem, spinup_span=(0.0, 1.0), averaging_span=10.0, max_step=1e-3
    )
    assert np.all(np.diff(result.exponents) <= 0)
    assert np.allclose(result.exponents, np.sort(rates)[::-1], atol=1e-8)


def test_lyapunov_planar_rotation_dimension_two():
    # trace-zero rotation: both exponents vanish; the discrete propagator
    # has det = 1 + dt^2 so both prefix sums stay positive and the
    # Kaplan-Yorke formula is forced to the full dimension
    problem = ivp.build_preset(
        "linear", "Canonical", {"A": np.array([[0.0, -1.0], [1.0, 0.0]])}
    )
    result = ivp.lyapunov_spectrum(
        problem, spinup_span=(0.0, 1.0), averaging_span=20.0, max_step=1e-3
    )
    assert np.all(np.abs(result.exponents) <= 1e-3)
    assert result.fractal_dimension == 2.0


def test_lyapunov_requires_jacobian():
    problem = ivp.build_preset("doublependulum")
    with pytest.raises(ivp.NoJacobian):
        ivp.lyapunov_spectrum(problem)


def test_lyapunov_lorenz63_reproduction(lorenz63_lyapunov):
    result, _ = lorenz63_lyapunov
    les = result.exponents
    assert abs(les[0] - 0.9102) <= 0.02
    assert abs(les[1] - 0.0027) <= 0.02
    assert abs(les[2] + 14.5891) <= 0.3
    assert abs(result.fractal_dimension - 2.0626) <= 0.02


def test_lyapunov_lorenz63_trace_identity(lorenz63_lyapunov):
    total = lorenz63_lyapunov[0].exponents.sum()
    trace = -(10.0 + 1.0 + 8.0 / 3.0)
    assert abs(total - trace) / abs(trace) <= 0.005


@pytest.mark.slow
def test_lyapunov_averaging_span_stability(lorenz63_lyapunov):
    problem = ivp.build_preset("lorenz63")
    longer = ivp.lyapunov_spectrum(problem, averaging_span=1000.0)
    short = lorenz63_lyapunov[0].exponents
    # +-2% on the well-separated exponents; the near-zero one is compared
    # absolutely on the same scale
    assert abs(longer.exponents[0] - short[0]) / abs(short[0]) <= 0.02
    assert abs(longer.exponents[2] - short[2]) / abs(short[2]) <= 0.02
    assert abs(longer.exponents[1] - short[1]) <= 0.02


# ---------------------------------------------------------------------------
# convergence order


def test_convergence_rk4_order():
    problem = ivp.build_preset("linear")
    result = ivp.convergence_order(problem, "rk4", [16, 32, 64, 128, 256])
    assert abs(result.order - 4.0) <= 0.2


def test_convergence_euler_order():
    problem = ivp.build_preset("linear")
    result = ivp.convergence_order(problem, "euler", [16, 32, 64, 128, 256])
    assert abs(result.order - 1.0) <= 0.1


def test_convergence_error_floor_on_zero_rhs():
    problem = ivp.build_preset("linear", "Canonical", {"A": np.zeros((2, 2))})
    with pytest.raises(ivp.ErrorFloorReached):
        ivp.convergence_order(problem, "rk4", [4, 8, 16])


def test_convergence_requires_exact_solution():
    problem = ivp.build_preset("lorenz63")
    with pytest.raises(ivp.UnsupportedExactSolution):
        ivp.convergence_order(problem, "rk4", [16, 32, 64])


# ---------------------------------------------------------------------------
# Jacobian oracle


def test_check_jacobian_linear_exact():
    problem = ivp.build_preset(
        "linear", "Canonical", {"A": np.array([[-1.0, 0.5], [0.25, -2.0]])}
    )
    assert ivp.check_jacobian(problem, sample_count=50, seed=0) <= 1e-12


@pytest.mark.parametrize("family", ["lorenz63", "brusselator", "lorenz96", "hires"])
def test_check_jacobian_nonlinear_families(family):
    problem = ivp.build_preset(family)
    assert ivp.check_jacobian(problem, sample_count=50, seed=0) <= 1e-6


def test_check_jacobian_missing():
    problem = ivp.build_preset("doublependulum")
    with pytest.raises(ivp.NoJacobian):
        ivp.check_jacobian(problem)
