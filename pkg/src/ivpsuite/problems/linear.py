"""Linear first-order system dy/dt = A(t) y.

The scalar constant-coefficient case is the classic stability test
problem; its exact solution makes this family the reference for
convergence-order measurements.
"""

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm

from ..core import Family, Preset, RHSBundle, _Built, register_family
from ..errors import DimensionMismatch, ValidationError


def _normalize_a(value):
    """Return (A_of_t, n, constant_matrix_or_None)."""
    if callable(value):
        probe = np.atleast_2d(np.asarray(value(0.0), dtype=float))
        return lambda t: np.atleast_2d(np.asarray(value(t), dtype=float)), probe.shape[0], None
    arr = np.atleast_2d(np.asarray(value, dtype=float))
    return (lambda t: arr), arr.shape[0], arr


def _structural(params):
    value = params["A"]
    if callable(value):
        probe = np.asarray(value(0.0), dtype=float)
    else:
        probe = np.asarray(value, dtype=float)
    probe = np.atleast_2d(probe)
    if probe.ndim != 2 or probe.shape[0] != probe.shape[1]:
        raise ValidationError("A", "a square matrix, scalar, or function of t")
    if not callable(value) and not np.all(np.isfinite(probe)):
        raise ValidationError("A", "finite")


def _exact_factory(a_of_t, constant, n):
    if constant is not None:
        def exact(t, t0, y0):
            return expm(constant * (t - t0)) @ y0

        return exact

    # time-dependent coefficients: exact propagation is only offered when
    # the sampled matrices are diagonal (a commuting family); the matrix
    # exponential of the elementwise integral is then exact
    samples = [a_of_t(s) for s in (0.0, 0.1, 0.37, 1.0, 2.5)]
    if not all(np.array_equal(m, np.diag(np.diag(m))) for m in samples):
        return None

    def exact(t, t0, y0):
        phases = np.array(
            [quad(lambda s: a_of_t(s)[i, i], t0, t, epsabs=1e-12, epsrel=1e-12)[0]
             for i in range(n)]
        )
        return np.exp(phases) * y0

    return exact


def _make(params):
    a_of_t, n, constant = _normalize_a(params["A"])
    y0 = np.ones(n)

    def f(t, y):
        if len(y) != n:
            raise DimensionMismatch(n, len(y))
        return a_of_t(t) @ np.asarray(y, dtype=float)

    def jacobian(t, y):
        return a_of_t(t)

    rhs = RHSBundle(f=f, jacobian=jacobian)
    extras = {"jacobian_sample_box": (np.full(n, -2.0), np.full(n, 2.0))}
    exact = _exact_factory(a_of_t, constant, n)
    if exact is not None:
        extras["exact"] = exact
    return _Built(y0=y0, time_span=(0.0, 1.0), rhs=rhs, extras=extras)


register_family(
    Family(
        name="linear",
        description="Linear system dy/dt = A(t) y with exact solution",
        num_vars_expr="n (1)",
        schema={"A": ()},
        structural=_structural,
        make=_make,
        presets={
            "Canonical": Preset(
                "Canonical",
                {"A": -1.0},
                "Scalar constant-coefficient decay problem, A = -1",
            ),
            "Dahlquist": Preset(
                "Dahlquist",
                {"A": -1.0},
                "Alias of the scalar stability test problem",
            ),
        },
    )
)
