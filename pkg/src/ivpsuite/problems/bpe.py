"""Dispersive wave equation with a Boussinesq-type mass operator.

Semi-discretized as a first-order system in y = (u, u_t):

    u_t  = v
    v_t  = M^{-1} lap(u - beta2 lap(u) + alpha f(u)),   M = I - beta1 lap

M is symmetric positive definite for beta1 > 0 and is factorized once per
build.  A 1D Dirichlet grid is the default; dimensions=2 switches to the
square interior grid behind the same interface.
"""

import numpy as np
import scipy.sparse as sp

from ..core import Family, Preset, RHSBundle, _Built, register_family
from ..errors import DimensionMismatch, SingularMass, ValidationError
from ..operators import Grid1D, Grid2D, laplacian_1d_dirichlet, laplacian_2d_dirichlet


def _structural(params):
    if int(params["nx"]) < 3:
        raise ValidationError("nx", "at least 3")
    if int(params["dimensions"]) not in (1, 2):
        raise ValidationError("dimensions", "one of 1, 2")


def _make(params):
    alpha = float(params["alpha"])
    beta1 = float(params["beta1"])
    beta2 = float(params["beta2"])
    g = params["nonlinearity"]
    gprime = params["nonlinearity_derivative"]
    n = int(params["nx"])
    dims = int(params["dimensions"])

    if dims == 1:
        grid = Grid1D(n)
        lap = laplacian_1d_dirichlet(n, grid.hx)
        size = n
        coords = grid.coords
    else:
        grid = Grid2D(n, n, boundary="dirichlet_zero")
        lap = laplacian_2d_dirichlet(n, n, grid.hx)
        size = n * n
        coords = None

    lap_m = lap.matrix
    mass = sp.identity(size, format="csr") - beta1 * lap_m
    try:
        from scipy.sparse.linalg import splu

        mass_factor = splu(mass.tocsc())
    except RuntimeError as exc:  # beta1 lap with unit eigenvalue
        raise SingularMass(str(exc)) from exc

    def _split(y):
        if len(y) != 2 * size:
            raise DimensionMismatch(2 * size, len(y))
        y = np.asarray(y, dtype=float)
        return y[:size], y[size:]

    def f(t, y):
        u, ut = _split(y)
        w = lap_m @ (u - beta2 * (lap_m @ u) + alpha * g(u))
        return np.concatenate([ut, mass_factor.solve(w)])

    def _linearized(u):
        # d/du of lap(u - beta2 lap u + alpha f(u))
        return lap_m @ (
            sp.identity(size) - beta2 * lap_m + alpha * sp.diags(gprime(u))
        )

    def jacobian(t, y):
        u, _ = _split(y)
        lower = mass_factor.solve(_linearized(u).toarray())
        jac = np.zeros((2 * size, 2 * size))
        jac[:size, size:] = np.eye(size)
        jac[size:, :size] = lower
        return jac

    def jvp(t, y, v):
        u, _ = _split(y)
        v1, v2 = _split(v)
        w = lap_m @ (v1 - beta2 * (lap_m @ v1) + alpha * gprime(u) * v1)
        return np.concatenate([v2, mass_factor.solve(w)])

    def javp(t, y, w):
        u, _ = _split(y)
        w1, w2 = _split(w)
        # adjoint of the lower-left block: B lap M^{-1} with B symmetric
        z = mass_factor.solve(w2)
        z = lap_m @ z
        z = z - beta2 * (lap_m @ z) + alpha * gprime(u) * z
        return np.concatenate([z, w1])

    rhs = RHSBundle(f=f, jacobian=jacobian, jvp=jvp, javp=javp)

    if dims == 1:
        u0 = 0.5 / np.cosh(10.0 * (coords - 0.5)) ** 2
    else:
        x, y2 = (np.arange(n) + 1.0) * grid.hx, ((np.arange(n) + 1.0) * grid.hx)[:, None]
        u0 = (0.5 / np.cosh(10.0 * np.hypot(x - 0.5, y2 - 0.5)) ** 2).ravel()
    y0 = np.concatenate([u0, np.zeros(size)])

    extras = {
        "grid": grid,
        "mass_solve": mass_factor.solve,
        "mass_apply": lambda v: mass @ v,
        "laplacian": lap,
        "jacobian_sample_box": (
            np.full(2 * size, -0.5),
            np.full(2 * size, 0.5),
        ),
    }
    return _Built(y0=y0, time_span=(0.0, 5.0), rhs=rhs, extras=extras)


def _square(u):
    return u * u


def _square_derivative(u):
    return 2.0 * u


register_family(
    Family(
        name="bpe",
        description="Boussinesq-type dispersive wave equation, first-order form",
        num_vars_expr="2n (254)",
        schema={
            "alpha": ("scalar", "finite"),
            "beta1": ("scalar", "finite", "positive"),
            "beta2": ("scalar", "finite"),
            "nonlinearity": ("function",),
            "nonlinearity_derivative": ("function",),
            "nx": ("scalar", "integer", "positive"),
            "dimensions": ("scalar", "integer"),
        },
        structural=_structural,
        make=_make,
        presets={
            "Canonical": Preset(
                "Canonical",
                {
                    "alpha": 1.0,
                    "beta1": 1.5,
                    "beta2": 0.5,
                    "nonlinearity": _square,
                    "nonlinearity_derivative": _square_derivative,
                    "nx": 127,
                    "dimensions": 1,
                },
                "1D, 127 interior points, quadratic nonlinearity, "
                "sech^2 bump at rest; span [0, 5]",
            ),
            "Planar": Preset(
                "Planar",
                {
                    "alpha": 1.0,
                    "beta1": 1.5,
                    "beta2": 0.5,
                    "nonlinearity": _square,
                    "nonlinearity_derivative": _square_derivative,
                    "nx": 31,
                    "dimensions": 2,
                },
                "2D variant on a 31x31 interior grid",
            ),
        },
    )
)
