"""Wind-driven 1.5-layer quasi-geostrophic circulation model.

The state is the stream function on the interior of the unit square
(homogeneous Dirichlet).  Potential vorticity is q = lap(psi) - F psi;
its tendency is advected with the conservative Arakawa bracket, damped by
a hyperviscous lap^3 term, and forced by a double-gyre wind stress.  The
stream-function tendency then requires one Helmholtz solve per RHS
evaluation, which is the dominant cost and is served by a cached Cholesky
factorization, multigrid cycles, or GMRES.
"""

import numpy as np
from scipy.sparse.linalg import LinearOperator

from ..core import Family, Preset, RHSBundle, _Built, register_family
from ..errors import DimensionMismatch, ValidationError
from ..operators import (
    Grid2D,
    HelmholtzSolver,
    arakawa_adjoint_first,
    arakawa_adjoint_second,
    arakawa_jacobian,
    ddx_central,
    grid_distance,
    laplacian_2d_dirichlet,
)

_GC_SIZES = {"small": 63, "medium": 127, "large": 255}


def _structural(params):
    n = int(params["nx"])
    if n < 3:
        raise ValidationError("nx", "at least 3")
    p = int(params["fd_order"])
    if p not in (2, 4):
        raise ValidationError("fd_order", "one of 2, 4")
    solver = params["linearsolver"]
    if solver not in ("cholesky", "multigrid", "gmres"):
        raise ValidationError("linearsolver", "one of cholesky, multigrid, gmres")
    if solver == "multigrid" and (n < 7 or ((n + 1) & n) != 0):
        raise ValidationError("nx", "a power of two minus one for multigrid")


def _initial_state(n, h):
    """Energetic seeded multi-mode field.

    A small-amplitude seed stays laminar for thousands of time units at
    the coarser grid sizes (the wind forcing spins the gyres up only
    slowly), so the preset starts inside the eddying regime instead: a
    fixed-seed sum of sine modes with a decaying spectrum, scaled to a
    peak amplitude comparable to the saturated circulation.
    """
    rng = np.random.default_rng(5077)
    x = (np.arange(n) + 1.0) * h
    y = x[:, None]
    psi = np.zeros((n, n))
    for k in range(1, 11):
        for l in range(1, 11):
            amp = rng.standard_normal() / (k * k + l * l)
            psi += amp * np.sin(l * np.pi * y) * np.sin(k * np.pi * x)
    psi *= 70.0 / np.abs(psi).max()
    return psi.ravel()


def _make(params):
    froude = float(params["F"])
    eps = float(params["epsilon"])
    hyper = float(params["A"])
    n = int(params["nx"])
    order = int(params["fd_order"])
    method = params["linearsolver"]
    tol = float(params["linearsolvertol"])

    grid = Grid2D(n, n, boundary="dirichlet_zero")
    h = grid.hx
    lap = laplacian_2d_dirichlet(n, n, h)
    lap3 = lap.cube()
    solver = HelmholtzSolver(n, froude, method=method, tol=tol)
    forcing = 2.0 * np.pi * np.sin(2.0 * np.pi * grid.y)
    size = n * n

    def _field(psi):
        if len(psi) != size:
            raise DimensionMismatch(size, len(psi))
        return np.asarray(psi, dtype=float).reshape(n, n)

    def _vorticity(psi_flat):
        return lap.apply(psi_flat) - froude * psi_flat

    def f(t, psi):
        pf = _field(psi)
        psi_flat = pf.ravel()
        qf = _vorticity(psi_flat).reshape(n, n)
        qdot = (
            -ddx_central(pf, h, order)
            - eps * arakawa_jacobian(pf, qf, h)
            - hyper * lap3.apply(psi_flat).reshape(n, n)
            + forcing
        )
        return solver.solve(qdot.ravel())

    def jvp(t, psi, v):
        pf = _field(psi)
        vf = _field(v)
        psi_flat, v_flat = pf.ravel(), vf.ravel()
        qf = _vorticity(psi_flat).reshape(n, n)
        qv = _vorticity(v_flat).reshape(n, n)
        lin = (
            -ddx_central(vf, h, order)
            - eps * (arakawa_jacobian(vf, qf, h) + arakawa_jacobian(pf, qv, h))
            - hyper * lap3.apply(v_flat).reshape(n, n)
        )
        return solver.solve(lin.ravel())

    def javp(t, psi, w):
        pf = _field(psi)
        _field(w)
        qf = _vorticity(pf.ravel()).reshape(n, n)
        u = solver.solve(np.asarray(w, dtype=float).ravel()).reshape(n, n)
        out = (
            ddx_central(u, h, order)
            - eps * arakawa_adjoint_first(u, qf, h)
            - hyper * lap3.apply(u.ravel()).reshape(n, n)
        )
        out = out.ravel() - eps * _vorticity(
            arakawa_adjoint_second(u, pf, h).ravel()
        )
        return out

    def jacobian_approx(t, psi):
        """Linear-terms-only approximation; drops the bracket coupling."""

        def matvec(v):
            vf = np.asarray(v, dtype=float).reshape(n, n)
            lin = -ddx_central(vf, h, order) - hyper * lap3.apply(v).reshape(n, n)
            return solver.solve(lin.ravel())

        return LinearOperator((size, size), matvec=matvec)

    rhs = RHSBundle(f=f, jvp=jvp, javp=javp, jacobian_approx=jacobian_approx)
    extras = {
        "grid": grid,
        "helmholtz": solver,
        "distance": lambda i, j: grid_distance(i, j, grid),
    }
    return _Built(
        y0=_initial_state(n, h),
        time_span=(0.0, 100.0),
        rhs=rhs,
        extras=extras,
    )


def _gc_translate(overrides):
    overrides = dict(overrides)
    size = overrides.pop("size", None)
    if size is not None:
        if size not in _GC_SIZES:
            raise ValidationError("size", "one of small, medium, large")
        overrides["nx"] = _GC_SIZES[size]
    return overrides


_DEFAULTS = {
    "F": 1600.0,
    "epsilon": 1e-5,
    "A": 2e-11,
    "nx": 127,
    "fd_order": 2,
    "linearsolver": "cholesky",
    "linearsolvertol": 1e-8,
}


register_family(
    Family(
        name="qgso",
        description="1.5-layer quasi-geostrophic gyre model (Helmholtz solve per step)",
        num_vars_expr="n^2 (16129)",
        schema={
            "F": ("scalar", "finite", "nonnegative"),
            "epsilon": ("scalar", "finite", "nonnegative"),
            "A": ("scalar", "finite", "nonnegative"),
            "nx": ("scalar", "integer", "positive"),
            "fd_order": ("scalar", "integer"),
            "linearsolver": (),
            "linearsolvertol": ("scalar", "finite", "positive"),
        },
        structural=_structural,
        make=_make,
        presets={
            "Canonical": Preset(
                "Canonical",
                dict(_DEFAULTS),
                "127x127 interior grid, F=1600, epsilon=1e-5, A=2e-11, "
                "direct Helmholtz solver; energetic seeded start, span [0, 100]",
            ),
            "GC": Preset(
                "GC",
                dict(_DEFAULTS),
                "Same constants; accepts size=small|medium|large "
                "(63, 127, or 255 interior points per side)",
                translate=_gc_translate,
            ),
        },
    )
)
