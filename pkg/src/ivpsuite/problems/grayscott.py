"""Two-species reaction-diffusion on a periodic grid.

The state concatenates the two fields, each flattened row-major:
``y = [u, v]`` of length ``2 * nx * ny``.
"""

import numpy as np
import scipy.sparse as sp

from ..core import Family, Preset, RHSBundle, _Built, register_family
from ..errors import DimensionMismatch, ValidationError
from ..operators import Grid2D, periodic_laplacian_apply


def _structural(params):
    if int(params["nx"]) < 3:
        raise ValidationError("nx", "at least 3")
    if int(params["ny"]) < 3:
        raise ValidationError("ny", "at least 3")


def _periodic_laplacian_matrix(n, h):
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    lap = sp.diags([off, main, off], [-1, 0, 1]).tolil()
    lap[0, n - 1] = 1.0
    lap[n - 1, 0] = 1.0
    return lap.tocsr() / (h * h)


def _make(params):
    eps1 = float(params["epsilon1"])
    eps2 = float(params["epsilon2"])
    feed = float(params["f"])
    kill = float(params["k"])
    nx, ny = int(params["nx"]), int(params["ny"])
    grid = Grid2D(nx, ny, boundary="periodic")
    size = grid.size

    def _split(y):
        if len(y) != 2 * size:
            raise DimensionMismatch(2 * size, len(y))
        y = np.asarray(y, dtype=float)
        return y[:size].reshape(ny, nx), y[size:].reshape(ny, nx)

    def f_diffusion(t, y):
        u, v = _split(y)
        du = eps1 * periodic_laplacian_apply(u, grid.hx, grid.hy)
        dv = eps2 * periodic_laplacian_apply(v, grid.hx, grid.hy)
        return np.concatenate([du.ravel(), dv.ravel()])

    def f_reaction(t, y):
        u, v = _split(y)
        uvv = u * v * v
        du = -uvv + feed * (1.0 - u)
        dv = uvv - (feed + kill) * v
        return np.concatenate([du.ravel(), dv.ravel()])

    def f(t, y):
        u, v = _split(y)
        uvv = u * v * v
        du = eps1 * periodic_laplacian_apply(u, grid.hx, grid.hy) - uvv + feed * (1.0 - u)
        dv = eps2 * periodic_laplacian_apply(v, grid.hx, grid.hy) + uvv - (feed + kill) * v
        return np.concatenate([du.ravel(), dv.ravel()])

    lap_x = _periodic_laplacian_matrix(nx, grid.hx)
    lap_y = _periodic_laplacian_matrix(ny, grid.hy)
    lap = sp.kron(sp.identity(ny), lap_x) + sp.kron(lap_y, sp.identity(nx))
    lap = lap.tocsr()

    def jac_diffusion(t, y):
        return sp.block_diag([eps1 * lap, eps2 * lap]).tocsr()

    def jac_reaction(t, y):
        u, v = _split(y)
        u, v = u.ravel(), v.ravel()
        return sp.bmat(
            [
                [sp.diags(-v * v - feed), sp.diags(-2.0 * u * v)],
                [sp.diags(v * v), sp.diags(2.0 * u * v - feed - kill)],
            ]
        ).tocsr()

    def jacobian(t, y):
        return jac_diffusion(t, y) + jac_reaction(t, y)

    rhs = RHSBundle(
        f=f,
        jacobian=jacobian,
        partitions={
            "diffusion": RHSBundle(f=f_diffusion, jacobian=jac_diffusion),
            "reaction": RHSBundle(f=f_reaction, jacobian=jac_reaction),
        },
    )

    # classic seeded start: u=1, v=0 with a perturbed center square
    u0 = np.ones((ny, nx))
    v0 = np.zeros((ny, nx))
    sy, sx = max(1, ny // 8), max(1, nx // 8)
    cy, cx = ny // 2, nx // 2
    u0[cy - sy : cy + sy, cx - sx : cx + sx] = 0.5
    v0[cy - sy : cy + sy, cx - sx : cx + sx] = 0.25
    rng = np.random.default_rng(2683)
    u0 += 0.01 * rng.random((ny, nx))
    y0 = np.concatenate([u0.ravel(), v0.ravel()])

    extras = {
        "grid": grid,
        "jacobian_sample_box": (
            np.zeros(2 * size),
            np.concatenate([np.ones(size), np.full(size, 0.5)]),
        ),
    }
    return _Built(y0=y0, time_span=(0.0, 2000.0), rhs=rhs, extras=extras)


register_family(
    Family(
        name="grayscott",
        description="Reaction-diffusion pattern formation, periodic grid",
        num_vars_expr="2n^2 (32768)",
        schema={
            "epsilon1": ("scalar", "finite", "nonnegative"),
            "epsilon2": ("scalar", "finite", "nonnegative"),
            "f": ("scalar", "finite", "nonnegative"),
            "k": ("scalar", "finite", "nonnegative"),
            "nx": ("scalar", "integer", "positive"),
            "ny": ("scalar", "integer", "positive"),
        },
        structural=_structural,
        make=_make,
        presets={
            "Canonical": Preset(
                "Canonical",
                {
                    "epsilon1": 2e-5,
                    "epsilon2": 1e-5,
                    "f": 0.04,
                    "k": 0.06,
                    "nx": 128,
                    "ny": 128,
                },
                "128x128 periodic grid in the self-replicating-spot "
                "regime; seeded center square start, span [0, 2000]",
            ),
        },
    )
)
