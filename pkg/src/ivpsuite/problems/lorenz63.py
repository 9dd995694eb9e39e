"""The three-variable convection model, the classic chaotic attractor."""

import numpy as np

from ..core import Family, Preset, RHSBundle, _Built, register_family
from ..errors import DimensionMismatch


def _make(params):
    sigma = float(params["sigma"])
    rho = float(params["rho"])
    beta = float(params["beta"])

    def f(t, state):
        if len(state) != 3:
            raise DimensionMismatch(3, len(state))
        x, y, z = state
        return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])

    def jacobian(t, state):
        x, y, z = state
        return np.array(
            [
                [-sigma, sigma, 0.0],
                [rho - z, -1.0, -x],
                [y, x, -beta],
            ]
        )

    extras = {
        "jacobian_sample_box": (
            np.array([-20.0, -25.0, 0.0]),
            np.array([20.0, 25.0, 50.0]),
        )
    }
    return _Built(
        y0=np.array([0.0, 1.0, 0.0]),
        time_span=(0.0, 60.0),
        rhs=RHSBundle(f=f, jacobian=jacobian),
        extras=extras,
    )


register_family(
    Family(
        name="lorenz63",
        description="Three-variable chaotic convection model",
        num_vars_expr="3",
        schema={
            "sigma": ("scalar", "finite", "nonnegative"),
            "rho": ("scalar", "finite", "nonnegative"),
            "beta": ("scalar", "finite", "nonnegative"),
        },
        make=_make,
        presets={
            "Canonical": Preset(
                "Canonical",
                {"sigma": 10.0, "rho": 28.0, "beta": 8.0 / 3.0},
                "sigma=10, rho=28, beta=8/3; start (0, 1, 0) outside the "
                "trapping region, span [0, 60]",
            ),
        },
    )
)
