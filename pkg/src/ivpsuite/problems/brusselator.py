"""Autocatalytic two-species reaction with a linear/nonlinear splitting."""

import numpy as np

from ..core import Family, Preset, RHSBundle, _Built, register_family
from ..errors import DimensionMismatch


def _make(params):
    a = float(params["a"])
    b = float(params["b"])

    def _check(state):
        if len(state) != 2:
            raise DimensionMismatch(2, len(state))

    def f(t, state):
        _check(state)
        x, y = state
        axxy = a * x * x * y
        return np.array([1.0 - (b + 1.0) * x + axxy, b * x - axxy])

    def jacobian(t, state):
        x, y = state
        return np.array(
            [
                [-(b + 1.0) + 2.0 * a * x * y, a * x * x],
                [b - 2.0 * a * x * y, -a * x * x],
            ]
        )

    # additive splitting: the affine part keeps the constant production term
    def f_linear(t, state):
        _check(state)
        x, _ = state
        return np.array([1.0 - (b + 1.0) * x, b * x])

    def jac_linear(t, state):
        return np.array([[-(b + 1.0), 0.0], [b, 0.0]])

    def f_nonlinear(t, state):
        _check(state)
        x, y = state
        axxy = a * x * x * y
        return np.array([axxy, -axxy])

    def jac_nonlinear(t, state):
        x, y = state
        return np.array(
            [[2.0 * a * x * y, a * x * x], [-2.0 * a * x * y, -a * x * x]]
        )

    rhs = RHSBundle(
        f=f,
        jacobian=jacobian,
        partitions={
            "linear": RHSBundle(f=f_linear, jacobian=jac_linear),
            "nonlinear": RHSBundle(f=f_nonlinear, jacobian=jac_nonlinear),
        },
    )
    extras = {"jacobian_sample_box": (np.array([0.1, 0.1]), np.array([5.0, 5.0]))}
    return _Built(
        y0=np.array([1.5, 3.0]), time_span=(0.0, 20.0), rhs=rhs, extras=extras
    )


register_family(
    Family(
        name="brusselator",
        description="Autocatalytic reaction with linear/nonlinear split",
        num_vars_expr="2",
        schema={
            "a": ("scalar", "finite", "positive"),
            "b": ("scalar", "finite", "positive"),
        },
        make=_make,
        presets={
            "Canonical": Preset(
                "Canonical",
                {"a": 1.0, "b": 3.0},
                "a=1, b=3 (limit-cycle regime), start (1.5, 3), span [0, 20]",
            ),
        },
    )
)
