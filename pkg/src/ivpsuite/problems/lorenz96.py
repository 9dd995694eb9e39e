"""Cyclic N-variable advection toy model with constant forcing."""

import numpy as np

from ..core import Family, Preset, RHSBundle, _Built, register_family
from ..errors import DimensionMismatch, ValidationError


def _normalize(params):
    forcing = params.get("forcing")
    if forcing is not None and not callable(forcing):
        const = float(forcing)
        params["forcing"] = lambda t: const
    return params


def _structural(params):
    # the cyclic stencil x_{i-2} must not wrap onto itself
    if int(params["N"]) < 4:
        raise ValidationError("N", "at least 4")


def _make(params):
    n = int(params["N"])
    forcing = params["forcing"]

    def f(t, x):
        if len(x) != n:
            raise DimensionMismatch(n, len(x))
        x = np.asarray(x, dtype=float)
        return (np.roll(x, -1) - np.roll(x, 2)) * np.roll(x, 1) - x + forcing(t)

    def jacobian(t, x):
        x = np.asarray(x, dtype=float)
        jac = np.zeros((n, n))
        idx = np.arange(n)
        jac[idx, idx] = -1.0
        jac[idx, (idx + 1) % n] = np.roll(x, 1)
        jac[idx, (idx - 2) % n] = -np.roll(x, 1)
        jac[idx, (idx - 1) % n] = np.roll(x, -1) - np.roll(x, 2)
        return jac

    y0 = np.full(n, 8.0)
    if n >= 20:
        y0[19] = 8.008  # perturb the 20th variable off the critical point
    else:
        y0[n // 2] = 8.008
    extras = {"jacobian_sample_box": (np.full(n, -5.0), np.full(n, 12.0))}
    return _Built(
        y0=y0,
        time_span=(0.0, 0.05),
        rhs=RHSBundle(f=f, jacobian=jacobian),
        extras=extras,
    )


register_family(
    Family(
        name="lorenz96",
        description="Cyclic N-variable chaotic model, forcing F(t)",
        num_vars_expr="n (40)",
        schema={
            "N": ("scalar", "integer", "finite"),
            "forcing": ("function",),
        },
        structural=_structural,
        normalize=_normalize,
        make=_make,
        presets={
            "Canonical": Preset(
                "Canonical",
                {"N": 40, "forcing": 8.0},
                "40 variables, constant forcing 8; span [0, 0.05] "
                "(six hours in model time)",
            ),
        },
    )
)
