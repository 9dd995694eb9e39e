"""High Irradiance Response: a mildly stiff eight-species photochemistry
model of light-driven plant morphogenesis.  Coefficients are fixed; the
family has no tunable parameters."""

import numpy as np

from ..core import Family, Preset, RHSBundle, _Built, register_family
from ..errors import DimensionMismatch

Y0 = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0057])
TIME_SPAN = (0.0, 321.8122)


def _f(t, y):
    if len(y) != 8:
        raise DimensionMismatch(8, len(y))
    y1, y2, y3, y4, y5, y6, y7, y8 = y
    return np.array(
        [
            -1.71 * y1 + 0.43 * y2 + 8.32 * y3 + 0.0007,
            1.71 * y1 - 8.75 * y2,
            -10.03 * y3 + 0.43 * y4 + 0.035 * y5,
            8.32 * y2 + 1.71 * y3 - 1.12 * y4,
            -1.745 * y5 + 0.43 * y6 + 0.43 * y7,
            -280.0 * y6 * y8 + 0.69 * y4 + 1.71 * y5 - 0.43 * y6 + 0.69 * y7,
            280.0 * y6 * y8 - 1.81 * y7,
            -280.0 * y6 * y8 + 1.81 * y7,
        ]
    )


def _jacobian(t, y):
    y6, y8 = y[5], y[7]
    jac = np.zeros((8, 8))
    jac[0, 0:3] = (-1.71, 0.43, 8.32)
    jac[1, 0:2] = (1.71, -8.75)
    jac[2, 2:5] = (-10.03, 0.43, 0.035)
    jac[3, 1:4] = (8.32, 1.71, -1.12)
    jac[4, 4:7] = (-1.745, 0.43, 0.43)
    jac[5, 3:7] = (0.69, 1.71, -280.0 * y8 - 0.43, 0.69)
    jac[5, 7] = -280.0 * y6
    jac[6, 5] = 280.0 * y8
    jac[6, 6] = -1.81
    jac[6, 7] = 280.0 * y6
    jac[7, 5] = -280.0 * y8
    jac[7, 6] = 1.81
    jac[7, 7] = -280.0 * y6
    return jac


def _make(params):
    extras = {
        "jacobian_sample_box": (np.zeros(8), np.full(8, 1.0)),
    }
    return _Built(
        y0=Y0.copy(),
        time_span=TIME_SPAN,
        rhs=RHSBundle(f=_f, jacobian=_jacobian),
        extras=extras,
    )


register_family(
    Family(
        name="hires",
        description="Stiff eight-equation plant photomorphogenesis kinetics",
        num_vars_expr="8",
        schema={},
        make=_make,
        presets={
            "Canonical": Preset(
                "Canonical",
                {},
                "Fixed literature coefficients, span [0, 321.8122]",
            ),
        },
    )
)
