"""Two pendulums joined end to end; chaotic for large swings.

State ordering is (theta1, theta2, omega1, omega2) with both angles
measured counterclockwise from the negative y axis, so the straight-down
rest state is the origin.
"""

import numpy as np

from ..core import Family, Preset, RHSBundle, _Built, register_family
from ..errors import DimensionMismatch


def _make(params):
    m1 = float(params["m1"])
    m2 = float(params["m2"])
    l1 = float(params["l1"])
    l2 = float(params["l2"])
    g = float(params["g"])
    m = m1 + m2

    def f(t, state):
        if len(state) != 4:
            raise DimensionMismatch(4, len(state))
        th1, th2, w1, w2 = state
        delta = th2 - th1
        sd, cd = np.sin(delta), np.cos(delta)
        denom = m - m2 * cd * cd  # = m1 + m2 sin^2(delta), never zero
        a1 = (
            m2 * l1 * w1 * w1 * sd * cd
            + m2 * g * np.sin(th2) * cd
            + m2 * l2 * w2 * w2 * sd
            - m * g * np.sin(th1)
        ) / (l1 * denom)
        a2 = (
            -m2 * l2 * w2 * w2 * sd * cd
            + m * (g * np.sin(th1) * cd - l1 * w1 * w1 * sd - g * np.sin(th2))
        ) / (l2 * denom)
        return np.array([w1, w2, a1, a2])

    def energy(state):
        th1, th2, w1, w2 = state
        kinetic = 0.5 * m1 * (l1 * w1) ** 2 + 0.5 * m2 * (
            (l1 * w1) ** 2
            + (l2 * w2) ** 2
            + 2.0 * l1 * l2 * w1 * w2 * np.cos(th2 - th1)
        )
        potential = -m * g * l1 * np.cos(th1) - m2 * g * l2 * np.cos(th2)
        return kinetic + potential

    extras = {
        "energy": energy,
        "energy_scale": m * g * (l1 + l2),
    }
    return _Built(
        y0=np.array([np.pi / 2.0, np.pi / 2.0, 0.0, 0.0]),
        time_span=(0.0, 10.0),
        rhs=RHSBundle(f=f),
        extras=extras,
    )


register_family(
    Family(
        name="doublependulum",
        description="Planar double pendulum, highly sensitive to its start",
        num_vars_expr="4",
        schema={
            "m1": ("scalar", "finite", "positive"),
            "m2": ("scalar", "finite", "positive"),
            "l1": ("scalar", "finite", "positive"),
            "l2": ("scalar", "finite", "positive"),
            "g": ("scalar", "finite", "positive"),
        },
        make=_make,
        presets={
            "Canonical": Preset(
                "Canonical",
                {"m1": 1.0, "m2": 1.0, "l1": 1.0, "l2": 1.0, "g": 9.81},
                "Unit masses and rods, both arms horizontal at rest, "
                "span [0, 10]",
            ),
        },
    )
)
