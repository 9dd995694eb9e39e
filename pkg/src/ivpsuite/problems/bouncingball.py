"""Point mass bouncing elastically on differentiable terrain.

State is (x, y, vx, vy).  Flight is free fall; the event function is the
height above the ground, and the impact transform reflects the velocity
across the local ground tangent, preserving speed.
"""

import math

import numpy as np

from ..core import Family, Preset, RHSBundle, _Built, register_family
from ..errors import DimensionMismatch, EventOnVerticalWall


def reflect_velocity(vx, vy, slope):
    """Reflect (vx, vy) across a tangent line of slope ``slope``.

    Composition of rotating into the tangent frame, flipping the normal
    component, and rotating back.
    """
    if not math.isfinite(slope):
        raise EventOnVerticalWall("ground slope is not finite")
    s2 = slope * slope
    denom = 1.0 + s2
    new_vx = ((1.0 - s2) * vx + 2.0 * slope * vy) / denom
    new_vy = (2.0 * slope * vx - (1.0 - s2) * vy) / denom
    return new_vx, new_vy


def _make(params):
    g = float(params["g"])
    ground = params["ground"]
    slope = params["ground_slope"]

    def f(t, state):
        if len(state) != 4:
            raise DimensionMismatch(4, len(state))
        return np.array([state[2], state[3], 0.0, -g])

    def jacobian(t, state):
        jac = np.zeros((4, 4))
        jac[0, 2] = 1.0
        jac[1, 3] = 1.0
        return jac

    def event(t, state):
        return state[1] - ground(state[0])

    def transform(t, state):
        x, y, vx, vy = state
        new_vx, new_vy = reflect_velocity(vx, vy, slope(x))
        return np.array([x, y, new_vx, new_vy]), False

    rhs = RHSBundle(
        f=f,
        jacobian=jacobian,
        event=event,
        event_transform=transform,
        event_direction=-1.0,
    )
    extras = {
        "jacobian_sample_box": (
            np.array([-5.0, 0.0, -5.0, -10.0]),
            np.array([5.0, 5.0, 5.0, 10.0]),
        ),
        "ground": ground,
        "ground_slope": slope,
    }
    y0 = np.array([0.0, ground(0.0) + 1.0, 1.0, 0.0])
    return _Built(y0=y0, time_span=(0.0, 10.0), rhs=rhs, extras=extras)


def _flat(x):
    return 0.0


def _flat_slope(x):
    return 0.0


def _build_terrain(seed=1896):
    """Seeded sum of five sinusoids with total slope bounded by 1/2."""
    rng = np.random.default_rng(seed)
    freqs = rng.uniform(0.5, 3.0, size=5)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=5)
    amps = rng.uniform(0.5, 1.0, size=5)
    amps *= 0.5 / np.sum(np.abs(amps * freqs))

    def ground(x):
        return float(np.sum(amps * np.sin(freqs * x + phases)))

    def ground_slope(x):
        return float(np.sum(amps * freqs * np.cos(freqs * x + phases)))

    return ground, ground_slope


_TERRAIN, _TERRAIN_SLOPE = _build_terrain()


def _terrain_translate(overrides):
    overrides = dict(overrides)
    seed = overrides.pop("seed", None)
    if seed is not None:
        ground, slope = _build_terrain(int(seed))
        overrides["ground"] = ground
        overrides["ground_slope"] = slope
    return overrides


register_family(
    Family(
        name="bouncingball",
        description="Elastic ball on differentiable terrain (event problem)",
        num_vars_expr="4",
        schema={
            "g": ("scalar", "finite", "nonnegative"),
            "ground": ("function",),
            "ground_slope": ("function",),
        },
        make=_make,
        presets={
            "Canonical": Preset(
                "Canonical",
                {"g": 9.8, "ground": _flat, "ground_slope": _flat_slope},
                "Flat ground, drop from height 1 with unit horizontal "
                "speed, span [0, 10]",
            ),
            "RandomTerrain": Preset(
                "RandomTerrain",
                {"g": 9.8, "ground": _TERRAIN, "ground_slope": _TERRAIN_SLOPE},
                "Seeded sinusoidal terrain with slopes bounded by 0.5; "
                "accepts seed=N to regenerate",
                translate=_terrain_translate,
            ),
        },
    )
)
