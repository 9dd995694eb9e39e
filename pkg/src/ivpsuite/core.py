"""Problem abstraction: RHS bundles, parameter validation, preset registry.

Every concrete problem family plugs into the machinery here.  A family
declares a parameter schema (per-field constraint tags), a set of named
presets (default parameter maps), and a ``make`` function that turns a
validated parameter map into the initial condition, time span, and RHS
bundle.  Parameters are re-validated on every mutation and derived
operators (stencils, factorizations) are rebuilt, so a problem is always
internally consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    IvpSuiteError,
    UnknownFamily,
    UnknownField,
    UnknownPreset,
    UnsupportedExactSolution,
    ValidationError,
)

__all__ = [
    "CONSTRAINT_TAGS",
    "RHSBundle",
    "Problem",
    "Preset",
    "Family",
    "register_family",
    "get_family",
    "list_families",
    "build_preset",
    "validate_parameters",
    "mutate_parameter",
]


# ---------------------------------------------------------------------------
# constraint tags


def _is_number(v) -> bool:
    return isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(
        v, bool
    )


def _as_numeric_array(v):
    arr = np.asarray(v)
    if arr.dtype == object or arr.dtype.kind not in "iuf":
        return None
    return arr


def _check_scalar(v) -> bool:
    return _is_number(v) or (
        isinstance(v, np.ndarray) and v.ndim == 0 and _as_numeric_array(v) is not None
    )


def _check_vector(v) -> bool:
    arr = _as_numeric_array(v)
    return arr is not None and arr.ndim == 1 and arr.size >= 1


def _check_matrix(v) -> bool:
    arr = _as_numeric_array(v)
    return arr is not None and arr.ndim == 2


def _numeric_or_none(v):
    if callable(v):
        return None
    return _as_numeric_array(v)


def _check_nonnegative(v) -> bool:
    arr = _numeric_or_none(v)
    return arr is not None and bool(np.all(arr >= 0))


def _check_positive(v) -> bool:
    arr = _numeric_or_none(v)
    return arr is not None and bool(np.all(arr > 0))


def _check_finite(v) -> bool:
    arr = _numeric_or_none(v)
    return arr is not None and bool(np.all(np.isfinite(arr)))


def _check_integer(v) -> bool:
    arr = _numeric_or_none(v)
    if arr is None or not np.all(np.isfinite(arr)):
        return False
    return bool(np.all(np.mod(arr, 1) == 0))


def _check_function(v) -> bool:
    return callable(v)


CONSTRAINT_TAGS = {
    "scalar": _check_scalar,
    "vector": _check_vector,
    "matrix": _check_matrix,
    "nonnegative": _check_nonnegative,
    "positive": _check_positive,
    "finite": _check_finite,
    "integer": _check_integer,
    "function": _check_function,
}


def validate_parameters(params: dict, schema: dict) -> None:
    """Check every field in ``params`` against its schema constraints.

    Raises ``UnknownField`` for fields absent from the schema and
    ``ValidationError`` naming the first failing constraint of the first
    offending field (schema declaration order).  Constraint evaluation is
    pure; the same inputs always produce the same outcome.
    """
    for name in params:
        if name not in schema:
            raise UnknownField(name)
    for name, tags in schema.items():
        if name not in params:
            raise IvpSuiteError(f"missing parameter field '{name}'")
        value = params[name]
        for tag in tags:
            if not CONSTRAINT_TAGS[tag](value):
                raise ValidationError(name, tag)


# ---------------------------------------------------------------------------
# RHS bundle


@dataclass
class RHSBundle:
    """The right-hand side of an IVP plus optional derivative machinery.

    ``f`` maps ``(t, y) -> dy/dt``.  ``jacobian`` returns an ``n x n``
    matrix (dense ndarray or scipy sparse).  ``jvp``/``javp`` are the
    Jacobian-vector and Jacobian-adjoint-vector products ``(t, y, v)``.
    ``partitions`` is an ordered name -> RHSBundle map whose ``f`` values
    sum to the full ``f``.  ``event`` is a scalar function whose zero
    crossing (filtered by ``event_direction``: -1 falling, +1 rising,
    0 any) triggers ``event_transform(t, y) -> (y_new, terminal)``.
    """

    f: Callable
    jacobian: Optional[Callable] = None
    jvp: Optional[Callable] = None
    javp: Optional[Callable] = None
    partitions: Optional[dict] = None
    event: Optional[Callable] = None
    event_transform: Optional[Callable] = None
    event_direction: float = 0.0
    jacobian_approx: Optional[Callable] = None


@dataclass
class _Built:
    """What a family's ``make`` returns for a validated parameter map."""

    y0: np.ndarray
    time_span: tuple
    rhs: RHSBundle
    extras: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# problems


class _ParameterProxy:
    """Attribute-style access to problem parameters with validation on set."""

    def __init__(self, problem):
        object.__setattr__(self, "_problem", problem)

    def __getattr__(self, name):
        try:
            return self._problem._params[name]
        except KeyError:
            raise UnknownField(name) from None

    def __setattr__(self, name, value):
        self._problem.set_parameter(name, value)

    def __getitem__(self, name):
        return self.__getattr__(name)

    def __setitem__(self, name, value):
        self._problem.set_parameter(name, value)

    def keys(self):
        return self._problem._params.keys()

    def as_dict(self):
        return dict(self._problem._params)

    def __repr__(self):
        return f"Parameters({self._problem._params!r})"


class Problem:
    """A named IVP instance: parameters, time span, initial state, RHS.

    Construction and parameter mutation always re-validate against the
    family schema and rebuild the RHS bundle (including any cached
    operators or factorizations).  Evaluations of the bundle are
    read-only and safe to run concurrently; mutation requires exclusive
    access.
    """

    def __init__(self, family: "Family", preset: str, params: dict):
        self._family = family
        self.preset = preset
        self._params = dict(params)
        self._y0 = None
        self._time_span = None
        self._rebuild()

    # -- construction / mutation

    def _rebuild(self):
        built = self._family.make(self._params)
        y0 = np.asarray(built.y0, dtype=float)
        if self._y0 is not None and len(self._y0) == len(y0):
            # keep user-set state and span across compatible rebuilds,
            # e.g. swapping the linear solver mid-session
            y0 = self._y0
            span = self._time_span
        else:
            span = (float(built.time_span[0]), float(built.time_span[1]))
        self.rhs = built.rhs
        self.extras = built.extras
        self._y0 = y0
        self._time_span = span

    def set_parameter(self, name: str, value) -> "Problem":
        """Validate and apply one parameter change, rebuilding the RHS.

        On failure the problem is left exactly as it was.
        """
        if name not in self._family.schema:
            raise UnknownField(name)
        candidate = dict(self._params)
        candidate[name] = value
        candidate = self._family.validate(candidate)
        old = self._params
        self._params = candidate
        try:
            self._rebuild()
        except Exception:
            self._params = old
            raise
        return self

    # -- accessors

    @property
    def name(self) -> str:
        return self._family.name

    @property
    def family(self) -> "Family":
        return self._family

    @property
    def parameters(self) -> _ParameterProxy:
        return _ParameterProxy(self)

    @property
    def num_vars(self) -> int:
        return len(self._y0)

    @property
    def y0(self) -> np.ndarray:
        return self._y0

    @y0.setter
    def y0(self, value):
        arr = np.atleast_1d(np.asarray(value, dtype=float)).ravel()
        if len(arr) != len(self._y0):
            raise DimensionMismatch(len(self._y0), len(arr), "initial state")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("y0", "finite")
        self._y0 = arr

    @property
    def time_span(self) -> tuple:
        return self._time_span

    @time_span.setter
    def time_span(self, value):
        t0, tf = float(value[0]), float(value[1])
        if not (math.isfinite(t0) and math.isfinite(tf)) or not t0 < tf:
            raise ValidationError("time_span", "finite increasing pair")
        self._time_span = (t0, tf)

    def exact_solution(self, t):
        """Closed-form solution at time ``t`` where one exists.

        Propagates the problem's current initial state from the current
        initial time.
        """
        fn = self.extras.get("exact")
        if fn is None:
            raise UnsupportedExactSolution(
                f"'{self.name}' offers no exact solution for these parameters"
            )
        return fn(t, self._time_span[0], self._y0)

    def check_dimension(self, y):
        if len(y) != self.num_vars:
            raise DimensionMismatch(self.num_vars, len(y))

    def __repr__(self):
        return (
            f"Problem({self.name}/{self.preset}, num_vars={self.num_vars}, "
            f"time_span={self._time_span})"
        )


# ---------------------------------------------------------------------------
# presets and families


@dataclass
class Preset:
    """Named default configuration; builds a Problem from override pairs."""

    name: str
    defaults: dict
    description: str = ""
    # consumes preset-specific override keys (e.g. a size alias) and
    # returns a parameter-field override map
    translate: Optional[Callable[[dict], dict]] = None


@dataclass
class Family:
    """A problem family: schema, structural checks, builder, presets."""

    name: str
    description: str
    num_vars_expr: str
    schema: dict
    make: Callable[[dict], _Built]
    presets: dict
    structural: Optional[Callable[[dict], None]] = None
    # pure coercion applied before validation, e.g. wrapping a numeric
    # forcing constant into a function of t
    normalize: Optional[Callable[[dict], dict]] = None

    def validate(self, params: dict) -> dict:
        if self.normalize is not None:
            params = self.normalize(dict(params))
        validate_parameters(params, self.schema)
        if self.structural is not None:
            self.structural(params)
        return params

    def build(self, preset_name: str, overrides: Optional[dict] = None) -> Problem:
        if preset_name not in self.presets:
            raise UnknownPreset(self.name, preset_name)
        preset = self.presets[preset_name]
        overrides = dict(overrides or {})
        if preset.translate is not None:
            overrides = preset.translate(overrides)
        params = dict(preset.defaults)
        for key, value in overrides.items():
            if key not in self.schema:
                raise UnknownField(key)
            params[key] = value
        params = self.validate(params)
        return Problem(self, preset_name, params)


_REGISTRY: dict = {}


def register_family(family: Family) -> Family:
    _REGISTRY[family.name] = family
    return family


def get_family(name: str) -> Family:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownFamily(name) from None


def list_families() -> list:
    return [_REGISTRY[k] for k in sorted(_REGISTRY)]


def build_preset(family: str, preset: str = "Canonical", overrides=None) -> Problem:
    """Construct a fully validated Problem from a registered preset."""
    return get_family(family).build(preset, overrides)


def mutate_parameter(problem: Problem, name: str, value) -> Problem:
    """Functional-style alias for ``Problem.set_parameter``."""
    return problem.set_parameter(name, value)
