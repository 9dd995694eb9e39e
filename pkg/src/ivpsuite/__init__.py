"""A library of initial value problems with presets, validated
parameters, derivative bundles, splittings, and event functions, plus
reference integrators and chaos/convergence analysis tools."""

from . import problems  # noqa: F401  (registers every family)
from .analysis import (
    check_jacobian,
    convergence_order,
    kaplan_yorke_dimension,
    lyapunov_spectrum,
)
from .core import (
    Family,
    Preset,
    Problem,
    RHSBundle,
    build_preset,
    get_family,
    list_families,
    mutate_parameter,
    validate_parameters,
)
from .errors import (
    DegenerateR,
    DimensionMismatch,
    ErrorFloorReached,
    EventOnVerticalWall,
    EventStall,
    IndexOutOfRange,
    IntegrationError,
    IvpSuiteError,
    MaxStepsExceeded,
    NewtonDivergence,
    NoJacobian,
    NonConvergence,
    NonFiniteState,
    SingularMass,
    StepUnderflow,
    UnknownFamily,
    UnknownField,
    UnknownPreset,
    UnsupportedExactSolution,
    ValidationError,
)
from .integrators import (
    Event,
    IntegratorOptions,
    Trajectory,
    integrate_adaptive,
    integrate_fixed,
    integrate_implicit,
    integrate_with_events,
)

__version__ = "0.1.0"

__all__ = [
    "build_preset",
    "get_family",
    "list_families",
    "mutate_parameter",
    "validate_parameters",
    "Problem",
    "Preset",
    "Family",
    "RHSBundle",
    "IntegratorOptions",
    "Trajectory",
    "Event",
    "integrate_adaptive",
    "integrate_fixed",
    "integrate_implicit",
    "integrate_with_events",
    "lyapunov_spectrum",
    "kaplan_yorke_dimension",
    "convergence_order",
    "check_jacobian",
    "IvpSuiteError",
    "UnknownFamily",
    "UnknownPreset",
    "UnknownField",
    "ValidationError",
    "DimensionMismatch",
    "UnsupportedExactSolution",
    "EventOnVerticalWall",
    "IndexOutOfRange",
    "SingularMass",
    "NonConvergence",
    "IntegrationError",
    "StepUnderflow",
    "MaxStepsExceeded",
    "NonFiniteState",
    "NewtonDivergence",
    "EventStall",
    "NoJacobian",
    "DegenerateR",
    "ErrorFloorReached",
]
