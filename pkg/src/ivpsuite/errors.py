"""Exception taxonomy shared by every module of the suite."""


class IvpSuiteError(Exception):
    """Base class for all errors raised by this package."""


class UnknownFamily(IvpSuiteError):
    def __init__(self, family):
        super().__init__(f"unknown problem family '{family}'")
        self.family = family


class UnknownPreset(IvpSuiteError):
    def __init__(self, family, preset):
        super().__init__(f"family '{family}' has no preset '{preset}'")
        self.family = family
        self.preset = preset


class UnknownField(IvpSuiteError):
    def __init__(self, field):
        super().__init__(f"unknown parameter field '{field}'")
        self.field = field


class ValidationError(IvpSuiteError):
    """A parameter value violates one of its declared constraints.

    The message text is a frozen contract; tests and foreign bindings
    match it byte for byte.
    """

    def __init__(self, field, constraint):
        super().__init__(f"The field {field} does not satisfy {constraint}")
        self.field = field
        self.constraint = constraint


class DimensionMismatch(IvpSuiteError):
    def __init__(self, expected, got, what="state vector"):
        super().__init__(f"{what} has length {got}, expected {expected}")
        self.expected = expected
        self.got = got


class UnsupportedExactSolution(IvpSuiteError):
    """The problem cannot produce a closed-form solution for this setup."""


class EventOnVerticalWall(IvpSuiteError):
    """Ground slope is not finite at the impact point."""


class IndexOutOfRange(IvpSuiteError):
    def __init__(self, index, size):
        super().__init__(f"index {index} outside state space of size {size}")
        self.index = index
        self.size = size


class SingularMass(IvpSuiteError):
    """The mass-type operator could not be factorized."""


class NonConvergence(IvpSuiteError):
    """An iterative linear solver failed to reach its tolerance."""

    def __init__(self, iterations, residual):
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(residual {residual:.3e})"
        )
        self.iterations = iterations
        self.residual = residual


class IntegrationError(IvpSuiteError):
    """Base class for failures inside a time integration run."""


class StepUnderflow(IntegrationError):
    def __init__(self, t, h):
        super().__init__(f"step size underflow at t={t!r} (h={h!r})")
        self.t = t
        self.h = h


class MaxStepsExceeded(IntegrationError):
    def __init__(self, limit):
        super().__init__(f"exceeded the maximum of {limit} steps")
        self.limit = limit


class NonFiniteState(IntegrationError):
    def __init__(self, t):
        super().__init__(f"state became non-finite at t={t!r}")
        self.t = t


class NewtonDivergence(IntegrationError):
    def __init__(self, t, h):
        super().__init__(
            f"Newton iteration failed to converge at t={t!r} after "
            f"exhausting step reductions (h={h!r})"
        )
        self.t = t
        self.h = h


class EventStall(IntegrationError):
    def __init__(self, t):
        super().__init__(f"two events closer than the stall guard at t={t!r}")
        self.t = t


class NoJacobian(IvpSuiteError):
    """The requested analysis needs a Jacobian the problem does not provide."""


class DegenerateR(IvpSuiteError):
    """QR re-orthonormalization produced a zero diagonal entry."""


class ErrorFloorReached(IvpSuiteError):
    """Errors on the step ladder sit at round-off; no order can be observed."""
