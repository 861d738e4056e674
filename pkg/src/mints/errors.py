"""Exception types shared across the package."""


class MintsError(Exception):
    """Base class for all package errors."""


class FeedbackKindError(MintsError, TypeError):
    """Scalar and vector feedback mixed within one dataset."""


class BeliefError(MintsError, ValueError):
    """Invalid belief weights (negative, not normalized, or empty posterior)."""


class SolverError(MintsError, RuntimeError):
    """A convex solver failed to produce a usable answer."""


class InconsistentDataError(MintsError, ValueError):
    """No Lipschitz function can interpolate the observed values."""


class RejectionLimitError(MintsError, RuntimeError):
    """Rejection sampler exhausted its attempt budget."""

    def __init__(self, attempts: int, accepted: int = 0):
        self.attempts = attempts
        self.acceptance_rate = accepted / attempts if attempts else 0.0
        super().__init__(
            f"no accepted draw after {attempts} attempts "
            f"(estimated acceptance rate {self.acceptance_rate:.3g})"
        )


class GeometryError(MintsError, ValueError):
    """Degenerate polygon or ellipsoid input."""


class ConfigError(MintsError, ValueError):
    """Invalid experiment configuration; message carries the field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
