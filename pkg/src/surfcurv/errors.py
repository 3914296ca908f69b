"""Exception hierarchy shared across the package."""


class SurfcurvError(Exception):
    """Base class for all package errors."""


class DomainError(SurfcurvError):
    """Evaluation outside a declared validity interval, or a singular
    intermediate (log of non-positive, division by zero, non-integer
    power of a non-positive base, NaN/Inf anywhere)."""


class DegenerateError(SurfcurvError):
    """First fundamental form degenerate at the point: EG - F^2 vanishes
    to tolerance, so no unit normal exists."""


class CausalityError(SurfcurvError):
    """Lorentzian causal constraint violated for the requested graph axis."""


class SpecError(SurfcurvError):
    """Invalid family parameters or surface specification; the message
    names the violated invariant."""


class ParseError(SurfcurvError):
    """Malformed expression or surface-spec document."""


class AllDegenerateError(SurfcurvError):
    """Every node of a sampling grid was degenerate or causally excluded."""


class SingularityError(SurfcurvError):
    """ODE right-hand side exceeded the magnitude cap during integration."""
