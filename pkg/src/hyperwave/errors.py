"""Exception hierarchy shared by all hyperwave modules."""


class HyperwaveError(Exception):
    """Base class for every error raised by the package."""


class DomainError(HyperwaveError, ValueError):
    """An argument lies outside the region where the requested method is valid."""


class PoleError(DomainError):
    """Evaluation at a pole (e.g. log-gamma at a non-positive integer)."""


class ParameterError(HyperwaveError, ValueError):
    """An option is inconsistent with the other arguments."""


class ConvergenceError(HyperwaveError, ArithmeticError):
    """A series, quadrature or refinement loop did not reach its tolerance."""


class DifferentiationError(HyperwaveError, ArithmeticError):
    """Finite-difference step cannot be chosen safely near the evaluation point."""


class StencilError(DomainError):
    """A finite-difference stencil leaves the model domain."""
