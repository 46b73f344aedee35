"""Wave kernels for magnetic Schrodinger operators on the hyperbolic plane and the Morse line."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConvergenceError,
    DifferentiationError,
    DomainError,
    HyperwaveError,
    ParameterError,
    PoleError,
    StencilError,
)
