"""Truncated bosonic Fock space toolkit: Bargmann representation, second
quantization, Gibbs states, coherent-state trace estimation and
Hermite-Sobolev norms."""

from .errors import (
    CapacityError,
    ConfigError,
    ConvergenceError,
    ParseError,
    PositivityError,
    QuadratureError,
)
from .fock import OccupationIndex, TruncatedBasis, enumerate_basis
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CapacityError",
    "ConfigError",
    "ConvergenceError",
    "OccupationIndex",
    "ParseError",
    "PositivityError",
    "QuadratureError",
    "TruncatedBasis",
    "enumerate_basis",
]
