"""Classical particle in a linear potential, in phase space and in Hilbert space.

Submodules
----------
phase_flow        characteristics, Gaussian states, Liouville residual
duality_maps      phase-space <-> density-matrix transforms, factorization
schrodinger_like  classical wave function, gauge phase, Green function
oracles           independent reference computations
fieldio           text serialization of sampled fields
verification      acceptance suites behind ``liouspace verify``
"""
from .exceptions import (
    ChirpUndersampledError,
    DegenerateDiagonalError,
    FieldFormatError,
    FieldInvariantError,
    GridMismatchError,
    InputNotDecayedError,
    LiouspaceError,
    NonHermitianError,
    NonPositiveResidualError,
    NotFactorizableError,
    WindowTooSmallError,
)
from .fields import DensityMatrixField, PhaseSpaceField, UniformGrid1D, WaveFunctionField

__version__ = "0.1.0"

__all__ = [
    "ChirpUndersampledError",
    "DegenerateDiagonalError",
    "DensityMatrixField",
    "FieldFormatError",
    "FieldInvariantError",
    "GridMismatchError",
    "InputNotDecayedError",
    "LiouspaceError",
    "NonHermitianError",
    "NonPositiveResidualError",
    "NotFactorizableError",
    "PhaseSpaceField",
    "UniformGrid1D",
    "WaveFunctionField",
    "WindowTooSmallError",
]
