"""Python bindings for the affdim C++ core."""

from ._core import (
    AffdimError,
    ConfigError,
    DomainError,
    EstimationError,
    IoError,
    NumericalError,
    PreconditionError,
    ResourceError,
    ShapeError,
    admissible_pair,
    affinity_dimension,
    box_count,
    exterior_power,
    irreducibility_check,
    kronecker,
    level_pressure,
    projected_exponent,
    proximality_check,
    sample_attractor,
    singular_values,
    tensor_certificate,
)

__version__ = "0.1.0"
