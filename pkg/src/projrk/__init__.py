"""Projective integration schemes written as explicit Runge-Kutta tableaus."""

from .tableau import (
    EmbeddedTableau,
    ParameterError,
    PartitionedTableau,
    PiParams,
    Tableau,
    TableauError,
    TableauParseError,
    ValidationReport,
    validate,
    validate_all,
)
from .schemes import parse_scheme, pfe, prk, tpfe, TelescopicParams
from .integrator import InstabilityError, OdeSystem, StepResult, embedded_step, integrate, rk_step
from .analysis import stability_grid, stability_value

__version__ = "0.1.0"

__all__ = [
    "EmbeddedTableau",
    "InstabilityError",
    "OdeSystem",
    "ParameterError",
    "PartitionedTableau",
    "PiParams",
    "StepResult",
    "Tableau",
    "TableauError",
    "TableauParseError",
    "TelescopicParams",
    "ValidationReport",
    "embedded_step",
    "integrate",
    "parse_scheme",
    "pfe",
    "prk",
    "rk_step",
    "stability_grid",
    "stability_value",
    "tpfe",
    "validate",
    "validate_all",
    "__version__",
]
