"""Discrete fractional variational integrator (C++ core)."""

from ._core import (
    ControlUpdateError,
    DegenerateDataError,
    DomainError,
    NonConvergenceError,
    PreconditionError,
    UsageError,
    converge,
    convergence_order,
    delta_minus,
    delta_plus,
    dfibp_residual,
    example_names,
    gl_coefficients,
    lq_exact_control,
    mittag_leffler,
    noether,
    noether_matrix,
    solve,
    solved_example_exact_control,
    transfer_residual,
)

__all__ = [
    "ControlUpdateError",
    "DegenerateDataError",
    "DomainError",
    "NonConvergenceError",
    "PreconditionError",
    "UsageError",
    "converge",
    "convergence_order",
    "delta_minus",
    "delta_plus",
    "dfibp_residual",
    "example_names",
    "gl_coefficients",
    "lq_exact_control",
    "mittag_leffler",
    "noether",
    "noether_matrix",
    "solve",
    "solved_example_exact_control",
    "transfer_residual",
]
