"""Condition numbers of random and kernel matrices across the aspect ratio n/d."""

from ._core import (
    AggregateRow,
    CapabilityError,
    DegenerateInputError,
    DomainError,
    Error,
    NumericalError,
    SizeError,
    SweepRecord,
    __version__,
    aggregate,
    condition_number,
    detect_peak,
    dot_kernel_matrix,
    el_karoui_linearize,
    error_amplification,
    gaussian_cloud,
    gaussian_matrix,
    linearized_kernel_matrix,
    log_spaced_grid,
    min_norm_solve,
    mp_edges,
    operator_norm,
    predicted_condition_number,
    pseudoinverse,
    rademacher_matrix,
    radial_kernel_matrix,
    run_sweep,
    singular_values,
    square_case_min_sv,
    svd,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
