"""Survival analysis of student trajectories from administrative event logs."""

from ._core import (
    __version__,
    chi_square_sf,
    cli,
    generate_cohort_csv,
    km_fit,
    log_rank,
    analyze_csv,
    median_survival,
    sample_piecewise_exp,
    survival_at,
    true_survival,
)

__all__ = [
    "__version__",
    "analyze_csv",
    "chi_square_sf",
    "cli",
    "generate_cohort_csv",
    "km_fit",
    "log_rank",
    "median_survival",
    "sample_piecewise_exp",
    "survival_at",
    "true_survival",
]
