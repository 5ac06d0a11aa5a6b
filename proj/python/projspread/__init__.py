"""Projected spread models: topological and random spread rates."""

from ._core import (
    ConvergenceError,
    CoverageError,
    EstimationError,
    Model,
    OutOfRangeError,
    ParseError,
    RegimeError,
    ResourceError,
    SpreadError,
    StructureError,
    ValidationError,
    empirical_rate,
    example_ids,
    fixture_ids,
    induced_mean_matrix,
    mc_rate,
    mean_matrix,
    perron,
    potential_patterns,
    rates,
    reproduce,
    rng_algorithm,
    run_cli,
)

__all__ = [
    "ConvergenceError",
    "CoverageError",
    "EstimationError",
    "Model",
    "OutOfRangeError",
    "ParseError",
    "RegimeError",
    "ResourceError",
    "SpreadError",
    "StructureError",
    "ValidationError",
    "empirical_rate",
    "example_ids",
    "fixture_ids",
    "induced_mean_matrix",
    "mc_rate",
    "mean_matrix",
    "perron",
    "potential_patterns",
    "rates",
    "reproduce",
    "rng_algorithm",
    "run_cli",
]
