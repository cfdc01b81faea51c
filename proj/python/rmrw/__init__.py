"""Reflected Metropolis random walk for symmetric Gaussian mixtures."""

from ._core import (
    Posterior,
    default_step_size,
    poincare_constant_1d,
    population_gradient,
    population_hessian,
    population_potential,
    run_chain,
    run_command,
    sample_data,
    tail_radius,
    version,
)

__all__ = [
    "Posterior",
    "default_step_size",
    "poincare_constant_1d",
    "population_gradient",
    "population_hessian",
    "population_potential",
    "run_chain",
    "run_command",
    "sample_data",
    "tail_radius",
    "version",
]
