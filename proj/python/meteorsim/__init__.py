"""Python bindings for the meteor simulator."""

from ._core import (
    Graph,
    MeteorError,
    coupling_experiment,
    heat_mean_profile,
    mass_via_paths,
    moment_report,
    simulate,
    stationary_sample,
    support_trial,
    verify_prime_solution,
)

__all__ = [
    "Graph",
    "MeteorError",
    "coupling_experiment",
    "heat_mean_profile",
    "mass_via_paths",
    "moment_report",
    "simulate",
    "stationary_sample",
    "support_trial",
    "verify_prime_solution",
]
