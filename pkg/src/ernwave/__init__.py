"""Characteristic evolution of spherically symmetric semilinear waves on
(near-)extremal Reissner-Nordstrom exteriors, with horizon and energy
diagnostics.

The package is organized as a small stack:

    spacetime     closed-form background (metric factor, horizon, tortoise)
    nonlinearity  right-hand-side catalog in both coordinate charts
    evolution     double-null marching scheme and streaming recorders
    diagnostics   per-slice and bulk energy functionals
    horizon       horizon time series, conserved charge, blow-up bounds
    analysis      decay fits, convergence orders, linearization oracle
    cli           configuration files, run orchestration, artifacts
"""

from .spacetime import SpacetimeParams, HorizonInfo, horizon_info
from .spacetime import metric_D, metric_D_prime, metric_D_second, tortoise

__all__ = [
    "SpacetimeParams",
    "HorizonInfo",
    "horizon_info",
    "metric_D",
    "metric_D_prime",
    "metric_D_second",
    "tortoise",
]

__version__ = "0.1.0"
