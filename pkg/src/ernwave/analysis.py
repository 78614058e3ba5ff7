"""Decay-rate fits, convergence-order estimation, and the logarithmic
substitution oracle that cross-checks the constant-amplitude null form
against a plain linear evolution of exponentially transformed data."""

import math
from dataclasses import dataclass

import numpy as np

from .evolution import (
    GridSpec,
    InitialDataSpec,
    evolve,
    init_characteristic_data,
    init_from_samples,
)
from .nonlinearity import AProfile, Kind, NonlinearitySpec
from .spacetime import SpacetimeParams


@dataclass(frozen=True)
class FitResult:
    exponent: float
    amplitude: float
    window: tuple
    residual_rms: float


def fit_decay(tau, value, window=None) -> FitResult:
    """Power-law fit value ~ amplitude * (1+tau)^(-exponent) by least
    squares in log-log.  Default window drops the first quarter of the
    range (early transients)."""
    tau = np.asarray(tau, dtype=float)
    value = np.asarray(value, dtype=float)
    if tau.shape != value.shape or tau.ndim != 1:
        raise ValueError("tau and value must be 1-d arrays of equal length")
    if window is None:
        window = (tau[-1] / 4.0, tau[-1])
    a, b = window
    keep = (tau >= a) & (tau <= b)
    if keep.sum() < 10:
        raise ValueError(
            f"need at least 10 samples in window {window}, "
            f"have {int(keep.sum())}")
    vals = value[keep]
    if np.any(vals <= 0.0):
        raise ValueError("decay fit needs positive values in the window")
    x = np.log1p(tau[keep])
    y = np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return FitResult(
        exponent=float(-slope),
        amplitude=float(math.exp(intercept)),
        window=(float(a), float(b)),
        residual_rms=float(np.sqrt(np.mean(resid**2))))


def convergence_order(coarse, medium, fine) -> float:
    """log2 of the max-norm error ratio across a resolution-halving
    ladder; +inf when the levels already agree exactly."""
    c = np.asarray(coarse, dtype=float)
    m = np.asarray(medium, dtype=float)
    f = np.asarray(fine, dtype=float)
    if not (c.shape == m.shape == f.shape):
        raise ValueError(
            f"ladder series must align; shapes {c.shape}, {m.shape}, "
            f"{f.shape}")
    e1 = float(np.max(np.abs(c - m)))
    e2 = float(np.max(np.abs(m - f)))
    if e2 == 0.0:
        return math.inf
    return math.log2(e1 / e2)


def nirenberg_pair(p: SpacetimeParams, g: GridSpec, data: InitialDataSpec,
                   store_stride: int = 1):
    """Evolve the same bump twice: once under the unit-amplitude null
    form, once linearly from the pointwise-exponentiated data.  Both
    solve the same continuum problem through phi = exp(-psi)."""
    nl = NonlinearitySpec(kind=Kind.NULL_FORM,
                          a_profile=AProfile.CONSTANT, a0=1.0)
    res_nl = evolve(p, g, data, nl, store_stride=store_stride)
    state = init_characteristic_data(data, p, g)
    transformed = init_from_samples(np.exp(-state.psi[0]), p, g)
    res_lin = evolve(p, g, transformed, NonlinearitySpec(),
                     store_stride=store_stride)
    return res_nl, res_lin


def nirenberg_error(res_nl, res_lin) -> float:
    """Max over stored grid points of |psi_nonlinear + ln(phi_linear)|."""
    if res_nl.full is None or res_lin.full is None:
        raise ValueError("both runs must store rows (store_stride >= 1)")
    if res_nl.full.shape != res_lin.full.shape:
        raise ValueError("runs were stored on different grids")
    if res_nl.status != 0 or res_lin.status != 0:
        raise ValueError("comparison needs complete (non-aborted) runs")
    phi = res_lin.full
    if np.any(phi <= 0.0):
        raise ValueError(
            "linear evolution left the positive cone; oracle invalid")
    return float(np.max(np.abs(res_nl.full + np.log(phi))))


def nirenberg_ladder(p: SpacetimeParams, r_max: float, v_max: float,
                     steps, data: InitialDataSpec):
    """(errors, order): oracle mismatch at each grid step plus the log2
    ratio of the last refinement.  Steps must halve."""
    steps = [float(h) for h in steps]
    if len(steps) < 2:
        raise ValueError("need at least two grid steps")
    for a, b in zip(steps, steps[1:]):
        if abs(a / b - 2.0) > 1e-9:
            raise ValueError(f"steps must halve, got {steps}")
    errs = []
    for h in steps:
        g = GridSpec.for_domain(p, r_max, v_max, h, h)
        errs.append(nirenberg_error(*nirenberg_pair(p, g, data)))
    order = math.log2(errs[-2] / errs[-1]) if errs[-1] > 0.0 else math.inf
    return errs, order
