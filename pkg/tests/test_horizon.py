"""Horizon series and blow-up certification: brute-force verification of
the inequality constant, frozen bound values, drift/refinement behavior,
and run-level ODE domination."""

import math

import numpy as np
import pytest

from ernwave.evolution import GridSpec, InitialDataSpec, evolve
from ernwave.horizon import (
    GrowthFit,
    HorizonSeries,
    blowup_bound,
    blowup_constant,
    blowup_report,
    certify_comparison,
    conservation_drift,
    growth_fit,
    h_transport_residual,
    horizon_series,
)
from ernwave.nonlinearity import Kind, NonlinearitySpec
from ernwave.spacetime import SpacetimeParams

EXT = SpacetimeParams(mass=1.0, charge=1.0)


# ------------------------------------------------- inequality constant

def brute_min_ratio(n, mass, m=301):
    """min of (a^2n + b^2n) / (a + b/M)^2n over a sign-mixed grid."""
    a = np.linspace(-3.0, 3.0, m)
    b = np.linspace(-3.0, 3.0, m)
    aa, bb = np.meshgrid(a, b)
    den = (aa + bb / mass) ** (2 * n)
    num = aa ** (2 * n) + bb ** (2 * n)
    keep = den > 1e-12
    return float(np.min(num[keep] / den[keep]))


@pytest.mark.parametrize("n,mass", [(2, 1.0), (2, 0.8), (3, 1.0), (2, 1.3)])
def test_blowup_constant_is_valid_lower_bound(n, mass):
    c = blowup_constant(n, mass)
    sharp = 2.0 ** (1 - 2 * n) * min(1.0, mass ** (2 * n))
    got = brute_min_ratio(n, mass)
    assert got >= c                       # certified constant never exceeds
    assert got >= 0.5 * sharp             # ... and is within the 2x margin
    assert c == 0.5 * sharp


def test_blowup_constant_frozen_values():
    assert blowup_constant(2, 1.0) == 1.0 / 16.0
    assert blowup_constant(3, 1.0) == 1.0 / 64.0
    assert blowup_constant(2, 2.0) == 1.0 / 16.0   # min(1, M^4) saturates
    with pytest.raises(ValueError):
        blowup_constant(1, 1.0)
    with pytest.raises(ValueError):
        blowup_constant(2, -1.0)


def test_blowup_bound_values():
    assert blowup_bound(2, 1.0, 1.0) == 16.0 / 3.0
    assert blowup_bound(2, 0.5, 1.0) == pytest.approx(16.0 / (3.0 * 0.125))
    assert blowup_bound(2, 1e-4, 1.0) > 1e10       # eta -> 0 diverges
    assert blowup_bound(2, 0.0, 1.0) == math.inf
    assert blowup_bound(2, -1.0, 1.0) == math.inf


# ----------------------------------------------------------- series

def test_horizon_series_zero_run():
    g = GridSpec.for_domain(EXT, 3.0, 2.0, 0.02, 0.02)
    r = evolve(EXT, g, InitialDataSpec(0.0, 1.0, 0.5), NonlinearitySpec())
    s = horizon_series(r)
    for arr in (s.psi, s.T_psi, s.Y_psi, s.Y_psi_fd, s.Y2_psi, s.H):
        assert np.all(arr == 0.0)
    assert conservation_drift(s) == (0.0, 0.0)


def test_horizon_series_consistency(lin_run):
    s = horizon_series(lin_run)
    assert np.array_equal(s.H, s.Y_psi + s.psi / s.mass)   # exact recompute
    assert s.tau[1] - s.tau[0] == pytest.approx(s.dv)
    # the two transversal routes agree at the strip's truncation order
    scale = np.max(np.abs(s.Y_psi))
    assert scale > 0.0
    assert np.max(np.abs(s.Y_psi - s.Y_psi_fd)) < 2e-3 * scale
    drift, norm = conservation_drift(s)
    assert drift < 1e-6
    assert norm == drift / 0.1**2


def test_drift_refines_at_second_order():
    drifts = []
    for h in (0.02, 0.01):
        g = GridSpec.for_domain(EXT, 3.0, 4.0, h, h)
        d = InitialDataSpec(0.1, g.u_extent - 0.25, 0.5,
                            horizon_positive=True)
        r = evolve(EXT, g, d, NonlinearitySpec())
        drifts.append(conservation_drift(horizon_series(r))[0])
    ratio = drifts[0] / drifts[1]
    assert 2.5 <= ratio <= 6.5


def test_transport_residual_nullform(null_run):
    s = horizon_series(null_run)
    nl = null_run.nl
    resid = h_transport_residual(s, nl)
    bound = 10.0 * (s.du + s.dv) * np.max(np.abs(s.T_psi * s.Y_psi))
    assert resid <= bound
    with pytest.raises(ValueError):
        h_transport_residual(s, NonlinearitySpec(kind=Kind.POWER_TERM))


def test_growth_fit_synthetic():
    m = 200
    tau = np.linspace(0.0, 10.0, m)
    base = dict(psi=np.zeros(m), T_psi=np.zeros(m), Y_psi=np.zeros(m),
                Y_psi_fd=np.zeros(m), Y3_psi=np.zeros(m), H=np.zeros(m),
                mass=1.0, du=0.01, dv=0.05, epsilon=0.1)
    lin = HorizonSeries(tau=tau, Y2_psi=-0.3 * tau, **base)
    fit = growth_fit(lin, 2)
    assert fit.slope == pytest.approx(0.3, abs=1e-9)
    assert fit.increasing
    assert fit.window[0] == pytest.approx(tau[m // 2])
    bounded = HorizonSeries(tau=tau, Y2_psi=0.05 * np.sin(tau), **base)
    assert abs(growth_fit(bounded, 2).slope) < 0.05
    with pytest.raises(ValueError):
        growth_fit(lin, 1)
    short = HorizonSeries(tau=tau[:5], Y2_psi=tau[:5],
                          **{k: (v[:5] if isinstance(v, np.ndarray) else v)
                             for k, v in base.items()})
    with pytest.raises(ValueError):
        growth_fit(short, 2)


def test_blowup_report_nonnull_run():
    nl = NonlinearitySpec(kind=Kind.NONNULL_HORIZON, n=2)
    g = GridSpec.for_domain(EXT, 3.0, 8.0, 0.01, 0.01)
    d = InitialDataSpec(1.0, g.u_extent - 0.25, 0.5, horizon_positive=True)
    r = evolve(EXT, g, d, nl)
    rep = blowup_report(r)
    assert rep.n == 2
    assert rep.eta0 > 0.0
    assert rep.c_n == 1.0 / 16.0
    assert rep.lower_envelope_ok
    assert rep.tau_blow <= rep.tau_star
    # H grows monotonically along the horizon for this source
    s = horizon_series(r)
    h = s.H[np.abs(s.H) < 1e3]
    assert np.all(np.diff(h) > -1e-10)


def test_certify_rejects_negative_eta():
    g = GridSpec.for_domain(EXT, 3.0, 2.0, 0.02, 0.02)
    r = evolve(EXT, g, InitialDataSpec(0.05, 1.0, 0.5), NonlinearitySpec())
    s = horizon_series(r)
    if s.H[0] > 0.0:
        pytest.skip("interior bump produced positive H(0)")
    assert not certify_comparison(s, 2)


def test_nondecay_of_transversal_derivative():
    # wherever |psi| has fallen under M |H0| / 2, |Y psi| must exceed
    # |H0| / 2 up to the measured drift
    g = GridSpec.for_domain(EXT, 3.0, 6.0, 0.01, 0.01)
    d = InitialDataSpec(0.1, g.u_extent - 0.25, 0.5, horizon_positive=True)
    r = evolve(EXT, g, d, NonlinearitySpec(kind=Kind.NULL_FORM))
    s = horizon_series(r)
    h0 = abs(s.H[0])
    assert h0 > 0.0
    drift, _ = conservation_drift(s)
    mask = np.abs(s.psi) <= s.mass * h0 / 2.0
    assert mask.any()
    assert np.all(np.abs(s.Y_psi[mask]) >= h0 / 2.0 - drift - 1e-12)


def test_blowup_report_requires_n():
    g = GridSpec.for_domain(EXT, 3.0, 2.0, 0.02, 0.02)
    r = evolve(EXT, g, InitialDataSpec(0.05, 1.0, 0.5), NonlinearitySpec())
    with pytest.raises(ValueError):
        blowup_report(r)
    rep = blowup_report(r, n=2)
    assert rep.tau_blow == math.inf and not rep.lower_envelope_ok
