"""Source-term catalog checks.

The load-bearing test here is the two-chart consistency sweep: the null-gauge
evaluation and the outgoing-time/radius evaluation of the same quadratic form
must agree to roundoff once the time derivative is put in the Killing
normalization.  The quadratic form itself is cross-checked against a literal
inverse-metric contraction.
"""

import numpy as np
import pytest

from ernwave.nonlinearity import (
    AProfile,
    Kind,
    NonlinearitySpec,
    amplitude_A,
    chart_consistency_gap,
    cutoff_chi,
    smoothstep5,
    source_ef,
    source_null,
)

NULL_CONST = NonlinearitySpec(kind=Kind.NULL_FORM)
NULL_COS = NonlinearitySpec(kind=Kind.NULL_FORM, a_profile=AProfile.COSINE, a0=2.0)
NULL_LIN = NonlinearitySpec(kind=Kind.NULL_FORM, a_profile=AProfile.LINEAR)
POWER6 = NonlinearitySpec(kind=Kind.POWER_TERM, power_l=6)
NONNULL2 = NonlinearitySpec(kind=Kind.NONNULL_HORIZON, n=2)
ZERO = NonlinearitySpec()


def test_spec_validation():
    with pytest.raises(ValueError):
        NonlinearitySpec(kind=Kind.POWER_TERM, power_l=1)
    with pytest.raises(ValueError):
        NonlinearitySpec(kind=Kind.NONNULL_HORIZON, n=1)
    with pytest.raises(ValueError):
        NonlinearitySpec(kind=Kind.NONNULL_HORIZON, cutoff_width=0.0)
    with pytest.raises(ValueError):
        NonlinearitySpec(a0=float("inf"))
    # int -> enum coercion
    s = NonlinearitySpec(kind=1, a_profile=2)
    assert s.kind == Kind.NULL_FORM and s.a_profile == AProfile.LINEAR


def test_amplitude_profiles():
    psi = np.array([-1.0, 0.0, 0.4, 2.5])
    assert np.all(amplitude_A(psi, NULL_CONST) == 1.0)
    assert np.allclose(amplitude_A(psi, NULL_COS), 2.0 * np.cos(psi), rtol=1e-15)
    assert np.all(amplitude_A(psi, NULL_LIN) == psi)
    assert amplitude_A(0.0, NULL_COS) == 2.0
    with pytest.raises(ValueError):
        amplitude_A(0.1, POWER6)
    assert NULL_COS.derivative_bound(2) == 2.0
    with pytest.raises(ValueError):
        NULL_LIN.derivative_bound(0)


def test_amplitude_bounds_sampled():
    # |A|, |A'|, |A''| <= a0 for the bounded profiles; |A| <= |psi| for LINEAR
    rng = np.random.default_rng(3)
    psi = rng.uniform(-8.0, 8.0, size=10_000)
    h = 1e-5
    for spec in (NULL_CONST, NULL_COS):
        a0 = abs(spec.a0)
        a = amplitude_A(psi, spec)
        d1 = (amplitude_A(psi + h, spec) - amplitude_A(psi - h, spec)) / (2.0 * h)
        d2 = (amplitude_A(psi + h, spec) - 2.0 * a + amplitude_A(psi - h, spec)) / h**2
        assert np.max(np.abs(a)) <= a0 + 1e-12
        assert np.max(np.abs(d1)) <= a0 * (1.0 + 1e-6)
        assert np.max(np.abs(d2)) <= a0 * (1.0 + 1e-4)
    assert np.all(np.abs(amplitude_A(psi, NULL_LIN)) <= np.abs(psi))


def test_source_ef_frozen_examples():
    # null form, D = 0 (on-horizon): F = A * 2 T Y
    assert source_ef(0.3, 1.0, 1.0, 0.0, NULL_CONST) == 2.0
    # null form, static profile: F = A D Y^2
    assert source_ef(0.0, 0.0, 3.0, 1.0, NULL_COS) == 18.0
    # sphere-like amplitude: A = psi
    assert source_ef(0.5, 1.0, 1.0, 0.0, NULL_LIN) == 1.0
    # pure power
    assert source_ef(-2.0, 9.9, -7.7, 0.5, POWER6) == 64.0
    assert source_ef(0.5, 0.0, 0.0, 0.0, POWER6) == 0.015625
    # zero kind
    assert source_ef(5.0, 5.0, 5.0, 1.0, ZERO) == 0.0


def test_source_ef_nonnull_examples():
    # at the horizon chi = 1: psi^4 + T^4 + Y^4
    h = 0.1
    f = source_ef(h, h, h, 0.0, NONNULL2, r=1.0, r_plus=1.0)
    assert f == pytest.approx(3.0 * h**4, rel=1e-14)
    assert source_ef(h, 0.0, 0.0, 0.0, NONNULL2, r=1.0, r_plus=1.0) == pytest.approx(h**4, rel=1e-15)
    # beyond the cutoff the derivative terms drop out
    f_far = source_ef(h, 5.0, 7.0, 0.9, NONNULL2, r=3.0, r_plus=1.0)
    assert f_far == pytest.approx(h**4, rel=1e-15)
    # radius is required for this kind
    with pytest.raises(ValueError):
        source_ef(h, h, h, 0.0, NONNULL2)


def test_source_ef_nonnull_nonnegative():
    rng = np.random.default_rng(11)
    psi = rng.uniform(-3.0, 3.0, size=10_000)
    t = rng.uniform(-3.0, 3.0, size=10_000)
    y = rng.uniform(-3.0, 3.0, size=10_000)
    r = 1.0 + rng.uniform(0.0, 2.5, size=10_000)
    f = source_ef(psi, t, y, 0.5, NONNULL2, r=r, r_plus=1.0)
    assert np.all(f >= 0.0)
    assert np.all(f >= psi**4 - 1e-15)  # chi >= 0 only adds


def test_source_ef_rejects_negative_D():
    with pytest.raises(ValueError):
        source_ef(0.1, 0.1, 0.1, -0.5, NULL_CONST)


def test_source_null_examples_and_guards():
    # Omega^2 = 4, A = 1: F = -(4/4) du dv = -du dv
    assert source_null(0.0, 0.5, 0.25, 2.0, 4.0, NULL_CONST) == -0.125
    assert source_null(-2.0, 1.0, 1.0, 2.0, 4.0, POWER6) == 64.0
    assert source_null(9.0, 1.0, 1.0, 2.0, 4.0, ZERO) == 0.0
    with pytest.raises(ValueError):
        source_null(0.1, 0.1, 0.1, 2.0, 0.0, NULL_CONST)
    with pytest.raises(ValueError):
        source_null(0.1, 0.1, 0.1, 2.0, -1.0, NULL_CONST)
    with pytest.raises(ValueError):
        source_null(0.1, 0.1, 0.1, 2.0, 4.0, NONNULL2)


def test_quadratic_form_matches_metric_contraction():
    # literal contraction with the inverse metric in (time, radius) variables:
    # g^tt = 0, g^tr = g^rt = 1, g^rr = D, so g(grad psi, grad psi)
    # = 2 T Y + D Y^2, and F = A(psi) times that.
    rng = np.random.default_rng(99)
    n = 10_000
    psi = rng.uniform(-2.0, 2.0, size=n)
    t = rng.uniform(-2.0, 2.0, size=n)
    y = rng.uniform(-2.0, 2.0, size=n)
    d = rng.uniform(0.0, 1.0, size=n)
    for spec in (NULL_CONST, NULL_COS, NULL_LIN):
        f = source_ef(psi, t, y, d, spec)
        ginv = np.zeros((n, 2, 2))
        ginv[:, 0, 1] = ginv[:, 1, 0] = 1.0
        ginv[:, 1, 1] = d
        grad = np.stack([t, y], axis=1)
        contraction = np.einsum("ni,nij,nj->n", grad, ginv, grad)
        f_ref = amplitude_A(psi, spec) * contraction
        assert np.max(np.abs(f - f_ref)) < 1e-13


def test_chart_consistency_to_roundoff():
    # same F from both charts once T is halved into the Killing normalization
    rng = np.random.default_rng(2024)
    n = 10_000
    psi = rng.uniform(-2.0, 2.0, size=n)
    du = rng.uniform(-2.0, 2.0, size=n)
    dv = rng.uniform(-2.0, 2.0, size=n)
    nu = -rng.uniform(0.1, 2.0, size=n)
    d = rng.uniform(0.0, 1.0, size=n)
    r = 1.0 + rng.uniform(0.0, 9.0, size=n)
    for spec in (NULL_CONST, NULL_COS, NULL_LIN, POWER6, ZERO):
        gap = chart_consistency_gap(psi, du, dv, r, nu, d, spec)
        assert np.max(gap) <= 1e-12
    with pytest.raises(ValueError):
        chart_consistency_gap(0.1, 0.1, 0.1, 2.0, 0.5, 0.25, NULL_CONST)


def test_smoothstep_and_cutoff_shape():
    assert smoothstep5(0.0) == 0.0
    assert smoothstep5(1.0) == 1.0
    assert smoothstep5(0.5) == 0.5
    assert smoothstep5(-3.0) == 0.0 and smoothstep5(7.0) == 1.0
    x = np.linspace(-0.5, 1.5, 401)
    s = smoothstep5(x)
    assert np.all(np.diff(s) >= 0.0)
    # C^1 at the ends: one-sided slopes vanish
    h = 1e-6
    assert abs(smoothstep5(h) / h) < 1e-4
    assert abs((1.0 - smoothstep5(1.0 - h)) / h) < 1e-4

    spec = NonlinearitySpec(kind=Kind.NONNULL_HORIZON, n=2, cutoff_width=1.0)
    rp = 1.0
    assert cutoff_chi(rp, rp, spec) == 1.0
    assert cutoff_chi(rp + 0.5, rp, spec) == 1.0       # flat inner plateau
    assert cutoff_chi(rp + 0.75, rp, spec) == 0.5      # midpoint of the ramp
    assert cutoff_chi(rp + 1.0, rp, spec) == 0.0
    assert cutoff_chi(rp + 10.0, rp, spec) == 0.0
    r = np.linspace(rp, rp + 2.0, 501)
    chi = cutoff_chi(r, rp, spec)
    assert np.all(np.diff(chi) <= 1e-15)
    assert np.all((0.0 <= chi) & (chi <= 1.0))


def test_scalar_vs_array_round_trip():
    # scalar in -> float out; array in -> array out, elementwise equal
    f_s = source_ef(0.2, 0.3, -0.4, 0.7, NULL_COS)
    assert isinstance(f_s, float)
    f_a = source_ef(np.full(3, 0.2), np.full(3, 0.3), np.full(3, -0.4), 0.7, NULL_COS)
    assert f_a.shape == (3,)
    assert np.all(f_a == f_s)
