"""Fitting and oracle-comparison checks with exactly known answers."""

import math

import numpy as np
import pytest

from ernwave.analysis import (
    convergence_order,
    fit_decay,
    nirenberg_error,
    nirenberg_ladder,
    nirenberg_pair,
)
from ernwave.evolution import GridSpec, InitialDataSpec
from ernwave.spacetime import SpacetimeParams

EXT = SpacetimeParams(mass=1.0, charge=1.0)


def test_fit_decay_pure_power_laws():
    tau = np.linspace(0.0, 200.0, 400)
    for k in (1.0, 0.6, 0.0):
        fit = fit_decay(tau, (1.0 + tau) ** (-k))
        assert fit.exponent == pytest.approx(k, abs=1e-2)
        assert fit.residual_rms < 1e-10
        assert fit.amplitude == pytest.approx(1.0, rel=1e-6)
    fit = fit_decay(tau, 3.0 * (1.0 + tau) ** (-0.6))
    assert fit.amplitude == pytest.approx(3.0, rel=1e-6)
    assert fit.window == (50.0, 200.0)


def test_fit_decay_custom_window_and_errors():
    tau = np.linspace(0.0, 100.0, 300)
    val = (1.0 + tau) ** (-2.0)
    fit = fit_decay(tau, val, window=(10.0, 90.0))
    assert fit.exponent == pytest.approx(2.0, abs=1e-3)
    with pytest.raises(ValueError):
        fit_decay(tau, val, window=(99.9, 100.0))      # < 10 samples
    bad = val.copy()
    bad[250] = 0.0
    with pytest.raises(ValueError):
        fit_decay(tau, bad)
    with pytest.raises(ValueError):
        fit_decay(tau, val[:-1])


def test_convergence_order_synthetic():
    base = np.sin(np.linspace(0.0, 3.0, 40))
    e = 0.01 * np.cos(np.linspace(0.0, 3.0, 40))
    assert convergence_order(base + 4 * e, base + e, base + e / 4) \
        == pytest.approx(2.0, abs=1e-12)
    assert convergence_order(base, base, base) == math.inf
    # scale invariance
    o1 = convergence_order(base + 4 * e, base + e, base + e / 4)
    o2 = convergence_order(3.0 * (base + 4 * e), 3.0 * (base + e),
                           3.0 * (base + e / 4))
    assert o1 == pytest.approx(o2, rel=1e-12)
    with pytest.raises(ValueError):
        convergence_order(base, base, base[:-1])


def test_nirenberg_zero_data_exact():
    g = GridSpec.for_domain(EXT, 3.0, 2.0, 0.04, 0.04)
    res_nl, res_lin = nirenberg_pair(EXT, g, InitialDataSpec(0.0, 1.0, 0.5))
    assert nirenberg_error(res_nl, res_lin) == 0.0


def test_nirenberg_small_data_agreement_and_order():
    data = InitialDataSpec(0.05, 1.0, 0.5)
    errs, order = nirenberg_ladder(EXT, 3.0, 2.0, (0.04, 0.02, 0.01), data)
    assert errs[0] < 1e-3                      # routes agree at all
    assert errs[0] > errs[1] > errs[2] > 0.0
    assert 1.8 <= math.log2(errs[0] / errs[1]) <= 2.2
    assert 1.8 <= order <= 2.2


def test_nirenberg_shift_invariance():
    # shifting the data by a constant shifts psi and rescales phi; the
    # mismatch must agree to round-off
    from ernwave.evolution import evolve, init_characteristic_data, \
        init_from_samples
    from ernwave.nonlinearity import AProfile, Kind, NonlinearitySpec

    g = GridSpec.for_domain(EXT, 3.0, 2.0, 0.02, 0.02)
    base = InitialDataSpec(0.05, 1.0, 0.5)
    e_base = nirenberg_error(*nirenberg_pair(EXT, g, base))

    c = 0.3
    psi0 = init_characteristic_data(base, EXT, g).psi[0]
    nl = NonlinearitySpec(kind=Kind.NULL_FORM,
                          a_profile=AProfile.CONSTANT, a0=1.0)
    res_nl = evolve(EXT, g, init_from_samples(psi0 + c, EXT, g), nl,
                    store_stride=1)
    res_lin = evolve(EXT, g, init_from_samples(np.exp(-(psi0 + c)), EXT, g),
                     NonlinearitySpec(), store_stride=1)
    e_shift = nirenberg_error(res_nl, res_lin)
    assert abs(e_shift - e_base) < 1e-9
