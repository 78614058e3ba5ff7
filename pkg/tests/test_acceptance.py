"""Acceptance gate: eleven end-to-end properties of the solver suite.

Every test marches real grids and prints one PASS/FAIL line with the
measured number next to the pinned tolerance.  Layout notes:

* Horizon-local properties (growth of transversal derivatives, late-time
  slice content) use a reduced r_max with finer du.  On an extremal
  background a fixed-du double-null grid loses the near-horizon
  neighborhood beyond v ~ M^2/du because every off-horizon column
  drifts outward like delta(v) = delta0 / (1 - delta0 v / M^2); a run
  that must trust the horizon series to v = 200 therefore needs
  du <= 0.0025 (first derivative) or du <= 0.001 (second derivative,
  three resolved columns).
* Whole-domain properties (conservation drift, oracle and
  self-convergence ladders) run at the default r_max = 40.

Runs are cached module-wide so criteria sharing a layout march once.
"""

import numpy as np

from ernwave.analysis import convergence_order, fit_decay, nirenberg_ladder
from ernwave.diagnostics import morawetz_bulk, slice_diagnostics
from ernwave.evolution import GridSpec, InitialDataSpec, evolve
from ernwave.horizon import blowup_report, horizon_series
from ernwave.nonlinearity import Kind, NonlinearitySpec
from ernwave.spacetime import SpacetimeParams

EXT = SpacetimeParams(1.0, 1.0)
SUB = SpacetimeParams(1.0, 0.5)
ZERO = NonlinearitySpec(kind=Kind.ZERO)
NULL = NonlinearitySpec(kind=Kind.NULL_FORM)

EPS_SWEEP = (0.025, 0.05, 0.1)
PROBES_10_200 = tuple(float(t) for t in range(10, 201, 10))

_CACHE = {}


def _bump(p, r_max, eps, off=0.25, width=0.5):
    """Horizon-positive bump a fixed u-offset above the horizon."""
    return InitialDataSpec(eps, r_max - p.r_plus - off, width,
                           horizon_positive=True)


def _march(p, r_max, v_max, du, dv, data, nl, probes=(), point_probes=()):
    g = GridSpec.for_domain(p, r_max, v_max, du, dv)
    return evolve(p, g, data, nl, probes=probes, r_split=2.0,
                  point_probes=point_probes)


def _cached(key, build):
    if key not in _CACHE:
        _CACHE[key] = build()
    return _CACHE[key]


def _zero_run(h):
    # default domain, linear flux; probes small enough that every slice
    # snaps its outgoing ray at this resolution
    return _cached(("zero", h), lambda: _march(
        EXT, 40.0, 240.0, h, h, _bump(EXT, 40.0, 0.1), ZERO,
        probes=(2.0, 4.0, 6.0, 8.0, 10.0)))


def _null_run(eps, h):
    return _cached(("null", eps, h), lambda: _march(
        EXT, 40.0, 240.0, h, h, _bump(EXT, 40.0, eps), NULL))


def _near_horizon_run(eps):
    # du = 0.0025 keeps the first off-horizon column until v = 400, so
    # the horizon series and the slice sups are trustworthy to tau = 200
    return _cached(("nh", eps), lambda: _march(
        EXT, 8.0, 240.0, 0.0025, 0.01, _bump(EXT, 8.0, eps), NULL,
        probes=PROBES_10_200))


def _drift(result, t_max=200.0):
    ser = horizon_series(result)
    keep = ser.tau <= t_max
    return float(np.abs(ser.H[keep] - ser.H[0]).max()), float(ser.H[0])


def _verdict(name, ok, detail):
    print(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def test_c01_linear_charge_conservation():
    d_coarse, _ = _drift(_zero_run(0.02))
    d_fine, h0 = _drift(_zero_run(0.01))
    ratio = d_coarse / d_fine
    rel = d_fine / abs(h0)
    ok = 3.0 <= ratio <= 5.0 and rel <= 1e-4
    assert _verdict("criterion 01 linear conservation", ok,
                    f"refinement ratio={ratio:.4f} in [3, 5], "
                    f"finest drift/|H0|={rel:.3e} <= 1e-4")


def test_c02_drift_scales_like_eps_squared():
    drifts = []
    for eps in EPS_SWEEP:
        ser_c = horizon_series(_null_run(eps, 0.02))
        ser_f = horizon_series(_null_run(eps, 0.01))
        keep = ser_c.tau <= 200.0
        d_c = ser_c.H - ser_c.H[0]
        d_f = ser_f.H[::2] - ser_f.H[0]
        # Richardson-extrapolate the second-order scheme error away so
        # the continuum drift is what scales with the data size
        rich = (4.0 * d_f - d_c) / 3.0
        drifts.append(float(np.abs(rich[keep]).max()))
    slope = float(np.polyfit(np.log(EPS_SWEEP), np.log(drifts), 1)[0])
    ok = abs(slope - 2.0) <= 0.4
    assert _verdict("criterion 02 almost conservation",
                    ok, f"drift slope={slope:.4f} within 2.0 +- 0.4")


def test_c03_first_derivatives_linear_in_eps_and_no_growth():
    c_t, c_y, trends = [], [], []
    for eps in EPS_SWEEP:
        r = _near_horizon_run(eps)
        c_t.append(float(r.bins.sup_T.max()) / eps)
        c_y.append(float(r.bins.sup_Y.max()) / eps)
        sd = [slice_diagnostics(r, t) for t in PROBES_10_200]
        half = len(sd) // 2
        for pick in (lambda s: s.sup_Tpsi, lambda s: s.sup_Ypsi):
            early = max(pick(s) for s in sd[:half])
            late = max(pick(s) for s in sd[half:])
            trends.append(late / early)
    dev = max(max(cs) / np.mean(cs) - 1.0 for cs in (c_t, c_y))
    dev = max(dev, max(1.0 - min(cs) / np.mean(cs) for cs in (c_t, c_y)))
    ok = dev <= 0.25 and max(trends) <= 1.2
    assert _verdict("criterion 03 derivative bounds", ok,
                    f"C_T={c_t[0]:.4f} C_Y={c_y[0]:.4f} "
                    f"spread={dev:.2%} <= 25%, "
                    f"late/early max={max(trends):.3f} <= 1.2")


def test_c04_pointwise_decay_exponent():
    r = _near_horizon_run(0.05)
    sups = np.array([slice_diagnostics(r, t).sup_psi for t in PROBES_10_200])
    fit = fit_decay(np.array(PROBES_10_200), sups, window=(50.0, 200.0))
    ok = fit.exponent >= 0.55
    assert _verdict("criterion 04 pointwise decay", ok,
                    f"exponent={fit.exponent:.4f} >= 0.55")


def test_c05_second_transversal_derivative_grows():
    # bump parked on the outer flank of its profile so the initial
    # curvature at the horizon is positive; that keeps the measured
    # doubling ratio clear of the asymptotic value 2
    data = InitialDataSpec(0.1, 3.0 - 0.2125, 0.25, horizon_positive=True)
    r = _cached(("growth",), lambda: _march(
        EXT, 4.0, 210.0, 0.001, 0.01, data, NULL))
    ser = horizon_series(r)
    assert ser.psi[0] > 0.0 and ser.Y_psi[0] > 0.0
    k = lambda v: int(round(v / 0.01))
    window = (ser.tau >= 100.0) & (ser.tau <= 200.0)
    slope = float(np.polyfit(ser.tau[window],
                             np.abs(ser.Y2_psi[window]), 1)[0])
    ratio = abs(ser.Y2_psi[k(200.0)]) / abs(ser.Y2_psi[k(100.0)])
    ok = slope > 0.0 and ratio > 2.0
    assert _verdict("criterion 05 horizon hierarchy growth", ok,
                    f"|Y2| slope={slope:.4f} > 0, "
                    f"|Y2(200)|/|Y2(100)|={ratio:.4f} > 2")


def test_c06_non_null_blowup_within_bound():
    nn = NonlinearitySpec(kind=Kind.NONNULL_HORIZON, n=2)
    data = _bump(EXT, 4.0, 0.2)
    blow = _march(EXT, 4.0, 210.0, 0.01, 0.01, data, nn)
    partner = _march(EXT, 4.0, 210.0, 0.01, 0.01, data, NULL)
    assert blow.status == 2, "power-term run must trip the abort guard"
    rep = blowup_report(blow)
    partner_ok = (partner.status == 0 and partner.blowup is None
                  and partner.rows_done == partner.grid.n_v)
    ok = (rep.tau_blow <= 1.1 * rep.tau_star and rep.lower_envelope_ok
          and partner_ok)
    assert _verdict("criterion 06 non-null blow-up", ok,
                    f"blow tau={rep.tau_blow:.2f} <= 1.1x bound "
                    f"{rep.tau_star:.1f}, envelope ok={rep.lower_envelope_ok}, "
                    f"null-form partner reaches tau=200: {partner_ok}")


def test_c07_energy_flux_structure():
    r = _zero_run(0.01)
    sd = [slice_diagnostics(r, t) for t in (2.0, 4.0, 6.0, 8.0, 10.0)]
    assert not any(s.partial for s in sd)
    flux = [s.t_flux for s in sd]
    monotone = all(flux[i + 1] <= flux[i] * (1.0 + 1e-3)
                   for i in range(len(flux) - 1))
    hardy = [s.hardy_lhs / s.hardy_rhs for s in sd]
    hardy_ok = max(hardy) <= 4.0 * float(np.median(hardy))
    m_a = morawetz_bulk(r, 2.0, 6.0)
    m_b = morawetz_bulk(r, 6.0, 10.0)
    m_ab = morawetz_bulk(r, 2.0, 10.0)
    additive = abs(m_a + m_b - m_ab) <= 1e-3 * m_ab
    ok = monotone and hardy_ok and additive
    assert _verdict("criterion 07 energy structure", ok,
                    f"T-flux non-increasing={monotone}, "
                    f"hardy max/median={max(hardy)/np.median(hardy):.3f} <= 4, "
                    f"slab additivity err={abs(m_a + m_b - m_ab)/m_ab:.2e}")


def test_c08_bootstrap_norm_scaling():
    a1 = [slice_diagnostics(_near_horizon_run(eps), 50.0).F_l2_inner
          for eps in EPS_SWEEP]
    slope = float(np.polyfit(np.log(EPS_SWEEP), np.log(a1), 1)[0])
    r = _near_horizon_run(0.1)
    taus = np.array(PROBES_10_200)
    quot = np.array([slice_diagnostics(r, t).F_l2_inner for t in taus])
    quot = quot * (1.0 + taus) ** 1.9
    bounded = quot[taus >= 100.0].max() <= 1.25 * quot[taus < 100.0].max()
    ok = abs(slope - 4.0) <= 0.8 and bounded
    assert _verdict("criterion 08 bootstrap norm scaling", ok,
                    f"A1(50) slope={slope:.4f} within 4.0 +- 0.8, "
                    f"decay quotient bounded={bounded}")


def test_c09_extremal_vs_subextremal_contrast():
    ratios = {}
    for tag, p in (("ext", EXT), ("sub", SUB)):
        r = _march(p, 4.0, 210.0, 0.0025, 0.01, _bump(p, 4.0, 0.1), ZERO)
        ser = horizon_series(r)
        i50 = int(round(50.0 / 0.01))
        i200 = int(round(200.0 / 0.01))
        ratios[tag] = abs(ser.Y_psi[i200]) / abs(ser.Y_psi[i50])
    ok = ratios["ext"] > 0.8 and ratios["sub"] < 0.5
    assert _verdict("criterion 09 extremal contrast", ok,
                    f"extremal |Y(200)|/|Y(50)|={ratios['ext']:.4f} > 0.8, "
                    f"subextremal={ratios['sub']:.4f} < 0.5")


def test_c10_exponential_oracle_equivalence():
    errs, order = nirenberg_ladder(
        EXT, 4.0, 8.0, (0.04, 0.02, 0.01), _bump(EXT, 4.0, 0.05))
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    ok = decreasing and abs(order - 2.0) <= 0.2 and errs[-1] <= 1e-4
    assert _verdict("criterion 10 oracle equivalence", ok,
                    f"errors={['%.2e' % e for e in errs]} decreasing, "
                    f"order={order:.4f} within 2.0 +- 0.2, "
                    f"finest={errs[-1]:.2e} <= 1e-4")


def test_c11_scheme_self_convergence():
    fractions = ((0.5, 0.25), (0.5, 0.5), (0.5, 0.75),
                 (0.75, 0.5), (0.85, 0.65))
    data = InitialDataSpec(0.05, 20.0, 4.0)
    n_u0, n_v0 = int(round(39.0 / 0.04)), int(round(240.0 / 0.04))
    vals = {}
    for h in (0.04, 0.02, 0.01):
        scale = int(round(0.04 / h))
        pp = tuple((int(fu * n_u0) * scale, int(fv * n_v0) * scale)
                   for fu, fv in fractions)
        r = _march(EXT, 40.0, 240.0, h, h, data, NULL, point_probes=pp)
        vals[h] = np.asarray(r.point_values, dtype=float)
    orders = [convergence_order(vals[0.04][i], vals[0.02][i], vals[0.01][i])
              for i in range(len(fractions))]
    med = float(np.median(orders))
    ok = 1.8 <= med <= 2.2
    assert _verdict("criterion 11 self-convergence", ok,
                    f"probe orders={['%.3f' % o for o in orders]}, "
                    f"median={med:.4f} within [1.8, 2.2]")
