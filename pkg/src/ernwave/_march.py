"""Jitted double-null marching kernel and geometry transport.

Everything in here is numba-compiled and deliberately flat: scalar metric
helpers, an RK4 step for the per-column geometry ODEs, the diamond cell
update in phi = r psi form, and one long streaming march that owns all the
in-flight recorders (horizon strip, slice crossings, outgoing rays, slab
bins, point probes).  The Python-facing wrappers live in evolution.py.

Conventions fixed here and relied on by the tests:

* column i holds u = i du, row j holds v = j dv; i = n_u is the horizon
  column (r = r_plus exactly), i = 0 the outer data ray.
* the cell update is grouped as psi_NE = psi_c + (corrections)/r_NE so that
  constant states are preserved bitwise (all corrections vanish exactly).
* recorded T psi is the grid rate dv_psi - D du_psi/nu; the invariant
  source sample f_c is evaluated with the Killing-normalized T (half the
  grid rate) wherever the source formula requires it.
"""

import numpy as np
from numba import njit

BLOW_ABORT = 1.0e6


@njit(cache=True, inline="always")
def _D(r, rp, rm):
    return (r - rp) * (r - rm) / (r * r)


@njit(cache=True, inline="always")
def _Dp(r, rp, rm):
    # product-rule form: exact zero at a degenerate horizon
    a = r - rp
    b = r - rm
    return (a + b) / (r * r) - 2.0 * a * b / (r * r * r)


@njit(cache=True, inline="always")
def _Dpp(r, rp, rm, mass):
    e2 = rp * rm
    return (6.0 * e2 / r - 4.0 * mass) / (r * r * r)


@njit(cache=True, inline="always")
def _geom_step(r, nu, w, dv, mass, rp, rm):
    """One RK4 step of r' = D, nu' = D' nu, w' = D'' nu^2 + D' w.

    The (r, nu) subsystem never reads w, so carrying w changes nothing in
    the (r, nu) values (bitwise).  At r = r_plus every r-stage is exactly
    zero, making the horizon column an exact fixed point of the radius.
    """
    k1r = _D(r, rp, rm)
    d1 = _Dp(r, rp, rm)
    k1n = d1 * nu
    k1w = _Dpp(r, rp, rm, mass) * nu * nu + d1 * w

    r2 = r + 0.5 * dv * k1r
    n2 = nu + 0.5 * dv * k1n
    w2 = w + 0.5 * dv * k1w
    k2r = _D(r2, rp, rm)
    d2 = _Dp(r2, rp, rm)
    k2n = d2 * n2
    k2w = _Dpp(r2, rp, rm, mass) * n2 * n2 + d2 * w2

    r3 = r + 0.5 * dv * k2r
    n3 = nu + 0.5 * dv * k2n
    w3 = w + 0.5 * dv * k2w
    k3r = _D(r3, rp, rm)
    d3 = _Dp(r3, rp, rm)
    k3n = d3 * n3
    k3w = _Dpp(r3, rp, rm, mass) * n3 * n3 + d3 * w3

    r4 = r + dv * k3r
    n4 = nu + dv * k3n
    w4 = w + dv * k3w
    k4r = _D(r4, rp, rm)
    d4 = _Dp(r4, rp, rm)
    k4n = d4 * n4
    k4w = _Dpp(r4, rp, rm, mass) * n4 * n4 + d4 * w4

    c = dv / 6.0
    return (
        r + c * (k1r + 2.0 * (k2r + k3r) + k4r),
        nu + c * (k1n + 2.0 * (k2n + k3n) + k4n),
        w + c * (k1w + 2.0 * (k2w + k3w) + k4w),
    )


@njit(cache=True)
def background_arrays(n_u, n_v, du, dv, mass, rp, rm, r_max):
    """Full (n_v+1, n_u+1) geometry arrays for tests and small grids."""
    r = np.empty((n_v + 1, n_u + 1))
    nu = np.empty((n_v + 1, n_u + 1))
    w = np.empty((n_v + 1, n_u + 1))
    for i in range(n_u + 1):
        if i == n_u:
            r[0, i] = rp  # horizon column seeded exactly
        else:
            r[0, i] = r_max - i * du
        nu[0, i] = -1.0
        w[0, i] = 0.0
    for j in range(n_v):
        for i in range(n_u + 1):
            ri, ni, wi = _geom_step(r[j, i], nu[j, i], w[j, i], dv, mass, rp, rm)
            r[j + 1, i] = ri
            nu[j + 1, i] = ni
            w[j + 1, i] = wi
    return r, nu, w


@njit(cache=True, inline="always")
def _cell(psi_sw, psi_se, psi_nw, r_sw, r_se, r_nw, r_ne, nu_c, du, dv,
          rp, rm, kind, aprof, a0, power_l, n2, half_cw):
    """Diamond update in phi = r psi form.

    Returns (psi_ne, T_grid, Y, F) with the cell-center grid-rate T,
    transversal Y = du_psi/nu, and the invariant source sample F (Killing
    normalization where the formula needs a T).  Two fixed-point passes on
    the center value; the grouping keeps constants bitwise-exact.
    """
    rc = 0.25 * ((r_sw + r_ne) + (r_se + r_nw))
    dc = _D(rc, rp, rm)
    dudv = du * dv
    psi_ne = psi_se + psi_nw - psi_sw
    tg = 0.0
    y = 0.0
    fc = 0.0
    for _ in range(2):
        psi_c = 0.25 * ((psi_sw + psi_ne) + (psi_se + psi_nw))
        dup = ((psi_nw + psi_ne) - (psi_sw + psi_se)) / (2.0 * du)
        dvp = ((psi_se + psi_ne) - (psi_sw + psi_nw)) / (2.0 * dv)
        y = dup / nu_c
        tg = dvp - dc * y
        if kind == 0:
            fc = 0.0
            src = 0.0
        elif kind == 1:
            if aprof == 0:
                amp = a0
            elif aprof == 1:
                amp = a0 * np.cos(psi_c)
            else:
                amp = psi_c
            fc = amp * y * dvp
            # r nu F = r A du_psi dv_psi: nu cancels against the chart factor
            src = dudv * rc * amp * dup * dvp
        elif kind == 2:
            fc = abs(psi_c) ** power_l
            src = dudv * rc * nu_c * fc
        else:
            s = (rc - rp - half_cw) / half_cw
            if s <= 0.0:
                chi = 1.0
            elif s >= 1.0:
                chi = 0.0
            else:
                chi = 1.0 - s * s * s * (s * (6.0 * s - 15.0) + 10.0)
            tk = 0.5 * tg
            fc = psi_c ** n2 + chi * (tk ** n2 + y ** n2)
            src = dudv * rc * nu_c * fc
        corr = (r_se * (psi_se - psi_c) + r_nw * (psi_nw - psi_c)
                - r_sw * (psi_sw - psi_c) + src)
        psi_ne = psi_c + corr / r_ne
    return psi_ne, tg, y, fc


@njit(cache=True)
def cell_update(psi_sw, psi_se, psi_nw, r_sw, r_se, r_nw, r_ne, nu_c, du, dv,
                rp, rm, kind, aprof, a0, power_l, n2, half_cw):
    # non-inlined entry point for the Python-level step_cell wrapper
    return _cell(psi_sw, psi_se, psi_nw, r_sw, r_se, r_nw, r_ne, nu_c, du, dv,
                 rp, rm, kind, aprof, a0, power_l, n2, half_cw)


@njit(cache=True, inline="always")
def _du_center(row, i, n_u, du):
    # u-derivative along a row: centered inside, one-sided 2nd order at ends
    if 0 < i < n_u:
        return (row[i + 1] - row[i - 1]) / (2.0 * du)
    if i == 0:
        return (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * du)
    return (3.0 * row[n_u] - 4.0 * row[n_u - 1] + row[n_u - 2]) / (2.0 * du)


@njit(cache=True, nogil=True)
def march(n_u, n_v, du, dv, mass, rp, rm, r_max,
          psi0, psi_bdry,
          kind, aprof, a0, power_l, n2, half_cw,
          probes, r_split,
          eta, alpha, bin_w, bin_t0, n_bins,
          pp_i, pp_j,
          store_stride):
    """Stream the full evolution; see module docstring for conventions.

    Returns a flat tuple (status, rows_done, horizon/strip series, slice
    buffers, ray buffers, slab bins, point-probe values, optional stored
    rows, blow-up location).  status: 0 = completed, 2 = blow-up abort;
    rows_done is the last fully valid row index.
    """
    n_p = probes.shape[0]
    n_pp = pp_i.shape[0]

    # geometry rows (three psi rows needed for centered v-derivatives)
    r_old = np.empty(n_u + 1)
    nu_old = np.empty(n_u + 1)
    r_new = np.empty(n_u + 1)
    nu_new = np.empty(n_u + 1)
    psi_mm = np.zeros(n_u + 1)
    psi_old = np.empty(n_u + 1)
    psi_new = np.empty(n_u + 1)
    for i in range(n_u + 1):
        if i == n_u:
            r_old[i] = rp
        else:
            r_old[i] = r_max - i * du
        nu_old[i] = -1.0
        psi_old[i] = psi0[i]

    # strip: columns n_u - k, k = 0..3 (w transported only here)
    strip_psi = np.zeros((4, n_v + 1))
    strip_r = np.zeros((4, n_v + 1))
    strip_nu = np.zeros((4, n_v + 1))
    strip_w = np.zeros((4, n_v + 1))
    w_strip = np.zeros(4)
    for k in range(4):
        strip_psi[k, 0] = psi_old[n_u - k]
        strip_r[k, 0] = r_old[n_u - k]
        strip_nu[k, 0] = -1.0
        strip_w[k, 0] = 0.0

    # slice recorders
    cap = n_u + 1
    inner = np.zeros((n_p, cap, 6))
    inner_n = np.zeros(n_p, dtype=np.int64)
    col_ptr = np.full(n_p, n_u, dtype=np.int64)
    snapped = np.zeros(n_p, dtype=np.int64)       # 0 pending, 1 ray active
    ray_col = np.full(n_p, -1, dtype=np.int64)
    ray = np.zeros((n_p, n_v + 2, 5))
    ray_n = np.zeros(n_p, dtype=np.int64)
    ray_anchor_dv = np.zeros(n_p)

    mor_bins = np.zeros(n_bins)
    a2_bins = np.zeros(n_bins)
    a3_bins = np.zeros(n_bins)
    supt_bins = np.zeros(n_bins)
    supy_bins = np.zeros(n_bins)

    pp_vals = np.full(n_pp, np.nan)
    for k in range(n_pp):
        if pp_j[k] == 0:
            pp_vals[k] = psi_old[pp_i[k]]

    if store_stride > 0:
        n_store = n_v // store_stride + 1
        full = np.zeros((n_store, n_u + 1))
        full[0, :] = psi_old
    else:
        full = np.zeros((1, 1))

    status = 0
    rows_done = 0
    blow_u = -1.0
    blow_v = -1.0
    dudv = du * dv
    use_sqrt_w = eta == 0.5
    p_a3 = 3.0 - alpha

    for j in range(n_v):
        v_new = (j + 1) * dv

        for i in range(n_u + 1):
            ri, ni, wi = _geom_step(r_old[i], nu_old[i],
                                    w_strip[n_u - i] if n_u - i < 4 else 0.0,
                                    dv, mass, rp, rm)
            r_new[i] = ri
            nu_new[i] = ni
            if n_u - i < 4:
                w_strip[n_u - i] = wi

        psi_new[0] = psi_bdry
        aborted = False
        for i in range(n_u):
            nu_c = 0.25 * ((nu_old[i] + nu_new[i + 1]) + (nu_old[i + 1] + nu_new[i]))
            psi_ne, tg, y, fc = _cell(
                psi_old[i], psi_new[i], psi_old[i + 1],
                r_old[i], r_new[i], r_old[i + 1], r_new[i + 1],
                nu_c, du, dv, rp, rm,
                kind, aprof, a0, power_l, n2, half_cw)
            if not np.isfinite(psi_ne) or abs(psi_ne) > BLOW_ABORT:
                status = 2
                blow_u = (i + 1) * du
                blow_v = v_new
                aborted = True
                break
            psi_new[i + 1] = psi_ne

            # slab accumulators keyed by cell-center t* = v - r
            rc = 0.25 * ((r_old[i] + r_new[i + 1]) + (r_old[i + 1] + r_new[i]))
            tstar = (v_new - 0.5 * dv) - rc
            b = np.int64((tstar - bin_t0) / bin_w)
            if 0 <= b < n_bins:
                base = rc * rc * (-nu_c) * dudv
                dc = _D(rc, rp, rm)
                if use_sqrt_w:
                    rw = rc * np.sqrt(rc)
                else:
                    rw = rc ** (1.0 + eta)
                mor_bins[b] += (tg * tg + dc * dc * y * y) / rw * base
                at = abs(tg)
                if at > supt_bins[b]:
                    supt_bins[b] = at
                ay = abs(y)
                if ay > supy_bins[b]:
                    supy_bins[b] = ay
                if fc != 0.0:
                    ff = fc * fc
                    a2_bins[b] += ff * base
                    if rc > r_split:
                        a3_bins[b] += rc ** p_a3 * ff * dudv
        if aborted:
            break

        # horizon strip series
        for k in range(4):
            strip_psi[k, j + 1] = psi_new[n_u - k]
            strip_r[k, j + 1] = r_new[n_u - k]
            strip_nu[k, j + 1] = nu_new[n_u - k]
            strip_w[k, j + 1] = w_strip[k]

        # slice crossings: t* = v - r rises monotonically along each column,
        # and the horizon column crosses a given level first, so a single
        # descending column pointer per probe finds every crossing in order.
        for p in range(n_p):
            if snapped[p] == 1:
                rc_i = ray_col[p]
                if v_new > ray[p, 0, 0]:
                    m = ray_n[p]
                    ray[p, m, 0] = v_new
                    ray[p, m, 1] = r_new[rc_i]
                    ray[p, m, 2] = psi_new[rc_i]
                    ray[p, m, 3] = _du_center(psi_new, rc_i, n_u, du)
                    ray[p, m, 4] = nu_new[rc_i]
                    ray_n[p] = m + 1
                continue
            tau_p = probes[p]
            while col_ptr[p] >= 0:
                i = col_ptr[p]
                s_new = v_new - r_new[i]
                if s_new < tau_p:
                    break
                s_old = (v_new - dv) - r_old[i]
                frac = (tau_p - s_old) / (s_new - s_old)
                r_x = r_old[i] + frac * (r_new[i] - r_old[i])
                psi_x = psi_old[i] + frac * (psi_new[i] - psi_old[i])
                d_mid = (psi_new[i] - psi_old[i]) / dv
                if j >= 1:
                    d_lo = (psi_new[i] - psi_mm[i]) / (2.0 * dv)
                else:
                    d_lo = d_mid
                dv_x = d_lo + 2.0 * frac * (d_mid - d_lo)
                du_lo = _du_center(psi_old, i, n_u, du)
                du_hi = _du_center(psi_new, i, n_u, du)
                du_x = du_lo + frac * (du_hi - du_lo)
                nu_x = nu_old[i] + frac * (nu_new[i] - nu_old[i])
                v_x = (v_new - dv) + frac * dv
                if r_x < r_split:
                    m = inner_n[p]
                    inner[p, m, 0] = r_x
                    inner[p, m, 1] = psi_x
                    inner[p, m, 2] = dv_x
                    inner[p, m, 3] = du_x
                    inner[p, m, 4] = nu_x
                    inner[p, m, 5] = v_x
                    inner_n[p] = m + 1
                    col_ptr[p] = i - 1
                else:
                    # first crossing at or beyond the split radius: this
                    # column becomes the outgoing ray, the sample its anchor
                    snapped[p] = 1
                    ray_col[p] = i
                    ray[p, 0, 0] = v_x
                    ray[p, 0, 1] = r_x
                    ray[p, 0, 2] = psi_x
                    ray[p, 0, 3] = du_x
                    ray[p, 0, 4] = nu_x
                    ray_n[p] = 1
                    ray_anchor_dv[p] = dv_x
                    if v_new > v_x:
                        ray[p, 1, 0] = v_new
                        ray[p, 1, 1] = r_new[i]
                        ray[p, 1, 2] = psi_new[i]
                        ray[p, 1, 3] = _du_center(psi_new, i, n_u, du)
                        ray[p, 1, 4] = nu_new[i]
                        ray_n[p] = 2
                    break

        for k in range(n_pp):
            if pp_j[k] == j + 1:
                pp_vals[k] = psi_new[pp_i[k]]

        if store_stride > 0 and (j + 1) % store_stride == 0:
            full[(j + 1) // store_stride, :] = psi_new

        rows_done = j + 1
        for i in range(n_u + 1):
            psi_mm[i] = psi_old[i]
            psi_old[i] = psi_new[i]
            r_old[i] = r_new[i]
            nu_old[i] = nu_new[i]

    return (status, rows_done,
            strip_psi, strip_r, strip_nu, strip_w,
            inner, inner_n,
            ray, ray_n, ray_col, ray_anchor_dv,
            mor_bins, a2_bins, a3_bins, supt_bins, supy_bins,
            pp_vals, full, blow_u, blow_v)
