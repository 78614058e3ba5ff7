"""Characteristic evolution driver: grids, initial data, cell update, march.

Geometry gauge: outgoing coordinate v with dr/dv = D(r), affine ingoing
coordinate u on the initial ray (nu = du r = -1 at v = 0), so the horizon
sits at u = U = r_max - r_plus and Omega^2 = -4 nu.  Columns of constant u
are marched in v; the wave update runs in phi = r psi form (see _march).
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _march
from .nonlinearity import Kind, NonlinearitySpec
from .spacetime import SpacetimeParams, metric_D

__all__ = [
    "GridSpec",
    "GeometryField",
    "InitialDataSpec",
    "WaveState",
    "CellGeometry",
    "RawSlice",
    "BinSet",
    "BlowupPoint",
    "EvolutionResult",
    "bump",
    "bump_prime",
    "build_background",
    "init_characteristic_data",
    "step_cell",
    "evolve",
    "ef_derivatives",
    "transverse_derivative_k",
]


def _count_steps(extent, step, what):
    n = int(round(extent / step))
    if n < 4 or abs(n * step - extent) > 1e-9 * max(1.0, extent):
        raise ValueError(
            f"{what}: extent {extent} is not a multiple (>= 4) of step {step}"
        )
    return n


@dataclass(frozen=True)
class GridSpec:
    """Characteristic grid: u in [0, U], v in [0, V].

    U must equal r_max - r_plus for the affine initial gauge; use
    ``for_domain`` to build a spec with the u-step snapped so that U is an
    exact multiple (mandatory for irrational subextremal r_plus).
    """

    u_extent: float
    v_extent: float
    du: float
    dv: float
    r_max: float

    def __post_init__(self):
        if not (self.du > 0.0 and self.dv > 0.0):
            raise ValueError("du and dv must be positive")
        if not (self.r_max > 0.0 and self.u_extent > 0.0 and self.v_extent > 0.0):
            raise ValueError("extents and r_max must be positive")
        _count_steps(self.u_extent, self.du, "GridSpec u")
        _count_steps(self.v_extent, self.dv, "GridSpec v")

    @property
    def n_u(self) -> int:
        return int(round(self.u_extent / self.du))

    @property
    def n_v(self) -> int:
        return int(round(self.v_extent / self.dv))

    @property
    def u(self):
        return np.arange(self.n_u + 1) * self.du

    @property
    def v(self):
        return np.arange(self.n_v + 1) * self.dv

    @classmethod
    def for_domain(cls, p: SpacetimeParams, r_max: float, v_max: float,
                   du: float, dv: float) -> "GridSpec":
        if r_max <= p.r_plus:
            raise ValueError(f"r_max={r_max} must exceed r_plus={p.r_plus}")
        u_ext = r_max - p.r_plus
        n_u = max(4, int(math.ceil(u_ext / du - 1e-12)))
        n_v = max(4, int(round(v_max / dv)))
        return cls(u_extent=u_ext, v_extent=n_v * dv, du=u_ext / n_u,
                   dv=dv, r_max=r_max)


def _check_gauge(p: SpacetimeParams, g: GridSpec):
    if abs(g.u_extent - (g.r_max - p.r_plus)) > 1e-9:
        raise ValueError(
            f"grid U={g.u_extent} inconsistent with r_max - r_plus = "
            f"{g.r_max - p.r_plus} (affine gauge)"
        )


@dataclass(frozen=True)
class GeometryField:
    """Stored background: r, nu = du r, and du nu on the full grid.

    lam = dv r equals D(r) identically in this gauge; omega_sq = -4 nu.
    Shapes are (n_v + 1, n_u + 1), row index = v.
    """

    params: SpacetimeParams
    grid: GridSpec
    r: np.ndarray
    nu: np.ndarray
    dunu: np.ndarray

    @property
    def lam(self):
        return metric_D(self.r, self.params)

    @property
    def omega_sq(self):
        return -4.0 * self.nu


def build_background(p: SpacetimeParams, g: GridSpec) -> GeometryField:
    """Integrate the column ODEs on the whole grid (tests / small domains).

    r(u, 0) = r_max - u, nu(u, 0) = -1, du nu(u, 0) = 0, advanced by RK4 in
    v.  The horizon column is seeded at exactly r_plus and stays there.
    """
    _check_gauge(p, g)
    if (g.n_u + 1) * (g.n_v + 1) > 4e7:
        raise ValueError("grid too large for full background storage")
    r, nu, w = _march.background_arrays(
        g.n_u, g.n_v, g.du, g.dv, p.mass, p.r_plus, p.r_minus, g.r_max)
    if not np.all(np.isfinite(nu)) or np.any(nu >= 0.0):
        raise ValueError(
            "background integration failed (nu lost negativity); "
            "reduce dv or the v extent"
        )
    return GeometryField(params=p, grid=g, r=r, nu=nu, dunu=w)


def bump(s):
    """C-infinity bump exp(-1/(1-s^2)) on |s| < 1, exactly zero outside."""
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s1 = np.atleast_1d(s)
    out = np.zeros_like(s1)
    m = np.abs(s1) < 1.0
    out[m] = np.exp(-1.0 / (1.0 - s1[m] ** 2))
    return float(out[0]) if scalar else out


def bump_prime(s):
    """d/ds of ``bump``: bump(s) * (-2 s) / (1 - s^2)^2 inside the support."""
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s1 = np.atleast_1d(s)
    out = np.zeros_like(s1)
    m = np.abs(s1) < 1.0
    sm = s1[m]
    q = 1.0 - sm**2
    out[m] = np.exp(-1.0 / q) * (-2.0 * sm) / q**2
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class InitialDataSpec:
    """Bump data psi(u, 0) = epsilon * bump((u - center)/width).

    The u = 0 ray carries the constant boundary value psi(0, 0).  In
    horizon-positivity mode the bump straddles the horizon (center < U <
    center + width), which makes psi(U,0) > 0 and Y psi(U,0) > 0; otherwise
    the support must lie inside (0, U).
    """

    epsilon: float
    center: float
    width: float
    horizon_positive: bool = False

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if not (self.width > 0.0):
            raise ValueError(f"width must be positive, got {self.width}")


@dataclass(frozen=True)
class WaveState:
    """Two active u-rows of the field plus the geometry on them.

    theta = r dv_psi, zeta = r du_psi and phi = r psi are derived on demand;
    zeta0 and e0 are the analytic horizon transversal moment and data energy
    of the initial ray (finite differences would start the conservation
    series with an avoidable O(du^2) offset).
    """

    psi: np.ndarray        # (2, n_u+1), rows v0 and v0+dv
    r: np.ndarray
    nu: np.ndarray
    v0: float
    du: float
    dv: float
    boundary_psi: float
    zeta0: float
    e0: float

    def phi(self):
        return self.r * self.psi

    def zeta(self):
        out = np.empty_like(self.psi)
        for k in range(2):
            dpsi = np.gradient(self.psi[k], self.du, edge_order=2)
            out[k] = self.r[k] * dpsi
        return out

    def theta(self):
        r_mid = 0.5 * (self.r[0] + self.r[1])
        return r_mid * (self.psi[1] - self.psi[0]) / self.dv


def init_characteristic_data(d: InitialDataSpec, p: SpacetimeParams,
                             g: GridSpec) -> WaveState:
    _check_gauge(p, g)
    U = g.u_extent
    lo = d.center - d.width
    hi = d.center + d.width
    if lo < -1e-12:
        raise ValueError(f"bump support [{lo}, {hi}] exits the grid at u < 0")
    if d.horizon_positive:
        if not (d.center < U < hi):
            raise ValueError(
                "horizon-positivity mode needs center < U < center + width "
                f"(got center={d.center}, width={d.width}, U={U})"
            )
    elif hi > U + 1e-12:
        raise ValueError(
            f"bump support [{lo}, {hi}] exceeds [0, U={U}]; "
            "use horizon_positive for data straddling the horizon"
        )
    u = g.u
    psi0 = d.epsilon * bump((u - d.center) / d.width)
    r0 = g.r_max - u
    r0[-1] = p.r_plus
    dpsi0 = (d.epsilon / d.width) * bump_prime((u - d.center) / d.width)
    zeta0 = p.r_plus * dpsi0[-1]
    e0 = float(np.trapezoid(dpsi0**2 * r0**2, dx=g.du))
    psi = np.vstack([psi0, psi0])
    r = np.vstack([r0, r0])
    nu = np.full((2, g.n_u + 1), -1.0)
    return WaveState(psi=psi, r=r, nu=nu, v0=0.0, du=g.du, dv=g.dv,
                     boundary_psi=float(psi0[0]), zeta0=float(zeta0),
                     e0=e0)


def init_from_samples(psi0, p: SpacetimeParams, g: GridSpec) -> WaveState:
    """WaveState from raw first-ray samples (general, non-bump data).

    The transversal seed and data energy come from second-order finite
    differences of the samples, so they carry O(du^2) error; bump data
    described by an InitialDataSpec should use init_characteristic_data,
    which knows the exact derivative.
    """
    _check_gauge(p, g)
    psi0 = np.asarray(psi0, dtype=float)
    if psi0.shape != (g.n_u + 1,):
        raise ValueError(
            f"need {g.n_u + 1} samples along the initial ray, "
            f"got shape {psi0.shape}")
    if not np.all(np.isfinite(psi0)):
        raise ValueError("initial samples must be finite")
    u = g.u
    r0 = g.r_max - u
    r0[-1] = p.r_plus
    dpsi0 = np.gradient(psi0, g.du, edge_order=2)
    zeta0 = p.r_plus * dpsi0[-1]
    e0 = float(np.trapezoid(dpsi0**2 * r0**2, dx=g.du))
    psi = np.vstack([psi0, psi0])
    r = np.vstack([r0, r0])
    nu = np.full((2, g.n_u + 1), -1.0)
    return WaveState(psi=psi, r=r, nu=nu, v0=0.0, du=g.du, dv=g.dv,
                     boundary_psi=float(psi0[0]), zeta0=float(zeta0),
                     e0=e0)


@dataclass(frozen=True)
class CellGeometry:
    """Corner radii and center nu of one grid diamond."""

    r_sw: float
    r_se: float
    r_nw: float
    r_ne: float
    nu_c: float
    du: float
    dv: float
    params: SpacetimeParams


def step_cell(psi_sw: float, psi_se: float, psi_nw: float,
              geom: CellGeometry, spec: NonlinearitySpec) -> float:
    """Advance one diamond; returns psi_NE (see _march._cell for the form)."""
    p = geom.params
    out = _march.cell_update(
        float(psi_sw), float(psi_se), float(psi_nw),
        geom.r_sw, geom.r_se, geom.r_nw, geom.r_ne, geom.nu_c,
        geom.du, geom.dv, p.r_plus, p.r_minus,
        int(spec.kind), int(spec.a_profile), spec.a0,
        spec.power_l, 2 * spec.n, 0.5 * spec.cutoff_width)
    return float(out[0])


@dataclass(frozen=True)
class RawSlice:
    """Sampled t* = v - r slice: inner crossings plus the outgoing ray.

    Inner arrays are ordered by increasing r; the ray starts at the anchor
    (the first crossing at r >= the split radius, radius r0_eff) and then
    follows the grid rows of that u-column.  ``partial`` marks slices whose
    inner part never reached the split radius before the run ended.
    """

    tau: float
    inner_r: np.ndarray
    inner_psi: np.ndarray
    inner_dvpsi: np.ndarray
    inner_dupsi: np.ndarray
    inner_nu: np.ndarray
    inner_v: np.ndarray
    ray_v: np.ndarray
    ray_r: np.ndarray
    ray_psi: np.ndarray
    ray_dupsi: np.ndarray
    ray_nu: np.ndarray
    ray_dvpsi: np.ndarray
    ray_u: float
    r0_eff: float
    partial: bool


@dataclass(frozen=True)
class BinSet:
    """Slab accumulators keyed by cell-center t* = v - r.

    Bin b covers [t0 + b w, t0 + (b+1) w); t0 is an integer multiple of w so
    integer slab endpoints land on bin edges and slab sums are exactly
    additive.
    """

    t0: float
    width: float
    morawetz: np.ndarray
    f_sq: np.ndarray
    f_sq_outer: np.ndarray
    sup_T: np.ndarray
    sup_Y: np.ndarray
    eta: float
    alpha: float
    r_split: float

    def edges(self):
        return self.t0 + self.width * np.arange(self.morawetz.size + 1)


@dataclass(frozen=True)
class BlowupPoint:
    u: float
    v: float


@dataclass(frozen=True)
class EvolutionResult:
    params: SpacetimeParams
    grid: GridSpec
    data: InitialDataSpec
    nl: NonlinearitySpec
    status: int
    rows_done: int
    v: np.ndarray
    strip_psi: np.ndarray   # (4, rows_done+1), column k at u = U - k du
    strip_r: np.ndarray
    strip_nu: np.ndarray
    strip_w: np.ndarray
    zeta: np.ndarray
    slices: list
    bins: BinSet
    point_values: np.ndarray
    full: Optional[np.ndarray]
    store_stride: int
    blowup: Optional[BlowupPoint]
    e0: float
    zeta0: float
    meta: dict = field(default_factory=dict)

    @property
    def psi_h(self):
        return self.strip_psi[0]

    @property
    def nu_h(self):
        return self.strip_nu[0]

    @property
    def w_h(self):
        return self.strip_w[0]


def _horizon_F(nl: NonlinearitySpec, psi, dpsi, zeta, nu, rp):
    """Invariant source at the horizon column (chi = 1, D = 0, lambda = 0)."""
    if nl.kind == Kind.ZERO:
        return 0.0
    if nl.kind == Kind.NULL_FORM:
        from .nonlinearity import AProfile
        if nl.a_profile == AProfile.CONSTANT:
            amp = nl.a0
        elif nl.a_profile == AProfile.COSINE:
            amp = nl.a0 * math.cos(psi)
        else:
            amp = psi
        return amp * (zeta / (rp * nu)) * dpsi
    if nl.kind == Kind.POWER_TERM:
        return abs(psi) ** nl.power_l
    n2 = 2 * nl.n
    return psi**n2 + (0.5 * dpsi) ** n2 + (zeta / (rp * nu)) ** n2


def _zeta_transport(nl: NonlinearitySpec, psi_h, nu_h, zeta0, rp, dv):
    """Heun integration of dv zeta = -nu dv_psi + r nu F on the horizon.

    dv_psi is the centered difference of the recorded horizon series
    (one-sided second order at both ends), so the global error is O(dv^2)
    and, for the Zero kind, telescopes instead of accumulating.
    """
    m = psi_h.size
    z = np.full(m, np.nan)
    z[0] = zeta0
    if m < 3:
        return z
    d = np.empty(m)
    d[1:-1] = (psi_h[2:] - psi_h[:-2]) / (2.0 * dv)
    d[0] = (-3.0 * psi_h[0] + 4.0 * psi_h[1] - psi_h[2]) / (2.0 * dv)
    d[-1] = (3.0 * psi_h[-1] - 4.0 * psi_h[-2] + psi_h[-3]) / (2.0 * dv)

    def g(k, zk):
        f = _horizon_F(nl, psi_h[k], d[k], zk, nu_h[k], rp)
        return -nu_h[k] * d[k] + rp * nu_h[k] * f

    # after a blow-up abort the tail of psi_h is enormous; let the powers
    # saturate to inf quietly instead of warning
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(m - 1):
            gk = g(k, z[k])
            pred = z[k] + dv * gk
            z[k + 1] = z[k] + 0.5 * dv * (gk + g(k + 1, pred))
    return z


def evolve(p: SpacetimeParams, g: GridSpec, data: InitialDataSpec,
           nl: NonlinearitySpec, probes=(), *,
           r_split: float = 2.5, eta: float = 0.5, alpha: float = 0.1,
           bin_width: float = 1.0, point_probes=(), store_stride: int = 0,
           ) -> EvolutionResult:
    """March the field over the grid, streaming all diagnostics recorders.

    probes: slice labels t* = v - r (sorted internally).  point_probes:
    (i_u, j_v) grid indices whose psi values are collected (convergence
    ladders).  store_stride > 0 keeps every stride-th full row (tests only).
    """
    _check_gauge(p, g)
    if not (p.r_plus < r_split < g.r_max):
        raise ValueError(
            f"r_split={r_split} must lie in (r_plus, r_max) = "
            f"({p.r_plus}, {g.r_max})")
    probes_arr = np.asarray(sorted(float(t) for t in probes), dtype=float)
    if probes_arr.size and probes_arr[0] < 0.0:
        raise ValueError("slice probes must be >= 0")
    if np.unique(probes_arr).size != probes_arr.size:
        raise ValueError("slice probes must be distinct")
    pp = list(point_probes)
    pp_i = np.asarray([int(i) for i, _ in pp], dtype=np.int64)
    pp_j = np.asarray([int(j) for _, j in pp], dtype=np.int64)
    if pp_i.size:
        if pp_i.min() < 0 or pp_i.max() > g.n_u or pp_j.min() < 0 or pp_j.max() > g.n_v:
            raise ValueError("point probe indices outside the grid")
    if store_stride:
        n_store = (g.n_v // store_stride + 1) * (g.n_u + 1)
        if n_store > 4e7:
            raise ValueError("store_stride keeps too many rows for memory")

    if isinstance(data, WaveState):
        state = data
        if state.psi.shape[1] != g.n_u + 1:
            raise ValueError("prepared data does not match the grid")
    else:
        state = init_characteristic_data(data, p, g)
    if not (0.0 < eta < 1.0):
        raise ValueError(f"eta must be in (0, 1), got {eta}")
    if not (0.0 < alpha and 0.6 - 0.3 * alpha > 0.5):
        raise ValueError(f"alpha must satisfy 0 < alpha < 1/3, got {alpha}")
    if not (bin_width > 0.0):
        raise ValueError("bin_width must be positive")

    bin_t0 = -bin_width * math.ceil((g.r_max + 2.0) / bin_width)
    n_bins = int(math.ceil((g.v_extent + g.r_max + 4.0) / bin_width)) + 2

    out = _march.march(
        g.n_u, g.n_v, g.du, g.dv, p.mass, p.r_plus, p.r_minus, g.r_max,
        state.psi[0].copy(), state.boundary_psi,
        int(nl.kind), int(nl.a_profile), nl.a0, nl.power_l, 2 * nl.n,
        0.5 * nl.cutoff_width,
        probes_arr, r_split,
        eta, alpha, bin_width, bin_t0, n_bins,
        pp_i, pp_j, store_stride)
    (status, rows_done, strip_psi, strip_r, strip_nu, strip_w,
     inner, inner_n, ray, ray_n, ray_col, ray_anchor_dv,
     mor_bins, a2_bins, a3_bins, supt_bins, supy_bins,
     pp_vals, full, blow_u, blow_v) = out

    m = rows_done + 1
    strip_psi = strip_psi[:, :m]
    strip_r = strip_r[:, :m]
    strip_nu = strip_nu[:, :m]
    strip_w = strip_w[:, :m]
    v_axis = np.arange(m) * g.dv

    zeta = _zeta_transport(nl, strip_psi[0], strip_nu[0], state.zeta0,
                           p.r_plus, g.dv)

    slices = []
    for q in range(probes_arr.size):
        ni = int(inner_n[q])
        nr = int(ray_n[q])
        inn = inner[q, :ni, :]
        ry = ray[q, :nr, :]
        if nr >= 3:
            try:
                ray_dv = np.gradient(ry[:, 2], ry[:, 0], edge_order=2)
            except ValueError:
                ray_dv = np.gradient(ry[:, 2], ry[:, 0])
            ray_dv[0] = ray_anchor_dv[q]
        elif nr >= 1:
            ray_dv = np.full(nr, ray_anchor_dv[q])
        else:
            ray_dv = np.zeros(0)
        snapped = ray_col[q] >= 0
        slices.append(RawSlice(
            tau=float(probes_arr[q]),
            inner_r=inn[:, 0].copy(), inner_psi=inn[:, 1].copy(),
            inner_dvpsi=inn[:, 2].copy(), inner_dupsi=inn[:, 3].copy(),
            inner_nu=inn[:, 4].copy(), inner_v=inn[:, 5].copy(),
            ray_v=ry[:, 0].copy(), ray_r=ry[:, 1].copy(),
            ray_psi=ry[:, 2].copy(), ray_dupsi=ry[:, 3].copy(),
            ray_nu=ry[:, 4].copy(), ray_dvpsi=ray_dv,
            ray_u=float(ray_col[q] * g.du) if snapped else float("nan"),
            r0_eff=float(ry[0, 1]) if snapped else float("nan"),
            partial=not snapped))

    bins = BinSet(t0=bin_t0, width=bin_width, morawetz=mor_bins,
                  f_sq=a2_bins, f_sq_outer=a3_bins,
                  sup_T=supt_bins, sup_Y=supy_bins,
                  eta=eta, alpha=alpha, r_split=r_split)
    blow = BlowupPoint(u=float(blow_u), v=float(blow_v)) if status == 2 else None

    return EvolutionResult(
        params=p, grid=g, data=data, nl=nl, status=int(status),
        rows_done=int(rows_done), v=v_axis,
        strip_psi=strip_psi, strip_r=strip_r, strip_nu=strip_nu,
        strip_w=strip_w, zeta=zeta, slices=slices, bins=bins,
        point_values=pp_vals, full=full if store_stride else None,
        store_stride=store_stride, blowup=blow,
        e0=state.e0, zeta0=state.zeta0,
        meta={"epsilon": getattr(data, "epsilon", 0.0), "du": g.du,
              "dv": g.dv,
              "r_split": r_split})


def ef_derivatives(psi_field: np.ndarray, geom: GeometryField, point):
    """(T psi, Y psi) at a grid point from a fully stored field.

    Y psi = du_psi / nu and T psi = dv_psi - lambda Y psi (grid rate); on
    the horizon row lambda = D(r_plus) = 0 exactly, so T psi = dv_psi there.
    Finite differences are centered inside, one-sided (2nd order) on edges.
    """
    jv, iu = point
    g = geom.grid
    if psi_field.shape != geom.r.shape:
        raise ValueError("field and geometry shapes differ")
    nu = geom.nu[jv, iu]
    if not nu < 0.0:
        raise ValueError(f"nu={nu} not negative at {point}")

    def _d(axis_vals, k, n, h):
        if 0 < k < n:
            return (axis_vals[k + 1] - axis_vals[k - 1]) / (2.0 * h)
        if k == 0:
            return (-3.0 * axis_vals[0] + 4.0 * axis_vals[1] - axis_vals[2]) / (2.0 * h)
        return (3.0 * axis_vals[n] - 4.0 * axis_vals[n - 1] + axis_vals[n - 2]) / (2.0 * h)

    du_psi = _d(psi_field[jv, :], iu, g.n_u, g.du)
    dv_psi = _d(psi_field[:, iu], jv, g.n_v, g.dv)
    lam = metric_D(geom.r[jv, iu], geom.params)
    y = du_psi / nu
    return dv_psi - lam * y, y


def transverse_derivative_k(strip_psi, strip_nu, strip_w, du, k: int):
    """Series of Y^k psi(v) on the horizon from the 4-column strip.

    One-sided u-stencils into the bulk (columns u = U - m du, m = 0..3),
    converted to Y derivatives with the stored nu and du nu:

        Y   = (1/nu) du
        Y^2 = du2/nu^2 - du1 w / nu^3
        Y^3 = du3/nu^3 - 3 w du2/nu^4 - du1 dw/nu^4 + 3 w^2 du1/nu^5
    """
    if k not in (1, 2, 3):
        raise ValueError(f"k must be 1, 2 or 3, got {k}")
    need = 3 if k == 1 else 4
    if strip_psi.shape[0] < need:
        raise ValueError(f"k={k} needs {need} stored strip columns")
    f0, f1, f2 = strip_psi[0], strip_psi[1], strip_psi[2]
    nu = strip_nu[0]
    d1 = (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * du)
    if k == 1:
        return d1 / nu
    f3 = strip_psi[3]
    w = strip_w[0]
    d2 = (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / du**2
    if k == 2:
        return d2 / nu**2 - d1 * w / nu**3
    d3 = (f0 - 3.0 * f1 + 3.0 * f2 - f3) / du**3
    dw = (3.0 * strip_w[0] - 4.0 * strip_w[1] + strip_w[2]) / (2.0 * du)
    return (d3 / nu**3 - 3.0 * w * d2 / nu**4 - d1 * dw / nu**4
            + 3.0 * w**2 * d1 / nu**5)
