"""Energy fluxes, weighted bulk norms, and nonlinearity norms on t* slices.

Conventions, held fixed everywhere:

* A slice with label tau is the curve t* = v - r = tau for r <= R0 (the
  "inner" part, a graph over r), continued by the outgoing null ray
  u = u_tau for r >= R0 (the "outer" part).
* Measures: r^2 dr on the inner part, r^2 dv along rays, and
  r^2 dr dt* = r^2 |nu| du dv for bulk slabs.  The angular factor is
  omitted uniformly; only ratios, exponents and scalings are asserted
  downstream, so a global constant is immaterial.
* ``t_psi`` on samples is the grid-rate transport derivative
  dv_psi - D(r) du_psi / nu.  The Killing-normalized rate is half of it;
  the conversion is applied only when evaluating the source F, never
  inside the quadratic flux integrands.
"""

from dataclasses import dataclass, replace

import numpy as np

from .nonlinearity import NonlinearitySpec, smoothstep5, source_ef
from .spacetime import SpacetimeParams, metric_D


@dataclass(frozen=True)
class SliceSpec:
    """Label and transition radius of one diagnostic slice."""

    tau: float
    r0: float

    def __post_init__(self):
        if not np.isfinite(self.tau):
            raise ValueError("slice label must be finite")
        if not np.isfinite(self.r0) or self.r0 <= 0.0:
            raise ValueError(f"transition radius r0={self.r0} must be positive")


@dataclass(frozen=True)
class DiagnosticsConfig:
    """Exponents and blend radii shared by the functional suite.

    eta weights the bulk integrand by r^-(1+eta); p is the outgoing
    r-weight exponent; alpha is the decay bookkeeping exponent and must
    keep 3/5 - 3 alpha/10 above 1/2.  (r0, r1) bound the region where the
    p_flux weight blends from sqrt(D) to 1; both must sit between the
    horizon and 2M of the spacetime the config is used with.
    """

    eta: float = 0.5
    p: float = 1.0
    alpha: float = 0.1
    r0: float = 1.3
    r1: float = 1.8

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta={self.eta} outside (0, 1)")
        if not self.p < 3.0:
            raise ValueError(f"p={self.p} must be < 3")
        if not (self.alpha > 0.0 and 0.6 - 0.3 * self.alpha > 0.5):
            raise ValueError(f"alpha={self.alpha} outside (0, 1/3)")
        if not 0.0 < self.r0 < self.r1:
            raise ValueError(f"need 0 < r0 < r1, got ({self.r0}, {self.r1})")

    def check_radii(self, params: SpacetimeParams):
        if not (params.r_plus < self.r0 and self.r1 < 2.0 * params.mass):
            raise ValueError(
                f"blend radii ({self.r0}, {self.r1}) must lie in "
                f"(r_plus, 2M) = ({params.r_plus}, {2.0 * params.mass})")


@dataclass(frozen=True)
class SampledSlice:
    """One extracted slice with pointwise derivatives ready for quadrature."""

    tau: float
    r0: float
    partial: bool
    inner_r: np.ndarray
    inner_psi: np.ndarray
    inner_t: np.ndarray
    inner_y: np.ndarray
    inner_dv: np.ndarray
    ray_v: np.ndarray
    ray_r: np.ndarray
    ray_psi: np.ndarray
    ray_dv: np.ndarray
    ray_t: np.ndarray
    ray_y: np.ndarray
    measure: str = "r2dr_inner, r2dv_ray"

    def scaled(self, c: float) -> "SampledSlice":
        """The same slice with the field replaced by c * field."""
        return replace(
            self,
            inner_psi=c * self.inner_psi, inner_t=c * self.inner_t,
            inner_y=c * self.inner_y, inner_dv=c * self.inner_dv,
            ray_psi=c * self.ray_psi, ray_dv=c * self.ray_dv,
            ray_t=c * self.ray_t, ray_y=c * self.ray_y)


@dataclass(frozen=True)
class SliceDiagnostics:
    tau: float
    t_flux: float
    n_flux: float
    p_flux: float
    rp_energy: float
    hardy_lhs: float
    hardy_rhs: float
    sup_psi: float
    sup_Tpsi: float
    sup_Ypsi: float
    F_l2_inner: float
    partial: bool
    measure: str


@dataclass(frozen=True)
class BootstrapNorms:
    a1: float
    a2: float
    a3: float
    a1_normalized: float
    a2_normalized: float
    a3_normalized: float


def _find_raw(result, tau: float):
    for sl in result.slices:
        if abs(sl.tau - tau) < 1e-9:
            return sl
    raise ValueError(
        f"tau={tau} was not probed by this run; available: "
        f"{[s.tau for s in result.slices]}")


def slice_extract(result, spec: SliceSpec) -> SampledSlice:
    """Assemble the sampled slice for one probe of an evolution result.

    The crossings were recorded during the march, so the probe label must
    be one of the run's probes and the transition radius must match the
    run's split radius.
    """
    raw = _find_raw(result, spec.tau)
    p = result.params
    r_split = float(result.meta["r_split"])
    if abs(spec.r0 - r_split) > 1e-9:
        raise ValueError(
            f"transition radius {spec.r0} does not match the run's split "
            f"radius {r_split}; re-run evolve() with r_split={spec.r0}")

    d_in = metric_D(raw.inner_r, p) if raw.inner_r.size else np.zeros(0)
    with np.errstate(divide="ignore", invalid="ignore"):
        y_in = np.where(raw.inner_nu != 0.0,
                        raw.inner_dupsi / raw.inner_nu, 0.0)
    t_in = raw.inner_dvpsi - d_in * y_in

    if raw.ray_r.size:
        d_ray = metric_D(raw.ray_r, p)
        y_ray = raw.ray_dupsi / raw.ray_nu
        t_ray = raw.ray_dvpsi - d_ray * y_ray
    else:
        y_ray = t_ray = np.zeros(0)

    return SampledSlice(
        tau=raw.tau, r0=r_split, partial=raw.partial,
        inner_r=raw.inner_r, inner_psi=raw.inner_psi,
        inner_t=t_in, inner_y=y_in, inner_dv=raw.inner_dvpsi,
        ray_v=raw.ray_v, ray_r=raw.ray_r, ray_psi=raw.ray_psi,
        ray_dv=raw.ray_dvpsi, ray_t=t_ray, ray_y=y_ray)


def _ray_term(s: SampledSlice) -> float:
    return float(np.trapezoid(s.ray_dv**2 * s.ray_r**2, x=s.ray_v))


def t_flux(s: SampledSlice, params: SpacetimeParams) -> float:
    """Degenerate energy through the slice:
    inner (T psi)^2 + D (Y psi)^2, outer (dv psi)^2."""
    d = metric_D(s.inner_r, params) if s.inner_r.size else np.zeros(0)
    inner = np.trapezoid((s.inner_t**2 + d * s.inner_y**2) * s.inner_r**2,
                         x=s.inner_r)
    return float(inner) + _ray_term(s)


def n_flux(s: SampledSlice, params: SpacetimeParams) -> float:
    """Non-degenerate energy: the transversal term enters unweighted."""
    inner = np.trapezoid((s.inner_t**2 + s.inner_y**2) * s.inner_r**2,
                         x=s.inner_r)
    return float(inner) + _ray_term(s)


def _p_weight(r, params: SpacetimeParams, r0: float, r1: float):
    d = metric_D(r, params)
    blend = smoothstep5((np.asarray(r, dtype=float) - r0) / (r1 - r0))
    return (1.0 - blend) * np.sqrt(d) + blend


def p_flux(s: SampledSlice, params: SpacetimeParams,
           r0: float = 1.3, r1: float = 1.8) -> float:
    """Intermediate energy: sqrt(D)-weighted transversal term near the
    horizon, blending to weight 1 across [r0, r1]."""
    if not params.r_plus < r0 < r1 < 2.0 * params.mass:
        raise ValueError(
            f"need r_plus < r0 < r1 < 2M, got ({r0}, {r1}) with "
            f"r_plus={params.r_plus}, M={params.mass}")
    if s.inner_r.size:
        w = _p_weight(s.inner_r, params, r0, r1)
        inner = np.trapezoid((s.inner_t**2 + w * s.inner_y**2) * s.inner_r**2,
                             x=s.inner_r)
    else:
        inner = 0.0
    return float(inner) + _ray_term(s)


def rp_weighted_energy(s: SampledSlice, params: SpacetimeParams,
                       p: float = 1.0) -> float:
    """r^p-weighted outgoing energy of phi = r psi along the ray:
    integral of r^(p-2) (dv phi)^2 dv."""
    if not p < 3.0:
        raise ValueError(f"p={p} must be < 3")
    if s.ray_r.size == 0:
        return 0.0
    dvphi = metric_D(s.ray_r, params) * s.ray_psi + s.ray_r * s.ray_dv
    return float(np.trapezoid(s.ray_r ** (p - 2.0) * dvphi**2, x=s.ray_v))


def hardy_ratio(s: SampledSlice, params: SpacetimeParams):
    """(integral of psi^2/r^2 over the slice, t_flux) as a pair."""
    lhs = float(np.trapezoid(s.inner_psi**2, x=s.inner_r))
    lhs += float(np.trapezoid(s.ray_psi**2, x=s.ray_v))
    return lhs, t_flux(s, params)


def _bin_window(result, tau1: float, tau2: float):
    b = result.bins
    if not tau1 < tau2:
        raise ValueError(f"need tau1 < tau2, got ({tau1}, {tau2})")
    k1 = (tau1 - b.t0) / b.width
    k2 = (tau2 - b.t0) / b.width
    if abs(k1 - round(k1)) > 1e-9 or abs(k2 - round(k2)) > 1e-9:
        raise ValueError(
            f"slab endpoints ({tau1}, {tau2}) must sit on bin edges "
            f"(t0={b.t0}, width={b.width})")
    return int(round(k1)), int(round(k2))


def morawetz_bulk(result, tau1: float, tau2: float,
                  eta: float | None = None) -> float:
    """Weighted bulk integral of (T psi)^2 / r^(1+eta) + D^2 (Y psi)^2 /
    r^(1+eta) over the slab tau1 <= t* < tau2.

    The integrand was accumulated cell by cell during the march with the
    run's eta; pass the same value (or None to accept it)."""
    b = result.bins
    if eta is not None and abs(eta - b.eta) > 1e-12:
        raise ValueError(
            f"eta={eta} does not match the run's binned eta={b.eta}")
    k1, k2 = _bin_window(result, tau1, tau2)
    return float(np.sum(result.bins.morawetz[k1:k2]))


def bootstrap_norms(result, tau0: float, tau1: float, tau2: float,
                    alpha: float | None = None) -> BootstrapNorms:
    """Source-size norms: A1 on the slice at tau0, A2 over the slab
    [tau1, tau2], A3 with the outgoing r^(3-alpha) weight on the outer
    region of the same slab.  Normalized entries carry the factor
    (1+tau)^(2-alpha) / E0 with E0 the data energy of the run (zero data
    gives zeros)."""
    b = result.bins
    if alpha is not None and abs(alpha - b.alpha) > 1e-12:
        raise ValueError(
            f"alpha={alpha} does not match the run's binned alpha={b.alpha}")
    al = b.alpha
    s = slice_extract(result, SliceSpec(tau0, float(result.meta["r_split"])))
    a1 = f_l2_inner(s, result.nl, result.params)
    k1, k2 = _bin_window(result, tau1, tau2)
    a2 = float(np.sum(b.f_sq[k1:k2]))
    a3 = float(np.sum(b.f_sq_outer[k1:k2]))
    e0 = result.e0
    if e0 > 0.0:
        q1 = a1 * (1.0 + tau0) ** (2.0 - al) / e0
        q2 = a2 * (1.0 + tau1) ** (2.0 - al) / e0
        q3 = a3 * (1.0 + tau1) ** (2.0 - al) / e0
    else:
        q1 = q2 = q3 = 0.0
    return BootstrapNorms(a1, a2, a3, q1, q2, q3)


def f_l2_inner(s: SampledSlice, nl: NonlinearitySpec,
               params: SpacetimeParams) -> float:
    """L2 norm (squared) of the source F over the inner slice.

    The recorded t is the grid rate; F is evaluated at the Killing rate,
    hence the factor 1/2 on t here and nowhere else."""
    if s.inner_r.size == 0:
        return 0.0
    d = metric_D(s.inner_r, params)
    f = source_ef(s.inner_psi, 0.5 * s.inner_t, s.inner_y, d, nl,
                  r=s.inner_r, r_plus=params.r_plus)
    return float(np.trapezoid(np.asarray(f) ** 2 * s.inner_r**2,
                              x=s.inner_r))


def slice_diagnostics(result, tau: float,
                      cfg: DiagnosticsConfig = DiagnosticsConfig()
                      ) -> SliceDiagnostics:
    """All per-slice scalars for one probe, sharing a single extraction."""
    p = result.params
    cfg.check_radii(p)
    s = slice_extract(result, SliceSpec(tau, float(result.meta["r_split"])))
    lhs, rhs = hardy_ratio(s, p)

    def _sup(a, b):
        vals = [np.max(np.abs(x)) for x in (a, b) if x.size]
        return float(max(vals)) if vals else 0.0

    return SliceDiagnostics(
        tau=s.tau,
        t_flux=rhs,
        n_flux=n_flux(s, p),
        p_flux=p_flux(s, p, cfg.r0, cfg.r1),
        rp_energy=rp_weighted_energy(s, p, cfg.p),
        hardy_lhs=lhs,
        hardy_rhs=rhs,
        sup_psi=_sup(s.inner_psi, s.ray_psi),
        sup_Tpsi=_sup(s.inner_t, s.ray_t),
        sup_Ypsi=_sup(s.inner_y, s.ray_y),
        F_l2_inner=f_l2_inner(s, result.nl, p),
        partial=s.partial,
        measure=s.measure)


def transport_profile_n(r, params: SpacetimeParams):
    """Timelike multiplier components (N^v, N^r): N^v descends smoothly
    from 2 at the horizon to 1, N^r is the smoothed negative part of
    1 - r/(8M/7), supported on [r_plus, 8M/7]."""
    r = np.asarray(r, dtype=float)
    rn = 8.0 * params.mass / 7.0
    rp = params.r_plus
    # far from extremality rn can fall below the horizon; the radial part
    # is then empty and only the transition scale needs a fallback
    span = rn - rp if rn > rp else 0.125 * params.mass
    nv = 2.0 - smoothstep5((r - rp) / span)
    nr = -np.maximum(1.0 - r / rn, 0.0) * smoothstep5(2.0 * (rn - r) / span)
    return nv, nr


def transport_profile_p(r, params: SpacetimeParams,
                        r0: float = 1.3, r1: float = 1.8):
    """Intermediate multiplier components (P^v, P^r): P^v descends from 2
    at the horizon to 1 at r1; P^r equals -sqrt(D) up to r0 and tapers to
    0 at r1."""
    if not params.r_plus < r0 < r1 < 2.0 * params.mass:
        raise ValueError(
            f"need r_plus < r0 < r1 < 2M, got ({r0}, {r1})")
    r = np.asarray(r, dtype=float)
    pv = 2.0 - smoothstep5((r - params.r_plus) / (r1 - params.r_plus))
    pr = -np.sqrt(metric_D(r, params)) * (1.0 - smoothstep5((r - r0) / (r1 - r0)))
    return pv, pr
