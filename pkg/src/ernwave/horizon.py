"""Horizon-row time series, the almost-conserved quantity H, transverse
growth fits, and the Lower-bound ODE certification of blow-up.

The series clock is the ingoing coordinate v of the march.  The
Killing-normalized transport rate is half the v-rate, and the certified
blow-up constant below is stated in the Killing clock, so every bound it
yields is conservative by a factor 2 when compared against v-clock data.
Both the envelope check and the bound therefore hold a fortiori.
"""

import math
from dataclasses import dataclass

import numpy as np

from .evolution import EvolutionResult, transverse_derivative_k
from .nonlinearity import Kind, NonlinearitySpec, amplitude_A


@dataclass(frozen=True)
class HorizonSeries:
    """Uniformly sampled horizon-row values.  Y_psi comes from the
    transported zeta channel; Y_psi_fd is the one-sided finite-difference
    cross-check from the stored near-horizon strip."""

    tau: np.ndarray
    psi: np.ndarray
    T_psi: np.ndarray
    Y_psi: np.ndarray
    Y_psi_fd: np.ndarray
    Y2_psi: np.ndarray
    Y3_psi: np.ndarray
    H: np.ndarray
    mass: float
    du: float
    dv: float
    epsilon: float


@dataclass(frozen=True)
class GrowthFit:
    slope: float
    intercept: float
    window: tuple
    increasing: bool


@dataclass(frozen=True)
class BlowupReport:
    n: int
    eta0: float
    c_n: float
    tau_star: float
    tau_blow: float
    lower_envelope_ok: bool


def horizon_series(result: EvolutionResult) -> HorizonSeries:
    """Assemble the horizon series of a run (complete or aborted)."""
    psi = result.strip_psi[0]
    m = psi.size
    if m < 3:
        raise ValueError(f"horizon series needs at least 3 rows, got {m}")
    p = result.params
    dv = result.grid.dv
    tau = result.v
    t_psi = np.gradient(psi, dv, edge_order=2)
    nu = result.nu_h
    y = result.zeta / (p.r_plus * nu)
    y_fd = transverse_derivative_k(result.strip_psi, result.strip_nu,
                                   result.strip_w, result.grid.du, 1)
    y2 = transverse_derivative_k(result.strip_psi, result.strip_nu,
                                 result.strip_w, result.grid.du, 2)
    y3 = transverse_derivative_k(result.strip_psi, result.strip_nu,
                                 result.strip_w, result.grid.du, 3)
    return HorizonSeries(
        tau=tau, psi=psi, T_psi=t_psi, Y_psi=y, Y_psi_fd=y_fd,
        Y2_psi=y2, Y3_psi=y3, H=y + psi / p.mass,
        mass=p.mass, du=result.grid.du, dv=dv,
        epsilon=float(result.meta["epsilon"]))


def conservation_drift(series: HorizonSeries):
    """(max |H - H(0)|, same normalized by epsilon^2)."""
    drift = float(np.max(np.abs(series.H - series.H[0])))
    eps = series.epsilon
    return drift, (drift / eps**2 if eps > 0.0 else 0.0)


def h_transport_residual(series: HorizonSeries,
                         nl: NonlinearitySpec) -> float:
    """Max residual of the discrete transport law for H along the row:
    d H / d tau should equal A(psi) Tpsi Ypsi for the null form (the
    Killing-clock factors cancel between the two sides) and vanish for
    the Zero kind."""
    if nl.kind == Kind.ZERO:
        rhs = np.zeros_like(series.H)
    elif nl.kind == Kind.NULL_FORM:
        rhs = amplitude_A(series.psi, nl) * series.T_psi * series.Y_psi
    else:
        raise ValueError(
            f"transport residual is defined for Zero/NullForm runs, "
            f"got {nl.kind.name}")
    lhs = np.gradient(series.H, series.dv, edge_order=2)
    return float(np.max(np.abs(lhs - rhs)))


def growth_fit(series: HorizonSeries, k: int) -> GrowthFit:
    """Least-squares line through |Y^k psi| over the last half of the
    series."""
    if k not in (2, 3):
        raise ValueError(f"growth fit supports k in {{2, 3}}, got {k}")
    y = np.abs(series.Y2_psi if k == 2 else series.Y3_psi)
    m = y.size
    lo = m // 2
    if m - lo < 4:
        raise ValueError(f"series too short for a growth fit ({m} rows)")
    t = series.tau[lo:]
    yy = y[lo:]
    slope, intercept = np.polyfit(t, yy, 1)
    return GrowthFit(slope=float(slope), intercept=float(intercept),
                     window=(float(t[0]), float(t[-1])),
                     increasing=bool(yy[-1] > yy[0]))


def blowup_constant(n: int, mass: float) -> float:
    """Certified constant in a^2n + b^2n >= C_n (a + b/M)^2n, conservative
    by design: half the sharp power-mean value."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if mass <= 0.0:
        raise ValueError("mass must be positive")
    return 0.5 * 2.0 ** (1 - 2 * n) * min(1.0, mass ** (2 * n))


def blowup_bound(n: int, eta0: float, mass: float) -> float:
    """Upper bound on the blow-up time of dH/dtau >= C_n H^2n, H(0) =
    eta0.  Nonpositive eta0 does not guarantee blow-up: the bound is
    infinite (report only)."""
    if eta0 <= 0.0:
        return math.inf
    c = blowup_constant(n, mass)
    return 1.0 / ((2 * n - 1) * c * eta0 ** (2 * n - 1))


def _envelope(tau, n, eta0, c):
    base = 1.0 - (2 * n - 1) * c * eta0 ** (2 * n - 1) * tau
    return eta0 * base ** (-1.0 / (2 * n - 1))


def certify_comparison(series: HorizonSeries, n: int) -> bool:
    """True when H dominates the comparison ODE solution at every sample
    before the ODE's own blow-up time."""
    eta0 = float(series.H[0])
    if eta0 <= 0.0:
        return False
    c = blowup_constant(n, series.mass)
    tstar = blowup_bound(n, eta0, series.mass)
    mask = series.tau < tstar * (1.0 - 1e-12)
    env = _envelope(series.tau[mask], n, eta0, c)
    return bool(np.all(series.H[mask] >= env * (1.0 - 1e-6)))


def blowup_report(result: EvolutionResult, n: int | None = None
                  ) -> BlowupReport:
    """Certification summary for a run expected to blow up."""
    if n is None:
        if result.nl.kind != Kind.NONNULL_HORIZON:
            raise ValueError("pass n explicitly for non-horizon-source runs")
        n = result.nl.n
    series = horizon_series(result)
    eta0 = float(series.H[0])
    c = blowup_constant(n, series.mass)
    tau_star = blowup_bound(n, eta0, series.mass)
    tau_blow = result.blowup.v if result.blowup is not None else math.inf
    ok = result.blowup is not None and certify_comparison(series, n)
    return BlowupReport(n=n, eta0=eta0, c_n=c, tau_star=tau_star,
                        tau_blow=tau_blow, lower_envelope_ok=ok)
