"""Catalog of wave-equation right-hand sides F.

Each kind can be evaluated in two charts:

* ``source_ef``   takes (psi, T psi, Y psi, D) in outgoing-time / radius
  variables and is what every diagnostics integral of |F|^2 consumes.
* ``source_null`` takes (psi, du_psi, dv_psi, Omega^2) in the double-null
  gauge of the evolution grid and is what the marching stencil consumes.

Normalization note.  The marched null coordinate v satisfies dr/dv = D along
outgoing rays, which makes the chain rule read  dv_psi = Tpsi_grid + D Ypsi
for the grid-rate Tpsi_grid = dv_psi - D du_psi / nu.  The Killing-time
derivative appearing in the quadratic form below is half that grid rate:
T_killing = Tpsi_grid / 2.  ``source_ef`` expects the Killing normalization
(that is the chart in which the coefficient of the cross term is 2); the
evolution and diagnostics record the grid rate, so callers converting
between the two divide by two.  ``chart_consistency_gap`` packages the
conversion for tests.
"""

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Kind",
    "AProfile",
    "NonlinearitySpec",
    "amplitude_A",
    "cutoff_chi",
    "source_ef",
    "source_null",
    "chart_consistency_gap",
    "smoothstep5",
]


class Kind(enum.IntEnum):
    ZERO = 0
    NULL_FORM = 1
    POWER_TERM = 2
    NONNULL_HORIZON = 3


class AProfile(enum.IntEnum):
    """Amplitude family for the null-form coupling A(psi).

    CONSTANT  A = a0
    COSINE    A = a0 cos(psi), smooth with all derivative bounds equal a0
    LINEAR    A = psi, the sphere-like profile |A(psi)| <= |psi|
    """

    CONSTANT = 0
    COSINE = 1
    LINEAR = 2


@dataclass(frozen=True)
class NonlinearitySpec:
    kind: Kind = Kind.ZERO
    a_profile: AProfile = AProfile.CONSTANT
    a0: float = 1.0
    power_l: int = 6          # POWER_TERM exponent, |psi|^l
    n: int = 2                # NONNULL_HORIZON half-exponent, terms ^(2n)
    cutoff_width: float = 1.0  # NONNULL_HORIZON chi support width above r_plus

    def __post_init__(self):
        if not isinstance(self.kind, Kind):
            object.__setattr__(self, "kind", Kind(self.kind))
        if not isinstance(self.a_profile, AProfile):
            object.__setattr__(self, "a_profile", AProfile(self.a_profile))
        if self.kind == Kind.POWER_TERM and self.power_l < 2:
            raise ValueError(f"power_l must be >= 2, got {self.power_l}")
        if self.kind == Kind.NONNULL_HORIZON:
            if self.n < 2:
                raise ValueError(f"n must be >= 2, got {self.n}")
            if not (self.cutoff_width > 0.0):
                raise ValueError(f"cutoff_width must be positive, got {self.cutoff_width}")
        if not np.isfinite(self.a0):
            raise ValueError("a0 must be finite")

    def derivative_bound(self, k: int) -> float:
        """Declared bound on |A^(k)| for k = 0, 1, 2 (bounded profiles only)."""
        if self.a_profile in (AProfile.CONSTANT, AProfile.COSINE):
            return abs(self.a0)
        raise ValueError("LINEAR profile is bounded by |psi|, not by a constant")


def amplitude_A(psi, spec: NonlinearitySpec):
    """A(psi) for the selected profile.  NULL_FORM only."""
    if spec.kind != Kind.NULL_FORM:
        raise ValueError(f"amplitude_A is defined for NULL_FORM, got {spec.kind.name}")
    psi = np.asarray(psi, dtype=float)
    if spec.a_profile == AProfile.CONSTANT:
        out = np.full_like(psi, spec.a0)
    elif spec.a_profile == AProfile.COSINE:
        out = spec.a0 * np.cos(psi)
    else:
        out = psi.copy()
    return out if out.ndim else float(out)


def smoothstep5(x):
    """Degree-5 smoothstep: 0 for x <= 0, 1 for x >= 1, C^2 monotone between."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    out = x * x * x * (x * (6.0 * x - 15.0) + 10.0)
    return out if out.ndim else float(out)


def cutoff_chi(r, r_plus: float, spec: NonlinearitySpec):
    """Radial cutoff for the non-null source: 1 on [r_plus, r_plus + c/2],
    0 from r_plus + c on, smoothly descending in between."""
    c = spec.cutoff_width
    s = (np.asarray(r, dtype=float) - r_plus - 0.5 * c) / (0.5 * c)
    out = np.asarray(1.0 - smoothstep5(s))
    return out if out.ndim else float(out)


def _amplitude_raw(psi, spec):
    # amplitude_A without the kind guard, for internal use by the sources
    if spec.a_profile == AProfile.CONSTANT:
        return np.full_like(np.asarray(psi, dtype=float), spec.a0)
    if spec.a_profile == AProfile.COSINE:
        return spec.a0 * np.cos(psi)
    return np.asarray(psi, dtype=float)


def source_ef(psi, T_psi, Y_psi, D, spec: NonlinearitySpec, *, r=None, r_plus=None):
    """Scalar source F in outgoing-time / radius variables.

    NULL_FORM:        A(psi) [ D (Y psi)^2 + 2 T psi Y psi ]   (T Killing-normalized)
    POWER_TERM:       |psi|^l
    NONNULL_HORIZON:  psi^(2n) + chi(r) [ (T psi)^(2n) + (Y psi)^(2n) ]
    ZERO:             0

    The non-null kind needs the radius to evaluate chi, so ``r`` and
    ``r_plus`` are required for it (at the horizon chi = 1, so passing
    r = r_plus reproduces the pure horizon form).
    """
    psi = np.asarray(psi, dtype=float)
    T_psi = np.asarray(T_psi, dtype=float)
    Y_psi = np.asarray(Y_psi, dtype=float)
    D = np.asarray(D, dtype=float)
    if np.any(D < -1e-15):
        raise ValueError("source_ef: D must be nonnegative")

    if spec.kind == Kind.ZERO:
        out = np.zeros(np.broadcast(psi, T_psi, Y_psi, D).shape)
    elif spec.kind == Kind.NULL_FORM:
        out = _amplitude_raw(psi, spec) * (D * Y_psi * Y_psi + 2.0 * T_psi * Y_psi)
    elif spec.kind == Kind.POWER_TERM:
        out = np.abs(psi) ** spec.power_l
    else:
        if r is None or r_plus is None:
            raise ValueError(
                "source_ef: NONNULL_HORIZON needs r and r_plus for the cutoff chi"
            )
        chi = cutoff_chi(r, r_plus, spec)
        n2 = 2 * spec.n
        out = psi**n2 + chi * (T_psi**n2 + Y_psi**n2)
    out = np.asarray(out)
    return out if out.ndim else float(out)


def source_null(psi, du_psi, dv_psi, r, omega_sq, spec: NonlinearitySpec):
    """Scalar source F in double-null gauge variables.

    For NULL_FORM this is -(4/Omega^2) A(psi) du_psi dv_psi, the invariant
    quadratic form evaluated directly in the marched chart.  POWER_TERM and
    ZERO do not involve derivatives and are chart-independent.  The
    NONNULL_HORIZON kind needs lambda and nu separately (not just their
    product Omega^2), so it is not expressible here; use ``source_ef``.
    """
    omega_sq = np.asarray(omega_sq, dtype=float)
    if np.any(omega_sq <= 0.0):
        raise ValueError("source_null: omega_sq must be positive")
    if spec.kind == Kind.NONNULL_HORIZON:
        raise ValueError(
            "source_null: the non-null source is chart-dependent; "
            "evaluate it with source_ef"
        )
    psi = np.asarray(psi, dtype=float)
    if spec.kind == Kind.ZERO:
        out = np.zeros(np.broadcast(psi, du_psi, dv_psi, omega_sq).shape)
    elif spec.kind == Kind.POWER_TERM:
        out = np.abs(psi) ** spec.power_l
    else:
        out = -(4.0 / omega_sq) * _amplitude_raw(psi, spec) * np.asarray(du_psi) * np.asarray(dv_psi)
    out = np.asarray(out)
    return out if out.ndim else float(out)


def chart_consistency_gap(psi, du_psi, dv_psi, r, nu, D, spec: NonlinearitySpec):
    """|source_null - source_ef| after the chart map, for verification.

    Maps the null-gauge state to (T, Y) via Y = du_psi / nu and the
    Killing-normalized T = (dv_psi - D Y) / 2, then evaluates both sides.
    Identically zero (to roundoff) for every kind both charts support.
    """
    nu = np.asarray(nu, dtype=float)
    if np.any(nu >= 0.0):
        raise ValueError("chart_consistency_gap: nu must be negative")
    omega_sq = -4.0 * nu
    y = np.asarray(du_psi) / nu
    t = 0.5 * (np.asarray(dv_psi) - np.asarray(D) * y)
    f_null = source_null(psi, du_psi, dv_psi, r, omega_sq, spec)
    f_ef = source_ef(psi, t, y, D, spec)
    return np.abs(f_null - f_ef)
