"""Run configuration: a single INI-style text file mapping onto the
component specs.  Parsing is strict (unknown sections or keys are
errors), every key has a default, and parse -> serialize -> parse is an
identity on the resulting RunConfig.

Grammar: configparser INI.  Sections and keys:

    [spacetime] mass, charge
    [grid]      r_max, v_max, du, dv
    [data]      epsilon, center, width, horizon_positive
    [nonlinearity] kind (zero|null_form|power_term|nonnull_horizon),
                a_profile (constant|cosine|linear), a0, power, n,
                cutoff_width
    [diagnostics] eta, p, alpha, r0, r1, r_split, bin_width
    [run]       probes (comma-separated, ascending), out_dir
"""

import configparser
from dataclasses import dataclass, field

from .diagnostics import DiagnosticsConfig
from .evolution import GridSpec, InitialDataSpec
from .nonlinearity import AProfile, Kind, NonlinearitySpec
from .spacetime import SpacetimeParams


class ConfigError(ValueError):
    """Invalid or unreadable run configuration; message names the field."""


_KIND_NAMES = {
    "zero": Kind.ZERO,
    "null_form": Kind.NULL_FORM,
    "power_term": Kind.POWER_TERM,
    "nonnull_horizon": Kind.NONNULL_HORIZON,
}
_PROFILE_NAMES = {
    "constant": AProfile.CONSTANT,
    "cosine": AProfile.COSINE,
    "linear": AProfile.LINEAR,
}


@dataclass(frozen=True)
class RunConfig:
    params: SpacetimeParams = SpacetimeParams(mass=1.0, charge=1.0)
    r_max: float = 40.0
    v_max: float = 240.0
    du: float = 0.02
    dv: float = 0.02
    data: InitialDataSpec = InitialDataSpec(0.05, 1.0, 0.5)
    nl: NonlinearitySpec = NonlinearitySpec(kind=Kind.NULL_FORM)
    diag: DiagnosticsConfig = DiagnosticsConfig()
    r_split: float = 2.5
    bin_width: float = 1.0
    probes: tuple = (10.0, 20.0, 50.0, 100.0, 200.0)
    out_dir: str = "out"

    def grid(self) -> GridSpec:
        return GridSpec.for_domain(self.params, self.r_max, self.v_max,
                                   self.du, self.dv)

    def expects_blowup(self) -> bool:
        return self.nl.kind == Kind.NONNULL_HORIZON


_SCHEMA = {
    "spacetime": ("mass", "charge"),
    "grid": ("r_max", "v_max", "du", "dv"),
    "data": ("epsilon", "center", "width", "horizon_positive"),
    "nonlinearity": ("kind", "a_profile", "a0", "power", "n",
                     "cutoff_width"),
    "diagnostics": ("eta", "p", "alpha", "r0", "r1", "r_split",
                    "bin_width"),
    "run": ("probes", "out_dir"),
}


def _get(parser, section, key, conv, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        return conv(raw)
    except ConfigError:
        raise
    except (ValueError, KeyError):
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}")


def _to_bool(raw):
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(raw)


def _to_probes(raw):
    vals = [float(tok) for tok in raw.split(",") if tok.strip()]
    if sorted(vals) != vals:
        raise ConfigError(f"[run] probes must be ascending, got {raw!r}")
    if len(set(vals)) != len(vals):
        raise ConfigError(f"[run] probes must be distinct, got {raw!r}")
    return tuple(vals)


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key [{section}] {key}")

    base = RunConfig()
    try:
        params = SpacetimeParams(
            mass=_get(parser, "spacetime", "mass", float, 1.0),
            charge=_get(parser, "spacetime", "charge", float, 1.0))
    except ValueError as exc:
        raise ConfigError(f"[spacetime]: {exc}") from exc
    try:
        data = InitialDataSpec(
            epsilon=_get(parser, "data", "epsilon", float,
                         base.data.epsilon),
            center=_get(parser, "data", "center", float, base.data.center),
            width=_get(parser, "data", "width", float, base.data.width),
            horizon_positive=_get(parser, "data", "horizon_positive",
                                  _to_bool, False))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[data]: {exc}") from exc
    try:
        nl = NonlinearitySpec(
            kind=_get(parser, "nonlinearity", "kind",
                      lambda s: _KIND_NAMES[s.strip().lower()],
                      Kind.NULL_FORM),
            a_profile=_get(parser, "nonlinearity", "a_profile",
                           lambda s: _PROFILE_NAMES[s.strip().lower()],
                           AProfile.CONSTANT),
            a0=_get(parser, "nonlinearity", "a0", float, 1.0),
            power_l=_get(parser, "nonlinearity", "power", int, 6),
            n=_get(parser, "nonlinearity", "n", int, 2),
            cutoff_width=_get(parser, "nonlinearity", "cutoff_width",
                              float, 1.0))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[nonlinearity]: {exc}") from exc
    try:
        diag = DiagnosticsConfig(
            eta=_get(parser, "diagnostics", "eta", float, base.diag.eta),
            p=_get(parser, "diagnostics", "p", float, base.diag.p),
            alpha=_get(parser, "diagnostics", "alpha", float,
                       base.diag.alpha),
            r0=_get(parser, "diagnostics", "r0", float, base.diag.r0),
            r1=_get(parser, "diagnostics", "r1", float, base.diag.r1))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[diagnostics]: {exc}") from exc

    cfg = RunConfig(
        params=params,
        r_max=_get(parser, "grid", "r_max", float, base.r_max),
        v_max=_get(parser, "grid", "v_max", float, base.v_max),
        du=_get(parser, "grid", "du", float, base.du),
        dv=_get(parser, "grid", "dv", float, base.dv),
        data=data, nl=nl, diag=diag,
        r_split=_get(parser, "diagnostics", "r_split", float, base.r_split),
        bin_width=_get(parser, "diagnostics", "bin_width", float,
                       base.bin_width),
        probes=_get(parser, "run", "probes", _to_probes, base.probes),
        out_dir=_get(parser, "run", "out_dir", str, base.out_dir))
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    for name, val in (("r_max", cfg.r_max), ("v_max", cfg.v_max),
                      ("du", cfg.du), ("dv", cfg.dv),
                      ("bin_width", cfg.bin_width)):
        if not val > 0.0:
            raise ConfigError(f"[grid] {name} must be positive, got {val}")
    if cfg.r_max <= cfg.params.r_plus:
        raise ConfigError(
            f"[grid] r_max={cfg.r_max} must exceed the horizon radius "
            f"{cfg.params.r_plus}")
    if not cfg.params.r_plus < cfg.r_split < cfg.r_max:
        raise ConfigError(
            f"[diagnostics] r_split={cfg.r_split} outside "
            f"(r_plus, r_max)")
    try:
        cfg.diag.check_radii(cfg.params)
    except ValueError as exc:
        raise ConfigError(f"[diagnostics]: {exc}") from exc
    if any(t < 0.0 for t in cfg.probes):
        raise ConfigError("[run] probes must be >= 0")


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


_KIND_TO_NAME = {v: k for k, v in _KIND_NAMES.items()}
_PROFILE_TO_NAME = {v: k for k, v in _PROFILE_NAMES.items()}


def serialize_config(cfg: RunConfig) -> str:
    probes = ", ".join(repr(t) for t in cfg.probes)
    return (
        "[spacetime]\n"
        f"mass = {cfg.params.mass!r}\n"
        f"charge = {cfg.params.charge!r}\n"
        "\n[grid]\n"
        f"r_max = {cfg.r_max!r}\n"
        f"v_max = {cfg.v_max!r}\n"
        f"du = {cfg.du!r}\n"
        f"dv = {cfg.dv!r}\n"
        "\n[data]\n"
        f"epsilon = {cfg.data.epsilon!r}\n"
        f"center = {cfg.data.center!r}\n"
        f"width = {cfg.data.width!r}\n"
        f"horizon_positive = {str(cfg.data.horizon_positive).lower()}\n"
        "\n[nonlinearity]\n"
        f"kind = {_KIND_TO_NAME[cfg.nl.kind]}\n"
        f"a_profile = {_PROFILE_TO_NAME[cfg.nl.a_profile]}\n"
        f"a0 = {cfg.nl.a0!r}\n"
        f"power = {cfg.nl.power_l}\n"
        f"n = {cfg.nl.n}\n"
        f"cutoff_width = {cfg.nl.cutoff_width!r}\n"
        "\n[diagnostics]\n"
        f"eta = {cfg.diag.eta!r}\n"
        f"p = {cfg.diag.p!r}\n"
        f"alpha = {cfg.diag.alpha!r}\n"
        f"r0 = {cfg.diag.r0!r}\n"
        f"r1 = {cfg.diag.r1!r}\n"
        f"r_split = {cfg.r_split!r}\n"
        f"bin_width = {cfg.bin_width!r}\n"
        "\n[run]\n"
        f"probes = {probes}\n"
        f"out_dir = {cfg.out_dir}\n")
