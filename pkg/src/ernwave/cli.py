"""Command line front end.

Subcommands: run (one evolution, CSV + JSON artifacts), sweep (epsilon
or resolution fan-out with a scaling summary), convergence (point-probe
resolution ladder), nirenberg (dual-route oracle ladder), report
(pass/fail table from existing artifacts).

Exit codes: 0 ok, 1 config or artifact error, 2 blow-up in a run where
none was expected, 3 failed criteria under report --strict.  All output
files are deterministic: identical config gives byte-identical bytes.
"""

import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import analysis, diagnostics, horizon
from .config import (ConfigError, _KIND_TO_NAME, _PROFILE_TO_NAME,
                     _to_probes, _validate, load_config)
from .evolution import GridSpec, evolve
from .nonlinearity import Kind


class ArtifactError(ValueError):
    """Malformed or internally inconsistent artifact file."""


def _fail(msg: str, code: int):
    click.echo(msg, err=True)
    sys.exit(code)


def _load_cfg(path, out, probes):
    try:
        cfg = load_config(path)
        if probes is not None:
            cfg = dataclasses.replace(cfg, probes=_to_probes(probes))
        if out is not None:
            cfg = dataclasses.replace(cfg, out_dir=out)
        _validate(cfg)
    except ConfigError as exc:
        _fail(f"config error: {exc}", 1)
    return cfg


def _execute(cfg, point_probes=()):
    g = cfg.grid()
    return evolve(cfg.params, g, cfg.data, cfg.nl, probes=cfg.probes,
                  r_split=cfg.r_split, eta=cfg.diag.eta,
                  alpha=cfg.diag.alpha, bin_width=cfg.bin_width,
                  point_probes=point_probes)


# ---------------------------------------------------------------- artifacts

def _g17(x) -> str:
    # ladder comparisons need full precision; %.17g round-trips doubles
    return "%.17g" % float(x)


def _write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (int, np.integer)):
        return int(x)
    return x


HORIZON_COLUMNS = "tau,psi_h,Tpsi_h,Ypsi_h,Y2psi_h,H,H_drift"
SLICE_COLUMNS = ("tau,t_flux,n_flux,p_flux,rp_energy_p1,hardy_lhs,"
                 "hardy_rhs,sup_psi,sup_Tpsi,sup_Ypsi,A1_norm")


def _write_horizon_csv(path, result):
    try:
        ser = horizon.horizon_series(result)
    except ValueError:
        ser = None
    with open(path, "w", newline="\n") as fh:
        fh.write(HORIZON_COLUMNS + "\n")
        if ser is None:
            return None
        drift = np.abs(ser.H - ser.H[0])
        for k in range(ser.tau.size):
            fh.write(",".join(_g17(x) for x in (
                ser.tau[k], ser.psi[k], ser.T_psi[k], ser.Y_psi[k],
                ser.Y2_psi[k], ser.H[k], drift[k])) + "\n")
    return ser


def _write_slices_csv(path, result, cfg):
    """Rows for every non-partial probe; returns (partial labels, raw A1
    per probe).  A1_norm carries the decay quotient (1+tau)^(2-alpha)/E0;
    the raw source norm goes to run_meta for scaling sweeps."""
    al = cfg.diag.alpha
    partial, a1_raw, a1_norm, rows, sups = [], {}, {}, [], []
    for tau in cfg.probes:
        sd = diagnostics.slice_diagnostics(result, tau, cfg.diag)
        # partial slices still carry a meaningful sup over the resolved
        # near-horizon points, so keep them for the late-time trend
        sups.append((float(tau), sd.sup_Tpsi, sd.sup_Ypsi))
        if sd.partial:
            partial.append(float(tau))
            continue
        q = (sd.F_l2_inner * (1.0 + tau) ** (2.0 - al) / result.e0
             if result.e0 > 0.0 else 0.0)
        a1_raw["%g" % tau] = sd.F_l2_inner
        a1_norm["%g" % tau] = q
        rows.append((tau, sd.t_flux, sd.n_flux, sd.p_flux, sd.rp_energy,
                     sd.hardy_lhs, sd.hardy_rhs, sd.sup_psi, sd.sup_Tpsi,
                     sd.sup_Ypsi, q))
    with open(path, "w", newline="\n") as fh:
        fh.write(SLICE_COLUMNS + "\n")
        for row in rows:
            fh.write(",".join(_g17(x) for x in row) + "\n")
    return partial, a1_raw, a1_norm, sups


def _sup_trend(bins, sups):
    """Whole-grid maxima of |T psi|, |Y psi| from the per-cell
    accumulators, plus an early/late split over the probe slices.

    The split intentionally keys on slice sups rather than t*-bin
    windows: on extremal backgrounds a fixed-du grid stops populating
    late bins once the near-horizon columns escape outward, which would
    make a bin-windowed late max vacuously zero."""
    out = {"sup_T_global": float(bins.sup_T.max(initial=0.0)),
           "sup_Y_global": float(bins.sup_Y.max(initial=0.0))}
    half = len(sups) // 2
    if half == 0:
        z = out["sup_T_global"], out["sup_Y_global"]
        out.update(sup_T_early=z[0], sup_T_late=z[0],
                   sup_Y_early=z[1], sup_Y_late=z[1])
    else:
        out.update(sup_T_early=max(s[1] for s in sups[:half]),
                   sup_T_late=max(s[1] for s in sups[half:]),
                   sup_Y_early=max(s[2] for s in sups[:half]),
                   sup_Y_late=max(s[2] for s in sups[half:]))
    return out


def _config_dict(cfg):
    return {
        "spacetime": {"mass": cfg.params.mass, "charge": cfg.params.charge},
        "grid": {"r_max": cfg.r_max, "v_max": cfg.v_max,
                 "du": cfg.du, "dv": cfg.dv},
        "data": {"epsilon": cfg.data.epsilon, "center": cfg.data.center,
                 "width": cfg.data.width,
                 "horizon_positive": cfg.data.horizon_positive},
        "nonlinearity": {"kind": _KIND_TO_NAME[cfg.nl.kind],
                         "a_profile": _PROFILE_TO_NAME[cfg.nl.a_profile],
                         "a0": cfg.nl.a0, "power": cfg.nl.power_l,
                         "n": cfg.nl.n, "cutoff_width": cfg.nl.cutoff_width},
        "diagnostics": {"eta": cfg.diag.eta, "p": cfg.diag.p,
                        "alpha": cfg.diag.alpha, "r0": cfg.diag.r0,
                        "r1": cfg.diag.r1, "r_split": cfg.r_split,
                        "bin_width": cfg.bin_width},
        "run": {"probes": list(cfg.probes)},
    }


def _run_meta(cfg, result, partial, a1_raw, a1_norm, sups, ser):
    meta = {"config": _config_dict(cfg),
            "status": result.status,
            "rows_done": result.rows_done,
            "e0": result.e0,
            "zeta0": result.zeta0,
            "partial_probes": partial,
            "a1_raw_by_probe": a1_raw,
            "a1_norm_by_probe": a1_norm,
            "blowup": (None if result.blowup is None else
                       {"u": result.blowup.u, "v": result.blowup.v})}
    if ser is not None:
        drift, drift_norm = horizon.conservation_drift(ser)
        meta.update(h0=float(ser.H[0]), h_drift_max=drift,
                    h_drift_per_eps_sq=drift_norm)
    meta.update(_sup_trend(result.bins, sups))
    b = result.bins
    end = b.t0 + b.width * b.morawetz.size
    mid = b.width * math.floor(end / (2.0 * b.width))
    if b.t0 <= 0.0 < mid < end:
        first = diagnostics.morawetz_bulk(result, 0.0, mid)
        second = diagnostics.morawetz_bulk(result, mid, end)
        meta["morawetz"] = {"mid": mid, "end": end, "first": first,
                            "second": second,
                            "total": diagnostics.morawetz_bulk(
                                result, 0.0, end)}
    if cfg.nl.kind == Kind.NONNULL_HORIZON:
        try:
            rep = horizon.blowup_report(result)
        except ValueError:
            # aborted before enough horizon samples to certify anything
            meta["blowup_report"] = None
        else:
            meta["blowup_report"] = {
                "n": rep.n, "eta0": rep.eta0, "c_n": rep.c_n,
                "tau_star": rep.tau_star, "tau_blow": rep.tau_blow,
                "lower_envelope_ok": rep.lower_envelope_ok}
    return meta


def _run_and_write(cfg, out_dir, quiet):
    """Execute one config and write its three artifacts; returns
    (exit code, meta dict)."""
    result = _execute(cfg)
    os.makedirs(out_dir, exist_ok=True)
    partial, a1_raw, a1_norm, sups = _write_slices_csv(
        os.path.join(out_dir, "slices.csv"), result, cfg)
    ser = _write_horizon_csv(os.path.join(out_dir, "horizon.csv"), result)
    meta = _run_meta(cfg, result, partial, a1_raw, a1_norm, sups, ser)
    _write_json(os.path.join(out_dir, "run_meta.json"), meta)
    if not quiet:
        click.echo(f"{out_dir}: status={result.status} "
                   f"rows={result.rows_done}/{result.grid.n_v}")
    if result.status != 0 and not cfg.expects_blowup():
        if not quiet:
            click.echo(f"{out_dir}: unexpected blow-up", err=True)
        return 2, meta
    return 0, meta


# ------------------------------------------------------------------ group

@click.group()
def main():
    """Characteristic evolution and horizon diagnostics for semilinear
    waves on extremal and subextremal Reissner-Nordstrom exteriors."""


@main.command("run")
@click.option("--config", "config_path", required=True,
              type=click.Path(), help="INI run configuration.")
@click.option("--out", default=None, help="Override [run] out_dir.")
@click.option("--probes", default=None,
              help='Override slice labels, e.g. "10,20,50,100,200".')
@click.option("--quiet", is_flag=True)
def cmd_run(config_path, out, probes, quiet):
    """Evolve one configuration and write horizon.csv, slices.csv,
    run_meta.json."""
    cfg = _load_cfg(config_path, out, probes)
    code, _ = _run_and_write(cfg, cfg.out_dir, quiet)
    sys.exit(code)


def _parse_values(raw, flag):
    try:
        vals = [float(t) for t in raw.split(",") if t.strip()]
        if not vals:
            raise ValueError("no values")
        if any(not v > 0.0 for v in vals):
            raise ValueError("values must be positive")
    except ValueError as exc:
        _fail(f"config error: {flag}: {exc}", 1)
    return vals


def _loglog_slope(xs, ys):
    pairs = [(x, y) for x, y in zip(xs, ys) if y > 0.0]
    if len(pairs) < 2:
        return None
    lx = np.log([p[0] for p in pairs])
    ly = np.log([p[1] for p in pairs])
    return float(np.polyfit(lx, ly, 1)[0])


@main.command("sweep")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--axis", required=True,
              type=click.Choice(["epsilon", "resolution"]))
@click.option("--values", required=True,
              help='Comma-separated axis values, e.g. "0.025,0.05,0.1".')
@click.option("--out", default=None)
@click.option("--quiet", is_flag=True)
def cmd_sweep(config_path, axis, values, out, quiet):
    """Run the base config once per axis value (parallel, one directory
    per run) and write sweep_summary.json with the scaling slopes."""
    cfg = _load_cfg(config_path, out, None)
    vals = _parse_values(values, "--values")
    subs = []
    for v in vals:
        if axis == "epsilon":
            sub = dataclasses.replace(
                cfg, data=dataclasses.replace(cfg.data, epsilon=v),
                out_dir=os.path.join(cfg.out_dir, "eps_%g" % v))
        else:
            sub = dataclasses.replace(
                cfg, du=v, dv=v,
                out_dir=os.path.join(cfg.out_dir, "h_%g" % v))
        try:
            _validate(sub)
        except ConfigError as exc:
            _fail(f"config error: {exc}", 1)
        subs.append(sub)

    os.makedirs(cfg.out_dir, exist_ok=True)
    workers = min(len(subs), max(os.cpu_count() or 1, 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(
            lambda s: _run_and_write(s, s.out_dir, True), subs))

    runs = []
    for v, sub, (code, meta) in zip(vals, subs, outcomes):
        runs.append({
            "value": v,
            "dir": os.path.basename(sub.out_dir),
            "status": meta["status"],
            "exit_code": code,
            "h0": meta.get("h0"),
            "drift": meta.get("h_drift_max"),
            "sup_T": meta.get("sup_T_global"),
            "sup_Y": meta.get("sup_Y_global"),
            "sup_T_early": meta.get("sup_T_early"),
            "sup_T_late": meta.get("sup_T_late"),
            "sup_Y_early": meta.get("sup_Y_early"),
            "sup_Y_late": meta.get("sup_Y_late"),
            "a1_at_50": meta["a1_raw_by_probe"].get("50"),
        })
    summary = {"axis": axis, "values": vals,
               "kind": _KIND_TO_NAME[cfg.nl.kind], "runs": runs}
    drifts = [r["drift"] for r in runs]
    if axis == "epsilon":
        summary["drift_slope"] = _loglog_slope(
            vals, [d if d is not None else 0.0 for d in drifts])
        summary["a1_slope"] = _loglog_slope(
            vals, [r["a1_at_50"] if r["a1_at_50"] is not None else 0.0
                   for r in runs])
    else:
        orders = []
        by_h = sorted(zip(vals, drifts), reverse=True)
        for (hc, dc), (hf, df) in zip(by_h, by_h[1:]):
            if dc and df and abs(hc / hf - 2.0) < 1e-9:
                orders.append(math.log2(dc / df))
            else:
                orders.append(None)
        summary["drift_orders"] = orders
    _write_json(os.path.join(cfg.out_dir, "sweep_summary.json"), summary)
    if not quiet:
        for r in runs:
            click.echo(f"{r['dir']}: status={r['status']}")
    sys.exit(max(code for code, _ in outcomes))


# u-fractions are taken within the data's influenced range [center -
# width, U]: the domain of dependence is exact, so a probe at smaller u
# would difference to literal zero at every resolution
CONVERGENCE_FRACTIONS = ((0.3, 0.25), (0.5, 0.5), (0.6, 0.75),
                         (0.75, 0.5), (0.9, 0.65))


@main.command("convergence")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--steps", default="0.04,0.02,0.01",
              help="Grid steps du = dv, halving, coarse to fine.")
@click.option("--out", default=None)
@click.option("--quiet", is_flag=True)
def cmd_convergence(config_path, steps, out, quiet):
    """Three-point self-convergence ladder at five fixed interior
    probes; writes convergence.json."""
    cfg = _load_cfg(config_path, out, None)
    hs = _parse_values(steps, "--steps")
    if len(hs) < 3:
        _fail("config error: --steps: need at least three grid steps", 1)
    for a, b in zip(hs, hs[1:]):
        if abs(a / b - 2.0) > 1e-9:
            _fail(f"config error: --steps: steps must halve, got {hs}", 1)

    g0 = GridSpec.for_domain(cfg.params, cfg.r_max, cfg.v_max, hs[0], hs[0])
    strip = g0.n_u * hs[0]
    lo = min(max(0.0, cfg.data.center - cfg.data.width), 0.95 * strip)
    base_idx = [(min(max(1, round((lo + fu * (strip - lo)) / hs[0])), g0.n_u),
                 min(max(1, round(fv * g0.n_v)), g0.n_v))
                for fu, fv in CONVERGENCE_FRACTIONS]
    probes_uv = [[i * hs[0], j * hs[0]] for i, j in base_idx]
    values, code = [], 0
    for h in hs:
        ratio = int(round(hs[0] / h))
        sub = dataclasses.replace(cfg, du=h, dv=h)
        res = _execute(sub, point_probes=[(i * ratio, j * ratio)
                                          for i, j in base_idx])
        if res.status != 0 and not cfg.expects_blowup():
            code = 2
        values.append([float(x) for x in res.point_values])
        if not quiet:
            click.echo(f"h={h:g}: status={res.status}")
    orders = []
    for k in range(len(base_idx)):
        orders.append(analysis.convergence_order(
            values[-3][k], values[-2][k], values[-1][k]))
    finite = [o for o in orders if np.isfinite(o)]
    out_doc = {"steps": hs, "probes_uv": probes_uv, "values": values,
               "orders": orders,
               "order_median": float(np.median(finite)) if finite else None,
               }
    os.makedirs(cfg.out_dir, exist_ok=True)
    _write_json(os.path.join(cfg.out_dir, "convergence.json"), out_doc)
    if not quiet:
        click.echo("orders: " + ", ".join("%.3f" % o for o in orders))
    sys.exit(code)


@main.command("nirenberg")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--steps", default="0.04,0.02,0.01",
              help="Grid steps du = dv, halving, coarse to fine.")
@click.option("--out", default=None)
@click.option("--quiet", is_flag=True)
def cmd_nirenberg(config_path, steps, out, quiet):
    """Exponential-transformation oracle ladder (uses the config's data
    and domain; both routes store full fields, so keep the domain small);
    writes nirenberg.json."""
    cfg = _load_cfg(config_path, out, None)
    hs = _parse_values(steps, "--steps")
    try:
        errs, order = analysis.nirenberg_ladder(
            cfg.params, cfg.r_max, cfg.v_max, hs, cfg.data)
    except ValueError as exc:
        _fail(f"nirenberg error: {exc}", 1)
    os.makedirs(cfg.out_dir, exist_ok=True)
    _write_json(os.path.join(cfg.out_dir, "nirenberg.json"),
                {"steps": hs, "errors": errs, "order": order})
    if not quiet:
        click.echo("errors: " + ", ".join("%.3e" % e for e in errs)
                   + f", order {order:.3f}")
    sys.exit(0)


# ------------------------------------------------------------------ report

def _read_json(path):
    if not os.path.exists(path):
        return None
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ArtifactError(f"{path}: {exc}") from exc


def _read_csv(path):
    if not os.path.exists(path):
        return None
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ArtifactError(f"{path}: empty file")
    names = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        toks = ln.split(",")
        if len(toks) != len(names):
            raise ArtifactError(f"{path}: ragged row {ln!r}")
        try:
            rows.append([float(t) for t in toks])
        except ValueError:
            raise ArtifactError(f"{path}: non-numeric row {ln!r}")
    tbl = {name: np.asarray([row[i] for row in rows])
           for i, name in enumerate(names)}
    if "tau" in tbl and tbl["tau"].size > 1:
        if not np.all(np.diff(tbl["tau"]) > 0.0):
            raise ArtifactError(
                f"{path}: tau column must be strictly increasing")
    return tbl


def _at_tau(tbl, col, tau, tol):
    k = int(np.argmin(np.abs(tbl["tau"] - tau)))
    if abs(tbl["tau"][k] - tau) > tol:
        return None
    return float(tbl[col][k])


def _crit(ok: bool, **details):
    return {"status": "pass" if ok else "fail", **details}


NOT_RUN = {"status": "not run"}


def _eval_criteria(meta, horizon_tbl, slices_tbl, sweep, conv, nire):
    crit = {}
    kind = (meta or {}).get("config", {}).get("nonlinearity", {}).get("kind")
    charge = (meta or {}).get("config", {}).get("spacetime", {}).get("charge")
    mass = (meta or {}).get("config", {}).get("spacetime", {}).get("mass")

    # 1: linear conservation under refinement
    if (sweep and sweep.get("axis") == "resolution"
            and sweep.get("kind") == "zero" and len(sweep["runs"]) >= 2):
        runs = sorted(sweep["runs"], key=lambda r: -r["value"])
        drifts = [r["drift"] for r in runs]
        h0 = runs[-1]["h0"]
        if any(d is None for d in drifts) or h0 in (None, 0.0):
            crit["c01_linear_conservation"] = NOT_RUN
        else:
            ratios = [dc / df for dc, df in zip(drifts, drifts[1:]) if df > 0]
            ok = (all(3.0 <= q <= 5.0 for q in ratios) and len(ratios) > 0
                  and drifts[-1] <= 1e-4 * abs(h0))
            crit["c01_linear_conservation"] = _crit(
                ok, ratios=ratios, finest_drift=drifts[-1], h0=h0)
    else:
        crit["c01_linear_conservation"] = NOT_RUN

    # 2: drift scales like epsilon^2
    if (sweep and sweep.get("axis") == "epsilon"
            and sweep.get("drift_slope") is not None):
        slope = sweep["drift_slope"]
        crit["c02_drift_eps_scaling"] = _crit(
            abs(slope - 2.0) <= 0.4, slope=slope,
            note="raw drift at the run resolution, not Richardson-isolated")
    else:
        crit["c02_drift_eps_scaling"] = NOT_RUN

    # 3: derivative bounds linear in epsilon, no late-time growth
    if (sweep and sweep.get("axis") == "epsilon"
            and len(sweep["runs"]) >= 2
            and all(r.get("sup_T") for r in sweep["runs"])):
        ct = [r["sup_T"] / r["value"] for r in sweep["runs"]]
        cy = [r["sup_Y"] / r["value"] for r in sweep["runs"]]
        stable = all(
            max(cs) <= 1.25 * (sum(cs) / len(cs))
            and min(cs) >= 0.75 * (sum(cs) / len(cs)) for cs in (ct, cy))
        trend = all(
            r["sup_T_late"] <= 1.2 * r["sup_T_early"]
            and r["sup_Y_late"] <= 1.2 * r["sup_Y_early"]
            for r in sweep["runs"])
        crit["c03_derivative_bounds"] = _crit(
            stable and trend, c_T=ct, c_Y=cy, no_growth=trend)
    else:
        crit["c03_derivative_bounds"] = NOT_RUN

    # 4: pointwise decay exponent from slice sups
    if slices_tbl is not None and slices_tbl["tau"].size:
        m = (slices_tbl["tau"] >= 50.0) & (slices_tbl["tau"] <= 200.0)
        taus, sups = slices_tbl["tau"][m], slices_tbl["sup_psi"][m]
        if taus.size >= 3 and np.all(sups > 0.0):
            expo = -float(np.polyfit(np.log1p(taus), np.log(sups), 1)[0])
            crit["c04_psi_decay"] = _crit(expo >= 0.55, exponent=expo)
        else:
            crit["c04_psi_decay"] = NOT_RUN
    else:
        crit["c04_psi_decay"] = NOT_RUN

    # 5: second transversal derivative grows (positivity data)
    hp = (meta or {}).get("config", {}).get("data", {}).get(
        "horizon_positive", False)
    if (horizon_tbl is not None and kind == "null_form" and hp
            and horizon_tbl["tau"].size and horizon_tbl["tau"][-1] >= 200.0):
        tb, y2 = horizon_tbl["tau"], np.abs(horizon_tbl["Y2psi_h"])
        v100 = _at_tau(horizon_tbl, "Y2psi_h", 100.0, 1.0)
        v200 = _at_tau(horizon_tbl, "Y2psi_h", 200.0, 1.0)
        m = (tb >= 100.0) & (tb <= 200.0)
        if v100 is None or v200 is None or m.sum() < 3:
            crit["c05_y2_growth"] = NOT_RUN
        else:
            slope = float(np.polyfit(tb[m], y2[m], 1)[0])
            ok = slope > 0.0 and abs(v200) > 2.0 * abs(v100)
            crit["c05_y2_growth"] = _crit(
                ok, slope=slope, at_100=abs(v100), at_200=abs(v200))
    else:
        crit["c05_y2_growth"] = NOT_RUN

    # 6: non-null blow-up beats the comparison ODE
    rep = (meta or {}).get("blowup_report")
    if rep:
        ok = (rep["tau_blow"] is not None and rep["tau_star"] is not None
              and rep["tau_blow"] <= 1.1 * rep["tau_star"]
              and rep["lower_envelope_ok"])
        crit["c06_nonnull_blowup"] = _crit(
            ok, tau_blow=rep["tau_blow"], tau_star=rep["tau_star"],
            envelope=rep["lower_envelope_ok"],
            note="null-form partner run not covered by this directory")
    else:
        crit["c06_nonnull_blowup"] = NOT_RUN

    # 7: energy monotonicity, Hardy stability, Morawetz additivity
    mor = (meta or {}).get("morawetz")
    if (slices_tbl is not None and kind == "zero"
            and slices_tbl["tau"].size >= 2 and mor):
        tf = slices_tbl["t_flux"]
        mono = bool(np.all(tf[1:] <= tf[:-1] * (1.0 + 1e-3)))
        rhs = slices_tbl["hardy_rhs"]
        lhs = slices_tbl["hardy_lhs"]
        good = rhs > 0.0
        if good.sum() >= 2:
            ratios = lhs[good] / rhs[good]
            hardy = bool(np.max(ratios) <= 4.0 * np.median(ratios))
        else:
            hardy = True
        add_err = abs(mor["first"] + mor["second"] - mor["total"])
        additive = add_err <= 1e-3 * max(mor["total"], 1e-300)
        crit["c07_energy_structure"] = _crit(
            mono and hardy and additive, t_flux_monotone=mono,
            hardy_stable=hardy, morawetz_rel_err=(
                add_err / mor["total"] if mor["total"] else 0.0))
    else:
        crit["c07_energy_structure"] = NOT_RUN

    # 8: source norm scaling and bounded decay quotient
    parts = {}
    if (sweep and sweep.get("axis") == "epsilon"
            and sweep.get("a1_slope") is not None):
        parts["a1_slope"] = sweep["a1_slope"]
        parts["slope_ok"] = abs(sweep["a1_slope"] - 4.0) <= 0.8
    if (slices_tbl is not None and kind not in (None, "zero")
            and slices_tbl["tau"].size):
        t, q = slices_tbl["tau"], slices_tbl["A1_norm"]
        early = q[(t >= 10.0) & (t < 100.0)]
        late = q[(t >= 100.0) & (t <= 200.0)]
        if early.size and late.size:
            parts["quotient_ok"] = bool(
                np.max(late) <= 1.25 * max(np.max(early), 1e-300))
            parts["quotient_early_max"] = float(np.max(early))
            parts["quotient_late_max"] = float(np.max(late))
    checks = [v for k, v in parts.items() if k.endswith("_ok")]
    if checks:
        crit["c08_bootstrap_scaling"] = _crit(all(checks), **parts)
    else:
        crit["c08_bootstrap_scaling"] = NOT_RUN

    # 9: horizon derivative ratio, by background
    if (horizon_tbl is not None and kind == "zero" and charge is not None
            and horizon_tbl["tau"].size and horizon_tbl["tau"][-1] >= 200.0):
        y50 = _at_tau(horizon_tbl, "Ypsi_h", 50.0, 1.0)
        y200 = _at_tau(horizon_tbl, "Ypsi_h", 200.0, 1.0)
        if y50 in (None, 0.0) or y200 is None:
            crit["c09_horizon_memory"] = NOT_RUN
        else:
            ratio = abs(y200) / abs(y50)
            extremal = abs(charge) == mass
            ok = ratio > 0.8 if extremal else ratio < 0.5
            crit["c09_horizon_memory"] = _crit(
                ok, ratio=ratio,
                background="extremal" if extremal else "subextremal")
    else:
        crit["c09_horizon_memory"] = NOT_RUN

    # 10: transformation oracle
    if nire and nire.get("errors"):
        ok = (nire["order"] is not None
              and abs(nire["order"] - 2.0) <= 0.2
              and nire["errors"][-1] <= 1e-4)
        crit["c10_nirenberg_oracle"] = _crit(
            ok, order=nire["order"], finest_error=nire["errors"][-1])
    else:
        crit["c10_nirenberg_oracle"] = NOT_RUN

    # 11: self-convergence order
    if conv and conv.get("orders"):
        med = conv.get("order_median")
        ok = med is not None and 1.8 <= med <= 2.2
        crit["c11_self_convergence"] = _crit(
            ok, order_median=med, orders=conv["orders"])
    else:
        crit["c11_self_convergence"] = NOT_RUN
    return crit


@main.command("report")
@click.option("--dir", "art_dir", required=True, type=click.Path(),
              help="Directory holding run/sweep/ladder artifacts.")
@click.option("--strict", is_flag=True,
              help="Exit 3 if any covered criterion fails.")
@click.option("--quiet", is_flag=True)
def cmd_report(art_dir, strict, quiet):
    """Evaluate whichever acceptance criteria the artifacts in --dir
    cover and write report.json; inputs are never modified."""
    def j(name):
        return os.path.join(art_dir, name)
    try:
        meta = _read_json(j("run_meta.json"))
        horizon_tbl = _read_csv(j("horizon.csv"))
        slices_tbl = _read_csv(j("slices.csv"))
        sweep = _read_json(j("sweep_summary.json"))
        conv = _read_json(j("convergence.json"))
        nire = _read_json(j("nirenberg.json"))
    except ArtifactError as exc:
        _fail(f"artifact validation error: {exc}", 1)
    crit = _eval_criteria(meta, horizon_tbl, slices_tbl, sweep, conv, nire)
    counts = {"pass": 0, "fail": 0, "not run": 0}
    for entry in crit.values():
        counts[entry["status"]] += 1
    doc = {"criteria": crit, "n_pass": counts["pass"],
           "n_fail": counts["fail"], "n_not_run": counts["not run"]}
    _write_json(j("report.json"), doc)
    if not quiet:
        for name in sorted(crit):
            click.echo(f"{name}: {crit[name]['status']}")
        click.echo(f"{counts['pass']} pass, {counts['fail']} fail, "
                   f"{counts['not run']} not run")
    if strict and counts["fail"] > 0:
        sys.exit(3)
    sys.exit(0)


if __name__ == "__main__":
    main()
