"""Command-line front end.

Every subcommand resolves a flat ``key = value`` configuration from
four layers (schema defaults, then a --config file, then SHIMOR_OPT_*
environment variables, then command-line flags), rejects unknown keys,
and writes CSV whose comment header carries the tool version, the
sha256 hash of the resolved configuration, and the configuration
itself.  Identical resolved configurations therefore produce
byte-identical outputs.

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
Diagnostics go to stderr; data only ever goes to the output files.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__, chartscan, dynsys, kneading, lyap, modelmap, \
    poincare, pseudohyp
from .errors import ConfigError, ConvergenceError, DomainError, EscapeError
from .integrate import DEFAULT_CONFIG, SectionSpec, integrate as _integrate, \
    separatrix_seed

ENV_PREFIX = "SHIMOR_OPT_"

# ---------------------------------------------------------------------------
# configuration plumbing


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _coerce(raw: str, typ, key: str):
    raw = raw.strip()
    try:
        if typ is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return typ(raw)
    except ValueError:
        raise ConfigError(
            f"key {key!r}: cannot parse {raw!r} as {typ.__name__}") from None


def _parse_config_file(path: str) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    pairs = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            pairs[key.strip()] = val.strip()
    return pairs


def _resolve(schema: dict, config_path: str | None,
             cli_pairs: dict) -> tuple[dict, set]:
    """Merge defaults <- file <- environment <- CLI; reject unknowns."""
    cfg = {k: d for k, (_t, d, _h) in schema.items()}
    user = set()

    def apply(source: dict, origin: str):
        for key, raw in source.items():
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} ({origin}); "
                                  f"known: {', '.join(sorted(schema))}")
            cfg[key] = _coerce(raw, schema[key][0], key)
            user.add(key)

    if config_path:
        apply(_parse_config_file(config_path), f"config file {config_path}")
    # key spelled exactly as in the schema (B and b are distinct keys)
    env = {k: os.environ[ENV_PREFIX + k] for k in schema
           if ENV_PREFIX + k in os.environ}
    apply(env, "environment")
    apply(cli_pairs, "command line")
    return cfg, user


def _config_hash(sub: str, cfg: dict) -> str:
    blob = sub + "\n" + "\n".join(
        f"{k} = {_fmt(v)}" for k, v in sorted(cfg.items()))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _header_lines(sub: str, cfg: dict) -> list[str]:
    lines = [f"shimor {__version__} {sub}",
             f"config {_config_hash(sub, cfg)}"]
    lines += [f"{k} = {_fmt(v)}" for k, v in sorted(cfg.items())]
    return lines


def _write(path: str, header: list[str], schema_line: str,
           rows: list[str]) -> None:
    with open(path, "w") as fh:
        for h in header:
            fh.write(f"# {h}\n")
        fh.write(schema_line + "\n")
        for r in rows:
            fh.write(r + "\n")


def _r(x) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# shared key groups

_SYSTEM_KEYS = {
    "system": (str, "sm", "sm | ext_sm | lorenz"),
    "alpha": (float, 0.4, "SM/extended-SM alpha"),
    "lambda": (float, 0.9, "SM/extended-SM lambda"),
    "B": (float, 0.0, "extended-SM cubic coefficient"),
    "sigma": (float, 10.0, "Lorenz sigma"),
    "r": (float, 28.0, "Lorenz r"),
    "b": (float, 8.0 / 3.0, "Lorenz b"),
}

_SEED_KEYS = {
    "seed_mode": (str, "separatrix", "separatrix | state"),
    "branch": (str, "plus", "separatrix branch, plus | minus"),
    "eps": (float, 1e-6, "separatrix seeding distance"),
    "x0": (float, 1.0, "initial x (seed_mode=state)"),
    "y0": (float, 0.0, "initial y (seed_mode=state)"),
    "z0": (float, 0.0, "initial z (seed_mode=state)"),
}

_TOL_KEYS = {
    "rel_tol": (float, DEFAULT_CONFIG.rel_tol, "integrator relative tolerance"),
    "abs_tol": (float, DEFAULT_CONFIG.abs_tol, "integrator absolute tolerance"),
}

_SECTION_KEYS = {
    "section": (str, "plane_z", "plane_z | plane_y0 | z_local_max"),
    "section_value": (float, 1.0, "plane offset for plane_z"),
    "direction": (str, "up", "crossing direction: up | down | both"),
    "predicate": (str, "none", "none | zdot_pos | zdot_neg"),
}

_CLV_KEYS = {
    "T": (float, 1.1e4, "covariant-vector accumulation time"),
    "transient_fwd": (float, 500.0, "forward transient before frames"),
    "transient_bwd": (float, 500.0, "backward transient after frames"),
    "renorm": (float, 0.1, "QR renormalization interval"),
    "frame_mode": (str, "section", "frame sampling: stride | section"),
}


def _params(cfg) -> dynsys.SystemParams:
    s = cfg["system"]
    if s == "sm":
        return dynsys.sm(cfg["alpha"], cfg["lambda"])
    if s == "ext_sm":
        return dynsys.ext_sm(cfg["alpha"], cfg["lambda"], cfg["B"])
    if s == "lorenz":
        return dynsys.lorenz(cfg["b"], cfg["sigma"], cfg["r"])
    raise ConfigError(f"unknown system {cfg['system']!r}")


def _int_cfg(cfg):
    return replace(DEFAULT_CONFIG, rel_tol=cfg["rel_tol"],
                   abs_tol=cfg["abs_tol"])


def _initial_state(p, cfg):
    if cfg["seed_mode"] == "separatrix":
        return separatrix_seed(p, cfg["branch"], cfg["eps"])
    if cfg["seed_mode"] == "state":
        return np.array([cfg["x0"], cfg["y0"], cfg["z0"]])
    raise ConfigError(f"unknown seed_mode {cfg['seed_mode']!r}")


def _section(cfg) -> SectionSpec:
    return SectionSpec(kind=cfg["section"], value=cfg["section_value"],
                       direction=cfg["direction"], predicate=cfg["predicate"])


def _clv_run(p, cfg, s0=None):
    if s0 is None:
        s0 = _initial_state(p, cfg)
    return lyap.covariant_vectors(
        p, s0, T=cfg["T"], transient_fwd=cfg["transient_fwd"],
        transient_bwd=cfg["transient_bwd"], cfg=_int_cfg(cfg),
        frame_mode=cfg["frame_mode"], renorm_interval=cfg["renorm"])


# ---------------------------------------------------------------------------
# subcommand runners (cfg -> (schema_line, rows, trailing header notes))


def _run_simulate(cfg):
    p = _params(cfg)
    tr = _integrate(p, _initial_state(p, cfg), cfg["T"], _int_cfg(cfg),
                    sample_dt=cfg["sample_dt"])
    rows = [f"{_r(t)},{_r(s[0])},{_r(s[1])},{_r(s[2])}"
            for t, s in zip(tr.t, tr.states)]
    return "t,x,y,z", rows, [f"status {tr.status}"]


def _run_spectrum(cfg):
    p = _params(cfg)
    sp = lyap.lyapunov_spectrum(
        p, _initial_state(p, cfg), T=cfg["T"], transient=cfg["transient"],
        renorm_interval=cfg["renorm"], cfg=_int_cfg(cfg))
    L = sp.exponents
    row = (f"{_r(p.alpha)},{_r(p.lam)},{_r(L[0])},{_r(L[1])},{_r(L[2])},"
           f"{_r(sp.T_total)}")
    notes = [f"error_bar {_r(sp.error_bar[0])} {_r(sp.error_bar[1])} "
             f"{_r(sp.error_bar[2])}", f"converged {sp.converged}"]
    return "alpha,lambda,L1,L2,L3,T", [row], notes


def _run_clv(cfg):
    p = _params(cfg)
    run = _clv_run(p, cfg)
    rows = []
    for f in run.frames():
        cells = [f.t, *f.point, *f.V1, *f.V2, *f.V3]
        rows.append(",".join(_r(c) for c in cells))
    return ("t,x,y,z,v1x,v1y,v1z,v2x,v2y,v2z,v3x,v3y,v3z", rows,
            [f"frames {len(rows)} dropped {run.dropped}"])


def _run_angles(cfg):
    p = _params(cfg)
    run = _clv_run(p, cfg)
    st = pseudohyp.angle_statistics(run, pair=cfg["pair"], bins=cfg["bins"])
    rows = [f"{_r(st.bin_edges[i])},{_r(st.bin_edges[i + 1])},{st.histogram[i]}"
            for i in range(len(st.histogram))]
    return ("bin_lo,bin_hi,count", rows,
            [f"beta_min {_r(st.beta_min)}", f"samples {st.sample_count}"])


def _run_continuity(cfg):
    p = _params(cfg)
    run = _clv_run(p, cfg)
    cloud = pseudohyp.continuity_diagram(
        run, subspace=cfg["subspace"], pair_budget=cfg["pair_budget"],
        rng_seed=cfg["seed"])
    rows = [f"{_r(a)},{_r(b)}" for a, b in zip(cloud.rho, cloud.phi)]
    return "rho,phi", rows, [f"diameter {_r(cloud.diameter)}"]


def _run_verdict(cfg):
    p = _params(cfg)
    beta_star = cfg["beta_star"]
    if cfg["beta_preset"]:
        beta_star = pseudohyp.BETA_STAR_PRESETS[cfg["beta_preset"]]
    vc = pseudohyp.VerdictConfig(
        spectrum_T=cfg["spectrum_T"], clv_T=cfg["clv_T"],
        beta_star=beta_star, rng_seed=cfg["seed"])
    v = pseudohyp.verdict(p, vc)
    L = v.exponents if v.exponents is not None else (math.nan,) * 3
    beta = math.nan if v.beta_min is None else v.beta_min
    orient = v.orientability or ""
    row = (f"{_r(p.alpha)},{_r(p.lam)},{_r(L[0])},{_r(L[1])},{_r(L[2])},"
           f"{_r(beta)},{v.verdict},{orient}")
    notes = [f"beta_star {_r(beta_star)}"]
    if v.diagnostic:
        notes.append(f"diagnostic {v.diagnostic}")
    return "alpha,lambda,L1,L2,L3,beta_min,verdict,orientability", [row], notes


def _run_kneading(cfg):
    p = _params(cfg)
    seq = kneading.kneading_sequence(
        p, N=cfg["N"], eps=cfg["eps"], cfg=_int_cfg(cfg),
        branch=cfg["branch"], skip=cfg["skip"], t_max=cfg["t_max"],
        capture_radius=cfg["capture_radius"])
    row = f"{_r(p.alpha)},{_r(p.lam)},{seq.symbols}"
    return ("alpha,lambda,symbols", [row],
            [f"termination {seq.termination}", f"t_end {_r(seq.t_end)}"])


def _run_bisect(cfg):
    p_a = dynsys.sm(cfg["alpha_lo"], cfg["lambda_lo"])
    p_b = dynsys.sm(cfg["alpha_hi"], cfg["lambda_hi"])
    hp = kneading.homoclinic_bisect(
        p_a, p_b, symbol_index=cfg["symbol_index"], tol=cfg["tol"],
        eps=cfg["eps"], cfg=_int_cfg(cfg), t_max=cfg["t_max"])
    row = (f"{_r(hp.params.alpha)},{_r(hp.params.lam)},"
           f"{hp.symbol_index},{hp.iterations}")
    notes = []
    if hp.diagnostic:
        notes.append(f"diagnostic {hp.diagnostic}")
    return "alpha,lambda,symbol_index,iterations", [row], notes


def _run_portrait(cfg):
    p = _params(cfg)
    pt = poincare.section_portrait(
        p, _section(cfg), n_events=cfg["n_events"], cfg=_int_cfg(cfg),
        transient_crossings=cfg["transient_crossings"], t_max=cfg["t_max"])
    rows = [f"{_r(xy[0])},{_r(xy[1])},{d:+d}"
            for xy, d in zip(pt.coords, pt.directions)]
    return "x,y,dir", rows, [f"truncated {pt.truncated}"]


def _run_map1d(cfg):
    p = _params(cfg)
    m = poincare.one_d_map(
        p, _section(cfg), stride=cfg["stride"], folding=cfg["folding"],
        n_pairs=cfg["n_pairs"], cfg=_int_cfg(cfg), side=cfg["side"],
        transient_crossings=cfg["transient_crossings"], t_max=cfg["t_max"])
    rows = [f"{_r(a)},{_r(b)}" for a, b in zip(m.xn, m.xim)]
    notes = [
        f"component_count {poincare.component_count(m)}",
        f"fiber_spread {_r(poincare.fiber_spread(m))}",
        f"turning_points {poincare.branch_turning_points(m)}",
        f"hook_detected {poincare.hook_detected(m)}",
    ]
    return "xn,xim", rows, notes


def _run_modelmap_curves(cfg):
    A, nu = cfg["A"], cfg["nu"]
    kinds = [k.strip() for k in cfg["kinds"].split(",") if k.strip()]
    rows, notes = [], []
    for kind in kinds:
        if kind in modelmap.ANALYTIC_KINDS:
            mu = modelmap.analytic_curve(kind, A, nu)
        elif kind in modelmap.SOLVED_KINDS:
            cp = modelmap.solve_curve(kind, A, nu)
            mu = cp.params.mu
            notes.append(f"residual {kind} {cp.residual:.3e}")
        else:
            raise ConfigError(f"unknown curve kind {kind!r}")
        rows.append(f"{kind},{_r(mu)},{_r(A)},{_r(nu)}")
    return "kind,mu,A,nu", rows, notes


def _run_modelmap_chart(cfg):
    mu_axis = np.linspace(cfg["mu_lo"], cfg["mu_hi"], cfg["n_mu"])
    other_axis = np.linspace(cfg["other_lo"], cfg["other_hi"], cfg["n_other"])
    grid = modelmap.regime_grid(
        mu_axis, other_axis, other=cfg["other"], fixed=cfg["fixed"],
        N_transient=cfg["transient"], N_probe=cfg["probe"])
    names = ("stable_periodic", "chaotic_candidate", "escaped")
    rows = []
    for i, ov in enumerate(other_axis):
        for j, mu in enumerate(mu_axis):
            rows.append(f"{_r(mu)},{_r(ov)},{names[grid[i, j]]}")
    fixed_name = "A" if cfg["other"] == "nu" else "nu"
    return "mu,A_or_nu,regime", rows, [f"fixed_{fixed_name} {_r(cfg['fixed'])}"]


def _run_trace_a0(cfg):
    region = ((cfg["alpha_lo"], cfg["alpha_hi"]),
              (cfg["lambda_lo"], cfg["lambda_hi"]))
    tc = pseudohyp.trace_tangency_curve(
        region, axis=cfg["axis"], beta_star=cfg["beta_star"],
        resolution=cfg["resolution"], n_lines=cfg["n_lines"],
        tol=cfg["tol"], scan_from=cfg["scan_from"])
    rows = [f"{_r(a)},{_r(l)}" for a, l in tc.points]
    notes = [f"beta_star {_r(tc.beta_star)}"] + [f"note {n}" for n in tc.notes]
    return "alpha,lambda", rows, notes


def _run_chart(cfg, header):
    if cfg["preset"]:
        spec = chartscan.preset_spec(
            cfg["preset"], n=cfg["n"] if cfg["n"] > 0 else None)
        axis1, axis2 = spec["axis1"], spec["axis2"]
        rotated, job = spec["rotated"], spec["job"]
        options = spec["options"]
    else:
        axis1 = chartscan.ChartAxis(cfg["axis1_name"], cfg["axis1_lo"],
                                    cfg["axis1_hi"], cfg["axis1_n"])
        axis2 = chartscan.ChartAxis(cfg["axis2_name"], cfg["axis2_lo"],
                                    cfg["axis2_hi"], cfg["axis2_n"])
        rotated, job = cfg["rotated"], cfg["job"]
        options = {}
    grid = chartscan.scan(
        axis1, axis2, job, options=options, rotated=rotated,
        rng_seed=cfg["seed"], preset_id=cfg["preset"] or None,
        checkpoint=cfg["checkpoint"] or None, resume=cfg["resume"],
        n_workers=cfg["workers"], cell_budget=cfg["cell_budget"],
        max_cells=cfg["max_cells"] if cfg["max_cells"] > 0 else None)
    chartscan.write_csv(grid, cfg["out"], extra_header=tuple(header))
    return grid


# ---------------------------------------------------------------------------
# subcommand table

SUBCOMMANDS = {
    "simulate": (_run_simulate, "simulate.csv", {
        **_SYSTEM_KEYS, **_SEED_KEYS, **_TOL_KEYS,
        "T": (float, 100.0, "integration time"),
        "sample_dt": (float, 0.1, "output sampling interval"),
    }),
    "spectrum": (_run_spectrum, "spectrum.csv", {
        **_SYSTEM_KEYS, **_SEED_KEYS, **_TOL_KEYS,
        "T": (float, 1e4, "accumulation time"),
        "transient": (float, 1e3, "discarded transient"),
        "renorm": (float, 0.5, "renormalization interval"),
    }),
    "clv": (_run_clv, "clv.csv", {
        **_SYSTEM_KEYS, **_SEED_KEYS, **_TOL_KEYS, **_CLV_KEYS,
    }),
    "angles": (_run_angles, "angles.csv", {
        **_SYSTEM_KEYS, **_SEED_KEYS, **_TOL_KEYS, **_CLV_KEYS,
        "pair": (str, "ss_vs_cu", "subspace pair: ss_vs_cu | u_vs_cs"),
        "bins": (int, 90, "histogram bins over [0, pi/2]"),
    }),
    "continuity": (_run_continuity, "continuity.csv", {
        **_SYSTEM_KEYS, **_SEED_KEYS, **_TOL_KEYS, **_CLV_KEYS,
        "subspace": (str, "E_ss", "E_ss | E_u | E_cu | E_cs"),
        "pair_budget": (int, 500_000, "sampled frame pairs"),
        "seed": (int, 0, "RNG seed"),
    }),
    "verdict": (_run_verdict, "verdict.csv", {
        **_SYSTEM_KEYS,
        "beta_star": (float, 0.005, "angle threshold beta*"),
        "beta_preset": (str, "", "named beta* preset (overrides beta_star)"),
        "spectrum_T": (float, 2e4, "exponent accumulation time"),
        "clv_T": (float, 1.1e4, "covariant-vector accumulation time"),
        "seed": (int, 0, "RNG seed"),
    }),
    "kneading": (_run_kneading, "kneading.csv", {
        **_SYSTEM_KEYS, **_TOL_KEYS,
        "N": (int, 16, "symbols to record"),
        "eps": (float, 1e-6, "separatrix seeding distance"),
        "branch": (str, "plus", "separatrix branch"),
        "skip": (int, 1, "skipped prefix recorded with the sequence"),
        "t_max": (float, 1e4, "integration time cap"),
        "capture_radius": (float, 1e-4, "equilibrium capture radius"),
    }),
    "bisect-homoclinic": (_run_bisect, "bisect.csv", {
        **_TOL_KEYS,
        "alpha_lo": (float, 0.4, "bracket endpoint A: alpha"),
        "lambda_lo": (float, 1.19, "bracket endpoint A: lambda"),
        "alpha_hi": (float, 0.4, "bracket endpoint B: alpha"),
        "lambda_hi": (float, 1.22, "bracket endpoint B: lambda"),
        "symbol_index": (int, 1, "0-based index of the flipping symbol"),
        "tol": (float, 1e-6, "parameter-space tolerance"),
        "eps": (float, 1e-6, "separatrix seeding distance"),
        "t_max": (float, 1e4, "integration time cap per endpoint"),
    }),
    "portrait": (_run_portrait, "portrait.csv", {
        **_SYSTEM_KEYS, **_TOL_KEYS, **_SECTION_KEYS,
        "direction": (str, "both", "crossing direction: up | down | both"),
        "n_events": (int, 2000, "crossings to record"),
        "transient_crossings": (int, 100, "discarded leading crossings"),
        "t_max": (float, 1e5, "integration time cap"),
    }),
    "map1d": (_run_map1d, "map1d.csv", {
        **_SYSTEM_KEYS, **_TOL_KEYS, **_SECTION_KEYS,
        "stride": (int, 1, "crossings per map iteration (1 or 2)"),
        "folding": (str, "abs_fold", "abs_fold | none"),
        "side": (str, "positive", "x side kept: positive | negative | both"),
        "n_pairs": (int, 1000, "map pairs to record"),
        "transient_crossings": (int, 100, "discarded leading crossings"),
        "t_max": (float, 1e5, "integration time cap"),
    }),
    "modelmap-curves": (_run_modelmap_curves, "curves.csv", {
        "A": (float, 0.63, "separatrix value A"),
        "nu": (float, 0.8, "saddle index nu"),
        "kinds": (str, "l1,l2,l1_LA,l2_LA,l_SN,l_PD,l_lac",
                  "comma list of curve kinds"),
    }),
    "modelmap-chart": (_run_modelmap_chart, "regimes.csv", {
        "other": (str, "nu", "second axis: nu (fixed A) or A (fixed nu)"),
        "fixed": (float, 0.63, "value of the fixed parameter"),
        "mu_lo": (float, 0.0, "mu axis start"),
        "mu_hi": (float, 0.12, "mu axis end"),
        "n_mu": (int, 200, "mu axis cells"),
        "other_lo": (float, 0.55, "second axis start"),
        "other_hi": (float, 0.95, "second axis end"),
        "n_other": (int, 200, "second axis cells"),
        "transient": (int, 2000, "discarded iterations"),
        "probe": (int, 1000, "probe iterations"),
    }),
    "chart": (None, "chart.csv", {
        "preset": (str, "", "figure preset name (fig6a, ..., fig16b)"),
        "n": (int, 0, "override preset resolution (n x n)"),
        "axis1_name": (str, "alpha", "first axis name"),
        "axis1_lo": (float, 0.3, "first axis start"),
        "axis1_hi": (float, 0.7, "first axis end"),
        "axis1_n": (int, 10, "first axis cells"),
        "axis2_name": (str, "lambda", "second axis name"),
        "axis2_lo": (float, 0.7, "second axis start"),
        "axis2_hi": (float, 1.1, "second axis end"),
        "axis2_n": (int, 10, "second axis cells"),
        "rotated": (bool, False, "axes are (u, v) chart coordinates"),
        "job": (str, "lyapunov", "cell job: lyapunov | kneading | verdict | short_beta"),
        "seed": (int, 0, "global RNG seed"),
        "checkpoint": (str, "", "checkpoint file path"),
        "resume": (bool, False, "resume from checkpoint"),
        "workers": (int, 4, "worker threads"),
        "cell_budget": (float, 30.0, "per-cell time budget, seconds"),
        "max_cells": (int, 0, "stop after this many new cells (0 = all)"),
    }),
    "trace-a0": (_run_trace_a0, "trace_a0.csv", {
        "alpha_lo": (float, 0.4, "alpha window start"),
        "alpha_hi": (float, 0.4, "alpha window end"),
        "lambda_lo": (float, 0.70, "lambda window start"),
        "lambda_hi": (float, 0.85, "lambda window end"),
        "axis": (str, "alpha", "scan-line axis"),
        "n_lines": (int, 1, "scan lines across the window"),
        "resolution": (int, 31, "grid points per line"),
        "beta_star": (float, 0.005, "angle threshold beta*"),
        "tol": (float, 1e-5, "bisection tolerance"),
        "scan_from": (str, "high", "scan direction: high | low"),
    }),
}


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shimor", allow_abbrev=False,
        description="Shimizu-Morioka attractor cartography toolkit")
    ap.add_argument("--version", action="version",
                    version=f"shimor {__version__}")
    subs = ap.add_subparsers(dest="subcommand", required=True)
    for name, (_fn, default_out, schema) in SUBCOMMANDS.items():
        sp = subs.add_parser(name, help=f"run the {name} pipeline")
        sp.add_argument("--config", default=None, metavar="FILE",
                        help="key = value configuration file")
        sp.add_argument("--out", default=None, metavar="FILE",
                        help=f"output CSV (default {default_out})")
        for key, (_typ, default, help_) in schema.items():
            sp.add_argument(f"--{key}", dest=f"k_{key}", default=None,
                            metavar="V", help=f"{help_} (default {_fmt(default)})")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    sub = args.subcommand
    runner, default_out, schema = SUBCOMMANDS[sub]
    cli_pairs = {key: getattr(args, f"k_{key}")
                 for key in schema if getattr(args, f"k_{key}") is not None}
    try:
        cfg, _user = _resolve(schema, args.config, cli_pairs)
        if sub == "verdict" and cfg["beta_preset"] \
                and cfg["beta_preset"] not in pseudohyp.BETA_STAR_PRESETS:
            raise ConfigError(
                f"unknown beta_preset {cfg['beta_preset']!r}; known: "
                f"{sorted(pseudohyp.BETA_STAR_PRESETS)}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = args.out or default_out
    cfg_for_hash = dict(cfg, out=out)
    header = _header_lines(sub, cfg_for_hash)
    try:
        if sub == "chart":
            grid = _run_chart(dict(cfg, out=out), header)
            counts = {}
            for c in grid.cells:
                counts[c.status] = counts.get(c.status, 0) + 1
            print(f"chart: {len(grid.cells)}/{grid.n_cells} cells "
                  f"({counts})", file=sys.stderr)
        else:
            schema_line, rows, notes = runner(cfg)
            _write(out, header + notes, schema_line, rows)
            print(f"{sub}: wrote {len(rows)} rows to {out}", file=sys.stderr)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, EscapeError, ConvergenceError, ValueError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
