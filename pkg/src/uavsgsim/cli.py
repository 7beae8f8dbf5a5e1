"""Command-line front end: config ingestion, sweeps, and figure recipes.

Config files are flat `key = value` text with `#` comments.  Documented keys
(unknown keys are rejected):

    lambda_per_km2, lambda_gu_per_km2   densities (or lambda_uav, lambda_gu
                                        in per-m^2)
    r_h_m                               hover radius, m
    dh_low_m, dh_high_m                 vertical-distance band, m (or
                                        h_lower_m, h_upper_m as altitudes)
    h_gu_m                              user antenna height, m
    alpha, tau                          pathloss exponent, SIR threshold
    p_dbm (or p_watts)                  transmit power
    phi_rad                             half-beamwidth, radians
    c_t (number or `inf`), r_m_m, eps_bar_rad, beam_altitude_m
    seed, sim_region_radius_m

Outputs are CSV with `#`-prefixed header lines carrying the full resolved
configuration and seed, so any file can be replayed exactly; runs with the
same seed are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional

from . import montecarlo
from .analytic import evaluate_analytic, optimize_beamwidth, st_scaling_pae
from .errors import ParseError, UavsgsimError, ValidationError
from .model import BackhaulConfig, NetworkConfig
from .montecarlo import SweepSpec, estimate, sweep

PER_KM2 = 1e-6  # per-km^2 to per-m^2


def _dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


_KEY_HELP = (
    "lambda_per_km2 lambda_uav lambda_gu_per_km2 lambda_gu r_h_m dh_low_m "
    "dh_high_m h_lower_m h_upper_m h_gu_m alpha tau p_dbm p_watts phi_rad "
    "c_t r_m_m eps_bar_rad beam_altitude_m seed sim_region_radius_m"
)
_KNOWN_KEYS = set(_KEY_HELP.split())


def load_config(path: str) -> NetworkConfig:
    """Parse a flat key=value config file into a NetworkConfig."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config {path!r}: {exc}") from exc
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ParseError(f"{path}:{lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _KNOWN_KEYS:
            raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ParseError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value.strip()

    def num(key: str, default=None) -> Optional[float]:
        if key not in raw:
            return default
        text = raw[key]
        if text.lower() in ("inf", "+inf", "infinity"):
            return math.inf
        try:
            return float(text)
        except ValueError:
            raise ParseError(f"{path}: key {key!r} has non-numeric value {text!r}")

    h_gu = num("h_gu_m", 1.5)
    if "dh_low_m" in raw or "dh_high_m" in raw:
        if "h_lower_m" in raw or "h_upper_m" in raw:
            raise ParseError(f"{path}: give either dh_*_m or h_*_m keys, not both")
        h_lower = num("dh_low_m") + h_gu
        h_upper = num("dh_high_m") + h_gu
    else:
        h_lower = num("h_lower_m", 91.5)
        h_upper = num("h_upper_m", 111.5)

    lam = num("lambda_uav")
    if lam is None:
        lam = num("lambda_per_km2", 60.0) * PER_KM2
    lam_gu = num("lambda_gu")
    if lam_gu is None:
        lam_gu = num("lambda_gu_per_km2", 1e4) * PER_KM2
    power = num("p_watts")
    if power is None:
        power = _dbm_to_watts(num("p_dbm", 30.0))

    backhaul = BackhaulConfig(
        c_t=num("c_t", math.inf),
        r_m=num("r_m_m", 500.0),
        eps_bar=num("eps_bar_rad", 0.1745),
        altitude_for_beam=num("beam_altitude_m", None),
    )
    try:
        return NetworkConfig(
            lambda_uav=lam, lambda_gu=lam_gu,
            hover_radius=num("r_h_m", 100.0),
            h_lower=h_lower, h_upper=h_upper, h_gu=h_gu,
            alpha=num("alpha", 3.5), tau=num("tau", 1.0), tx_power=power,
            half_beamwidth=num("phi_rad", math.pi / 2.0),
            backhaul=backhaul,
            seed=int(num("seed", 0.0)),
            sim_region_radius=num("sim_region_radius_m", None),
        )
    except ValidationError:
        raise


def serialize_config(cfg: NetworkConfig) -> str:
    """Emit a config file that load_config() round-trips exactly."""
    lines = [
        f"lambda_uav = {cfg.lambda_uav!r}",
        f"lambda_gu = {cfg.lambda_gu!r}",
        f"r_h_m = {cfg.hover_radius!r}",
        f"h_lower_m = {cfg.h_lower!r}",
        f"h_upper_m = {cfg.h_upper!r}",
        f"h_gu_m = {cfg.h_gu!r}",
        f"alpha = {cfg.alpha!r}",
        f"tau = {cfg.tau!r}",
        f"p_watts = {cfg.tx_power!r}",
        f"phi_rad = {cfg.half_beamwidth!r}",
        f"c_t = {'inf' if math.isinf(cfg.backhaul.c_t) else repr(cfg.backhaul.c_t)}",
        f"r_m_m = {cfg.backhaul.r_m!r}",
        f"eps_bar_rad = {cfg.backhaul.eps_bar!r}",
        f"seed = {cfg.seed}",
    ]
    if cfg.backhaul.altitude_for_beam is not None:
        lines.append(f"beam_altitude_m = {cfg.backhaul.altitude_for_beam!r}")
    if cfg.sim_region_radius is not None:
        lines.append(f"sim_region_radius_m = {cfg.sim_region_radius!r}")
    return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return format(x, ".12g")
    return str(x)


def _header_lines(cfg: NetworkConfig, args_desc: dict) -> list:
    lines = ["# uavsgsim output"]
    for key, val in sorted(args_desc.items()):
        lines.append(f"# {key} = {_fmt(val)}")
    for cfg_line in serialize_config(cfg).splitlines():
        lines.append(f"# cfg {cfg_line}")
    return lines


def _write_csv(out_path: Optional[str], cfg: NetworkConfig, args_desc: dict,
               columns: list, rows: list) -> str:
    buf = io.StringIO()
    for line in _header_lines(cfg, args_desc):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) if isinstance(row, dict)
                         else _fmt(row[i]) for i, c in enumerate(columns)])
    text = buf.getvalue()
    if out_path and out_path != "-":
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def _base_config(args) -> NetworkConfig:
    cfg = load_config(args.config) if args.config else NetworkConfig()
    if args.seed is not None:
        cfg = cfg.with_overrides(seed=args.seed)
    return cfg


def _cmd_analytic(args) -> int:
    cfg = _base_config(args)
    mode = "directional" if (args.phi is not None or args.pae is not None) else "omni"
    if args.phi is not None:
        cfg = cfg.with_overrides(half_beamwidth=args.phi)
    res = evaluate_analytic(cfg, args.rule, pae_c=args.pae)
    row = {"rule": args.rule, "mode": mode, "cp": res.cp, "st": res.st,
           "c_b": res.c_b_used, "regime": res.regime.value}
    _write_csv(args.out, cfg, {"command": "analytic", "rule": args.rule,
                               "pae": args.pae, "phi": args.phi},
               ["rule", "mode", "cp", "st", "c_b", "regime"], [row])
    return 0


def _cmd_simulate(args) -> int:
    cfg = _base_config(args)
    mode = "directional" if (args.phi is not None or args.pae is not None) else "omni"
    if args.phi is not None:
        cfg = cfg.with_overrides(half_beamwidth=args.phi)
    cp, st, qa = estimate(cfg, args.rule, antenna_mode=mode,
                          n_trials=args.trials, seed=cfg.seed,
                          interference="matched" if args.matched else "physical",
                          pae_c=args.pae)
    row = {"rule": args.rule, "mode": mode, "trials": args.trials,
           "cp": cp.value, "cp_se": cp.std_error, "st": st.value,
           "st_se": st.std_error, "q_a_hat": qa.value, "q_a_se": qa.std_error}
    _write_csv(args.out, cfg,
               {"command": "simulate", "rule": args.rule, "trials": args.trials,
                "seed": cfg.seed, "pae": args.pae, "phi": args.phi,
                "matched": args.matched},
               ["rule", "mode", "trials", "cp", "cp_se", "st", "st_se",
                "q_a_hat", "q_a_se"], [row])
    return 0


def _parse_axis(text: str):
    if "=" not in text:
        raise ParseError(f"axis must look like field=v1,v2,..., got {text!r}")
    name, _, vals = text.partition("=")
    values = []
    for piece in vals.split(","):
        piece = piece.strip()
        values.append(math.inf if piece == "inf" else float(piece))
    return name.strip(), values


def _cmd_sweep(args) -> int:
    cfg = _base_config(args)
    axes = [_parse_axis(a) for a in args.axis]
    engines = ("analytic", "mc") if args.engine == "both" else (args.engine,)
    spec = SweepSpec(axes=axes, engines=engines, rule=args.rule,
                     antenna_mode="directional" if args.directional else "omni",
                     pae_c=args.pae, n_trials=args.trials, seed=cfg.seed,
                     interference="matched" if args.matched else "physical")
    rows = sweep(cfg, spec)
    columns = [name for name, _ in axes]
    if "analytic" in engines:
        columns += ["cp_analytic", "st_analytic"]
    if "mc" in engines:
        columns += ["cp_mc", "cp_mc_se", "st_mc", "st_mc_se", "q_a_mc"]
    columns.append("error")
    _write_csv(args.out, cfg,
               {"command": "sweep", "rule": args.rule, "trials": args.trials,
                "seed": cfg.seed, "engine": args.engine, "pae": args.pae},
               columns, rows)
    return 0


def _cmd_optimize(args) -> int:
    cfg = _base_config(args)
    rows = []
    for lam_km2 in args.densities:
        cfg_l = cfg.with_overrides(lambda_uav=lam_km2 * PER_KM2)
        phi, st = optimize_beamwidth(cfg_l, args.rule)
        rows.append({"lambda_per_km2": lam_km2, "phi_star_rad": phi,
                     "st_star": st})
    _write_csv(args.out, cfg,
               {"command": "optimize-beamwidth", "rule": args.rule,
                "densities_per_km2": ",".join(_fmt(d) for d in args.densities)},
               ["lambda_per_km2", "phi_star_rad", "st_star"], rows)
    return 0


def _cmd_pae_curve(args) -> int:
    cfg = _base_config(args)
    rows = []
    for lam_km2 in args.densities:
        cfg_l = cfg.with_overrides(lambda_uav=lam_km2 * PER_KM2)
        res = evaluate_analytic(cfg_l, "rtna", pae_c=args.pae)
        cp, st, qa = estimate(cfg_l, "rtna", antenna_mode="directional",
                              n_trials=args.trials, seed=cfg.seed,
                              pae_c=args.pae)
        limit = st_scaling_pae(cfg_l, args.pae)
        rows.append({"lambda_per_km2": lam_km2, "st_analytic": res.st,
                     "st_mc": st.value, "st_mc_se": st.std_error,
                     "st_limit": limit.st})
    _write_csv(args.out, cfg,
               {"command": "pae-curve", "trials": args.trials,
                "seed": cfg.seed, "pae": args.pae},
               ["lambda_per_km2", "st_analytic", "st_mc", "st_mc_se",
                "st_limit"], rows)
    return 0


# Densities in per-km^2 for the canned figure recipes.
_FIG_LAMBDAS = {"2a": [20.0, 60.0, 100.0], "2b": [20.0, 60.0, 100.0]}
_FIG_RH = [0.0, 25.0, 50.0, 75.0, 100.0, 125.0, 150.0, 175.0, 200.0]
_FIG_LAM_AXIS = [10.0, 20.0, 40.0, 60.0, 80.0, 100.0]
_FIG_PHI_AXIS = [math.pi / 24, math.pi / 12, math.pi / 8, math.pi / 6,
                 math.pi / 4, math.pi / 3, 1.4, math.pi / 2]
_FIG5_LAMBDAS = [10.0, 20.0, 50.0, 100.0, 200.0, 1e3, 1e4, 1e5, 1e6]


def _cmd_reproduce(args) -> int:
    cfg = _base_config(args)
    fig = args.figure
    rows = []
    meta = {"command": f"reproduce-figure {fig}", "trials": args.trials,
            "seed": cfg.seed}

    def mc_seed(i: int) -> int:
        import numpy as np
        return int(np.random.SeedSequence(
            entropy=(cfg.seed, 0xF16, i)).generate_state(1)[0])

    if fig in ("2a", "2b"):
        cts = [math.inf] if fig == "2a" else [10.0, 100.0, math.inf]
        cols = ["rule", "lambda_per_km2", "r_h_m", "ct"]
        cols += ["cp_analytic", "cp_mc", "cp_mc_se"] if fig == "2a" else \
            ["st_analytic", "st_mc", "st_mc_se"]
        i = 0
        for rule in ("semi", "rtna"):
            for lam in _FIG_LAMBDAS[fig]:
                for ct in cts:
                    for rh in _FIG_RH:
                        cfg_p = cfg.with_overrides(
                            lambda_uav=lam * PER_KM2, hover_radius=rh, c_t=ct)
                        res = evaluate_analytic(cfg_p, rule)
                        cp, st, _ = estimate(cfg_p, rule, n_trials=args.trials,
                                             seed=mc_seed(i))
                        row = {"rule": rule, "lambda_per_km2": lam,
                               "r_h_m": rh, "ct": ct,
                               "cp_analytic": res.cp, "cp_mc": cp.value,
                               "cp_mc_se": cp.std_error,
                               "st_analytic": res.st, "st_mc": st.value,
                               "st_mc_se": st.std_error}
                        rows.append(row)
                        i += 1
    elif fig in ("3a", "3b"):
        cols = ["rule", "r_h_m", "lambda_per_km2",
                "cp_analytic" if fig == "3a" else "st_analytic",
                "cp_mc" if fig == "3a" else "st_mc",
                "cp_mc_se" if fig == "3a" else "st_mc_se"]
        i = 0
        for rule in ("semi", "rtna"):
            for rh in (50.0, 100.0, 150.0):
                for lam in _FIG_LAM_AXIS:
                    cfg_p = cfg.with_overrides(lambda_uav=lam * PER_KM2,
                                               hover_radius=rh,
                                               c_t=10.0 if fig == "3b" else math.inf)
                    res = evaluate_analytic(cfg_p, rule)
                    cp, st, _ = estimate(cfg_p, rule, n_trials=args.trials,
                                         seed=mc_seed(i))
                    rows.append({"rule": rule, "r_h_m": rh,
                                 "lambda_per_km2": lam,
                                 "cp_analytic": res.cp, "cp_mc": cp.value,
                                 "cp_mc_se": cp.std_error,
                                 "st_analytic": res.st, "st_mc": st.value,
                                 "st_mc_se": st.std_error})
                    i += 1
    elif fig in ("4a", "4b"):
        cols = ["rule", "lambda_per_km2", "phi_rad", "st_analytic",
                "st_mc", "st_mc_se"]
        lams = [20.0, 40.0, 80.0] if fig == "4a" else _FIG_LAM_AXIS
        phis = _FIG_PHI_AXIS if fig == "4a" else [math.pi / 6]
        i = 0
        for rule in ("semi", "rtna"):
            for lam in lams:
                for phi in phis:
                    cfg_p = cfg.with_overrides(lambda_uav=lam * PER_KM2,
                                               half_beamwidth=phi, c_t=10.0)
                    res = evaluate_analytic(cfg_p, rule)
                    cp, st, _ = estimate(cfg_p, rule,
                                         antenna_mode="directional",
                                         n_trials=args.trials, seed=mc_seed(i),
                                         interference="matched")
                    rows.append({"rule": rule, "lambda_per_km2": lam,
                                 "phi_rad": phi, "st_analytic": res.st,
                                 "st_mc": st.value, "st_mc_se": st.std_error})
                    i += 1
    elif fig == "5":
        cols = ["lambda_per_km2", "ct", "st_analytic", "st_mc", "st_mc_se"]
        i = 0
        for ct in (10.0, 100.0, math.inf):
            for lam in _FIG5_LAMBDAS:
                cfg_p = cfg.with_overrides(lambda_uav=lam * PER_KM2, c_t=ct)
                res = evaluate_analytic(cfg_p, "rtna", pae_c=1.0)
                cp, st, _ = estimate(cfg_p, "rtna", antenna_mode="directional",
                                     n_trials=args.trials, seed=mc_seed(i),
                                     pae_c=1.0)
                rows.append({"lambda_per_km2": lam, "ct": ct,
                             "st_analytic": res.st, "st_mc": st.value,
                             "st_mc_se": st.std_error})
                i += 1
    else:
        raise ParseError(f"unknown figure {fig!r}")
    _write_csv(args.out, cfg, meta, cols, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavsgsim",
        description="Coverage/throughput evaluation for hovering fixed-wing "
                    "UAV access-point networks: closed forms and Monte Carlo.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials_default=20_000):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trials", type=int, default=trials_default)
        p.add_argument("--out", default="-", help="output CSV path (- = stdout)")
        p.add_argument("--rule", choices=["rtna", "semi"], default="rtna")
        p.add_argument("--pae", type=float, default=None,
                       help="footprint-matching scale C (directional RTNA)")

    p = sub.add_parser("analytic", help="closed-form CP/ST for one config")
    common(p)
    p.add_argument("--phi", type=float, default=None,
                   help="half-beamwidth in radians (directional)")
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("simulate", help="Monte Carlo CP/ST for one config")
    common(p)
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--matched", action="store_true",
                   help="mirror the closed forms' thinned interferer density")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="grid sweep over config fields")
    common(p)
    p.add_argument("--axis", action="append", required=True,
                   help="field=v1,v2,... (repeatable; SI units)")
    p.add_argument("--engine", choices=["analytic", "mc", "both"],
                   default="both")
    p.add_argument("--directional", action="store_true")
    p.add_argument("--matched", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("optimize-beamwidth",
                       help="half-beamwidth maximizing throughput")
    common(p)
    p.add_argument("--densities", type=float, nargs="+",
                   default=[20.0, 80.0], help="UAV densities per km^2")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("pae-curve",
                       help="throughput vs density under footprint matching")
    common(p)
    p.add_argument("--densities", type=float, nargs="+",
                   default=[10.0, 20.0, 50.0, 100.0, 200.0])
    p.set_defaults(func=_cmd_pae_curve)

    p = sub.add_parser("reproduce-figure", help="canned figure recipes")
    common(p)
    p.add_argument("figure", choices=["2a", "2b", "3a", "3b", "4a", "4b", "5"])
    p.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.pae is not None and args.rule == "semi":
        print(json.dumps({"error": "ValidationError",
                          "message": "footprint matching runs under rtna"}),
              file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UavsgsimError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
