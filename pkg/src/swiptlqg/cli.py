"""Command-line entry point.

Four modes:

* ``critical``   critical probabilities and splitting ratios (table + JSON)
* ``sweep``      infinite-horizon cost bounds over an alpha grid (CSV)
* ``montecarlo`` seeded closed-loop Monte Carlo campaign (CSV)
* ``optimize``   grid search for the ratio minimizing the upper bound (CSV)

Every flag overrides the corresponding config-file field, and the effective
(post-override) configuration is what gets hashed into the output metadata.
Output files are written atomically (temp file + rename), so a failed run
leaves no partial artifacts behind.

Exit codes: 0 success, 2 configuration error, 3 infeasible stabilization
region, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__, critical, riccati
from .bounds import infinite_point
from .channels import eta_curve, gamma_curve
from .config import ConfigError, ExperimentConfig, load_config
from .optimizer import InfeasibleRegion, Optimum, OptimizerConfig, optimize_alpha
from .sim import SimCampaignResult, SimConfig, run_campaign

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


def _fmt(x) -> str:
    """Round-trip float formatting; infinities render as the literal 'inf'."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_atomic(path: str, lines: list[str]) -> None:
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".swiptlqg-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _meta_lines(cfg: ExperimentConfig, mode: str) -> list[str]:
    return [
        f"# swiptlqg {__version__} mode={mode}",
        f"# config_sha256={cfg.sha256()}",
        f"# seed={cfg.run.seed}",
    ]


def _csv(path: str, cfg: ExperimentConfig, mode: str, header: list[str], rows) -> None:
    lines = _meta_lines(cfg, mode)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _write_atomic(path, lines)


def _out_path(cfg: ExperimentConfig, out_flag: str | None, default_name: str) -> str:
    if out_flag:
        return out_flag
    return os.path.join(cfg.output.dir, default_name)


def _mode_critical(cfg: ExperimentConfig, out: str | None) -> int:
    region = critical.critical_alphas(
        cfg.plant, cfg.link, cfg.bpsk, tol=cfg.run.tol, prob_tol=cfg.run.tol
    )
    rows = [
        ("eta_c", region.eta_c),
        ("gamma_c_lower", region.gamma_c_lower),
        ("gamma_c_upper", region.gamma_c_upper),
        ("gamma_p_max", region.gamma_p_max),
        ("alpha_lower", region.alpha_lower),
        ("alpha_upper_lo", region.alpha_upper_lo),
        ("alpha_upper_hi", region.alpha_upper_hi),
        ("feasible", region.feasible),
    ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {_fmt(value)}")
    path = _out_path(cfg, out, "critical.json")
    record = dict(dataclasses.asdict(region))
    record["config_sha256"] = cfg.sha256()
    _write_atomic(path, [json.dumps(record, indent=2, sort_keys=True)])
    print(f"wrote {path}")
    return EXIT_OK


def _mode_sweep(cfg: ExperimentConfig, out: str | None) -> int:
    eta_of = eta_curve(cfg.link, cfg.bpsk)
    gamma_of = gamma_curve(cfg.link, cfg.bpsk)
    rows = []
    inits: dict = {}
    for alpha in cfg.run.alpha_grid():
        point = infinite_point(
            cfg.plant, alpha, eta_of(alpha), gamma_of(alpha),
            inits=inits, probe_retry=True,
        )
        b = point.bounds
        if b.bounded:
            inits = {"S": point.S, "P_bar": point.P_bar, "P_lower": point.P_lower}
        rows.append((
            b.alpha, b.eta, b.gamma, b.j_min, b.j_max, b.bounded,
            b.which_diverged or "",
        ))
    path = _out_path(cfg, out, "sweep.csv")
    _csv(path, cfg, "sweep",
         ["alpha", "eta", "gamma", "j_min_inf", "j_max_inf", "bounded", "which_diverged"],
         rows)
    print(f"wrote {path} ({len(rows)} grid points)")
    return EXIT_OK


def _mode_montecarlo(cfg: ExperimentConfig, out: str | None) -> int:
    sim_cfg = SimConfig(
        horizon_T=cfg.run.horizon,
        runs=cfg.run.runs,
        seed=cfg.run.seed,
        alpha_grid=tuple(cfg.run.alpha_grid()),
        gain_mode=cfg.run.gain_mode,
        n_jobs=cfg.run.n_jobs,
    )
    campaign: SimCampaignResult = run_campaign(cfg.plant, cfg.link, cfg.bpsk, sim_cfg)
    rows = [
        (r.alpha, r.j_emp, r.std_err, r.diverged_fraction,
         r.eta_empirical, r.gamma_empirical)
        for r in campaign.per_alpha
    ]
    path = _out_path(cfg, out, "montecarlo.csv")
    _csv(path, cfg, "montecarlo",
         ["alpha", "j_emp", "std_err", "diverged_fraction", "eta_hat", "gamma_hat"],
         rows)
    print(f"wrote {path} ({len(rows)} grid points x {cfg.run.runs} runs)")
    return EXIT_OK


def _mode_optimize(cfg: ExperimentConfig, out: str | None) -> int:
    region = critical.critical_alphas(
        cfg.plant, cfg.link, cfg.bpsk, tol=cfg.run.tol, prob_tol=cfg.run.tol
    )
    opt: Optimum = optimize_alpha(
        cfg.plant, cfg.link, cfg.bpsk, region, OptimizerConfig(delta=cfg.run.delta)
    )
    path = _out_path(cfg, out, "optimize_profile.csv")
    _csv(path, cfg, "optimize",
         ["alpha", "j_max_inf", "bounded"],
         [(a, j, b) for a, j, b in opt.profile])
    print(f"alpha_star_hat={_fmt(opt.alpha_star_hat)}")
    print(f"j_max_at_opt={_fmt(opt.j_max_at_opt)}")
    print(f"delta={_fmt(cfg.run.delta)}")
    print(f"wrote {path} ({len(opt.profile)} grid points)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swiptlqg",
        description="LQG control over a SWIPT-powered lossy network: "
                    "critical ratios, cost bounds, Monte Carlo, optimization.",
    )
    parser.add_argument("--config", required=True, help="TOML experiment config")
    parser.add_argument("--mode", choices=("critical", "sweep", "montecarlo", "optimize"))
    parser.add_argument("--alpha-min", type=float)
    parser.add_argument("--alpha-max", type=float)
    parser.add_argument("--alpha-step", type=float)
    parser.add_argument("--alpha-points", type=int)
    parser.add_argument("--delta", type=float, help="optimizer grid step")
    parser.add_argument("--runs", type=int, help="Monte Carlo runs per grid point")
    parser.add_argument("--horizon", type=int, help="Monte Carlo horizon T")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--n-jobs", type=int, help="parallel workers over grid points")
    parser.add_argument("--out", help="output file path (default: <output.dir>/<mode file>)")
    parser.add_argument("--format", choices=("csv",), help="output format")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


_FLAG_TO_KEY = {
    "mode": "run.mode",
    "alpha_min": "run.alpha_min",
    "alpha_max": "run.alpha_max",
    "alpha_step": "run.alpha_step",
    "alpha_points": "run.alpha_points",
    "delta": "run.delta",
    "runs": "run.runs",
    "horizon": "run.horizon",
    "seed": "run.seed",
    "n_jobs": "run.n_jobs",
    "format": "output.format",
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        key: getattr(args, flag)
        for flag, key in _FLAG_TO_KEY.items()
        if getattr(args, flag) is not None
    }
    # a step override replaces a file-level points grid and vice versa
    if "run.alpha_step" in overrides and "run.alpha_points" not in overrides:
        overrides["run.alpha_points"] = None
    if "run.alpha_points" in overrides and "run.alpha_step" not in overrides:
        overrides["run.alpha_step"] = None
    try:
        cfg = load_config(args.config, overrides=overrides)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG

    handler = {
        "critical": _mode_critical,
        "sweep": _mode_sweep,
        "montecarlo": _mode_montecarlo,
        "optimize": _mode_optimize,
    }[cfg.run.mode]
    try:
        return handler(cfg, args.out)
    except InfeasibleRegion as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (riccati.MaxIterExceeded, riccati.SingularInner,
            riccati.SingularInnovation, critical.PredicateNotMonotone,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
