"""Command-line front end.

Subcommands:
  simulate   one snapshot plus estimates (simple or joint)
  asv        asymptotic variances at an operating point
  opt-omega  numeric omega tuning, optionally with the analytic cross-check
  are        asymptotic relative efficiency table
  sweep      Monte Carlo sweep along omega or sigma, emitted as CSV

Every JSON output embeds a manifest (command, version, configuration,
seed, output target) and the sweep CSV carries the same manifest as a
leading comment line. Outputs contain no timestamps, so a rerun with
identical inputs is byte-identical.

Exit codes: 0 success, 1 usage or validation error, 2 saturation under
--strict.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .asymptotic import asv_closed_form, asv_generic
from .efficiency import asymptotic_relative_efficiency
from .estimators import joint_minimum_variance, simple_estimates
from .montecarlo import AllTrialsSaturatedError, sweep, write_sweep_csv
from .network import ConfigError, NetworkConfig, PowerMode, simulate_snapshot
from .noise import MODEL_TOKENS, noise_model
from .numkit import RandomStream
from .tuning import analytic_omega, optimal_omega, resolve_omega

_CONFIG_DEFAULTS = {
    "L": 100,
    "theta": 1.0,
    "theta_R": 2.0 * math.pi,
    "sigma": 1.0,
    "model": "gaussian",
    "power_mode": "total",
    "P": 1.0,
    "channel_noise_var": 1.0,
    "omega": "auto:theta",
    "seed": 0,
}

_AUTO_TARGETS = ("theta", "sigma", "gamma")


class _Parser(argparse.ArgumentParser):
    """argparse exits usage errors with status 2; the contract here is 1."""

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON file with configuration keys")
    p.add_argument("--L", type=int, help="number of sensors")
    p.add_argument("--theta", type=float, help="true location")
    p.add_argument("--theta-R", dest="theta_R", type=float, help="location range bound")
    p.add_argument("--sigma", type=float, help="true noise scale")
    p.add_argument("--model", choices=MODEL_TOKENS, help="sensing noise model")
    p.add_argument(
        "--power-mode", dest="power_mode", choices=[m.value for m in PowerMode],
        help="power budget convention",
    )
    p.add_argument("--P", type=float, help="power budget")
    p.add_argument(
        "--channel-noise-var", dest="channel_noise_var", type=float,
        help="channel noise variance at the fusion center",
    )
    p.add_argument(
        "--omega", help="modulation frequency: a float or auto:theta|sigma|gamma"
    )
    p.add_argument("--seed", type=int, help="base RNG seed")
    p.add_argument(
        "--gamma-guess", dest="gamma_guess", type=float,
        help="SNR value used by auto:gamma (default: the configured truth)",
    )


def _merged_config_dict(args) -> dict:
    merged = dict(_CONFIG_DEFAULTS)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(file_cfg) - set(_CONFIG_DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_cfg)
    for key in _CONFIG_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _resolve_omega_setting(merged: dict, gamma_guess: float | None) -> tuple[float, dict]:
    """Turn the omega setting (float or auto token) into a number.

    Returns (omega, manifest_notes). A boundary infimum is substituted
    by a small operational omega and noted in the manifest.
    """
    setting = merged["omega"]
    try:
        return float(setting), {}
    except (TypeError, ValueError):
        pass
    token = str(setting)
    if not token.startswith("auto:") or token[5:] not in _AUTO_TARGETS:
        raise ConfigError(
            f"omega must be a number or auto:theta|sigma|gamma, got {token!r}"
        )
    target = token[5:]
    model = noise_model(merged["model"])
    sigma = float(merged["sigma"])
    gamma = None
    if target == "gamma":
        gamma = gamma_guess if gamma_guess is not None else (float(merged["theta"]) / sigma) ** 2
    omega, substituted = resolve_omega(
        model, sigma, float(merged["P"]), float(merged["channel_noise_var"]),
        target, power_mode=PowerMode(merged["power_mode"]), gamma=gamma,
        omega_max=2.0 * math.pi / float(merged["theta_R"]),
    )
    notes = {"omega_rule": token, "omega_substituted": substituted}
    if gamma is not None:
        notes["omega_rule_gamma"] = gamma
    return omega, notes


def _build_config(args) -> tuple[NetworkConfig, dict]:
    merged = _merged_config_dict(args)
    omega, notes = _resolve_omega_setting(merged, getattr(args, "gamma_guess", None))
    merged["omega"] = omega
    cfg = NetworkConfig.from_json_dict(merged)
    return cfg, notes


def _manifest(command: str, config: dict, seed, output, **extra) -> dict:
    man = {
        "command": command,
        "version": __version__,
        "config": config,
        "seed": seed,
        "output": output,
    }
    man.update(extra)
    return man


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _cmd_simulate(args) -> int:
    cfg, notes = _build_config(args)
    snap = simulate_snapshot(cfg, RandomStream(cfg.seed))
    if args.estimator == "joint":
        nv_eff = cfg.channel_noise_var if cfg.power_mode is PowerMode.TOTAL else 0.0
        est = joint_minimum_variance(
            snap.z, cfg.omega, cfg.P, nv_eff, cfg.model, cfg.theta_R
        )
    else:
        est = simple_estimates(snap.z, cfg.omega, cfg.P, cfg.model)
    payload = {
        "y": {"re": snap.y.real, "im": snap.y.imag},
        "z": {
            "re": snap.z.real,
            "im": snap.z.imag,
            "abs": abs(snap.z),
            "arg": math.atan2(snap.z.imag, snap.z.real),
        },
        "estimates": {"estimator": args.estimator, **est.to_json_dict()},
        "manifest": _manifest(
            "simulate", cfg.to_json_dict(), cfg.seed, None, **notes
        ),
    }
    _emit(payload)
    if args.strict and est.saturated:
        print("cmphase: saturated snapshot under --strict", file=sys.stderr)
        return 2
    return 0


def _point_args(p: argparse.ArgumentParser, with_omega: bool) -> None:
    p.add_argument("--model", choices=MODEL_TOKENS, default="gaussian")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--P", type=float, default=1.0)
    p.add_argument(
        "--channel-noise-var", dest="channel_noise_var", type=float, default=1.0
    )
    p.add_argument(
        "--power-mode", dest="power_mode",
        choices=[m.value for m in PowerMode], default="total",
    )
    if with_omega:
        p.add_argument("--omega", required=True,
                       help="a float or auto:theta|sigma|gamma")


def _cmd_asv(args) -> int:
    model = noise_model(args.model)
    mode = PowerMode(args.power_mode)
    merged = {
        "model": args.model, "sigma": args.sigma, "P": args.P,
        "channel_noise_var": args.channel_noise_var, "power_mode": args.power_mode,
        "omega": args.omega,
        "theta": args.theta if args.theta is not None else 1.0,
        "theta_R": 1.0,  # only bounds the auto-omega search here
    }
    notes: dict = {}
    try:
        omega = float(args.omega)
    except ValueError:
        if args.theta is None and args.omega == "auto:gamma":
            raise ConfigError("--omega auto:gamma requires --theta")
        omega, notes = _resolve_omega_setting(merged, None)
    report = asv_generic(
        model, args.sigma, omega, args.P,
        channel_noise_var=args.channel_noise_var,
        theta=args.theta, power_mode=mode,
    )
    payload = {"asv": report.to_json_dict()}
    if args.closed_forms:
        forms = {}
        targets = ["theta", "sigma"] + (["gamma"] if args.theta is not None else [])
        for which in targets:
            gamma = None
            if which == "gamma":
                gamma = (args.theta / args.sigma) ** 2
            value, verified = asv_closed_form(
                model, args.sigma, omega, args.P, args.channel_noise_var,
                which, power_mode=mode, gamma=gamma,
            )
            forms[which] = {"value": value, "verified": verified}
        payload["closed_forms"] = forms
    config = {
        "model": args.model, "sigma": args.sigma, "omega": omega, "P": args.P,
        "channel_noise_var": args.channel_noise_var,
        "power_mode": args.power_mode, "theta": args.theta,
    }
    payload["manifest"] = _manifest("asv", config, None, None, **notes)
    _emit(payload)
    return 0


def _cmd_opt_omega(args) -> int:
    model = noise_model(args.model)
    mode = PowerMode(args.power_mode)
    targets = _AUTO_TARGETS if args.target == "all" else (args.target,)
    if "gamma" in targets and args.gamma is None:
        raise ConfigError("--target gamma (or all) requires --gamma")
    results = {}
    for target in targets:
        omega, flag = optimal_omega(
            model, args.sigma, args.P, args.channel_noise_var, target,
            power_mode=mode, gamma=args.gamma,
            omega_max=args.omega_max, omega_min=args.omega_min,
        )
        entry = {"omega_star": omega, "flag": flag}
        if args.analytic:
            an = analytic_omega(
                model, args.sigma, args.P, args.channel_noise_var, target,
                power_mode=mode, gamma=args.gamma, omega_max=args.omega_max,
            )
            entry["analytic"] = {
                "value": an.value,
                "agrees_with_numeric": an.agrees_with_numeric,
                "note": an.note,
            }
        results[target] = entry
    payload: dict = {"results": results, "method": "golden-section"}
    if args.target == "all":
        payload["optima"] = {
            "omega_theta": results["theta"]["omega_star"],
            "omega_sigma": results["sigma"]["omega_star"],
            "omega_gamma": results["gamma"]["omega_star"],
            "flags": {t: results[t]["flag"] for t in _AUTO_TARGETS},
            "method": "golden-section",
        }
    config = {
        "model": args.model, "sigma": args.sigma, "P": args.P,
        "channel_noise_var": args.channel_noise_var,
        "power_mode": args.power_mode, "target": args.target,
        "gamma": args.gamma, "omega_min": args.omega_min,
        "omega_max": args.omega_max,
    }
    payload["manifest"] = _manifest("opt-omega", config, None, None)
    _emit(payload)
    return 0


def _cmd_are(args) -> int:
    models = MODEL_TOKENS if args.model == "all" else (args.model,)
    reports = [
        asymptotic_relative_efficiency(noise_model(m), parameter)
        for m in models
        for parameter in ("theta", "sigma")
    ]
    if args.json:
        payload = {
            "reports": [r.to_json_dict() for r in reports],
            "manifest": _manifest("are", {"model": args.model}, None, None),
        }
        _emit(payload)
        return 0
    print(f"{'model':<10}{'parameter':<11}{'ARE':<10}{'reference':<11}match")
    mismatch = False
    for r in reports:
        mark = "yes" if r.matches_reference else "no *"
        mismatch = mismatch or not r.matches_reference
        print(
            f"{r.model:<10}{r.parameter:<11}{r.are:<10.6f}{r.reference_are:<11.2f}{mark}"
        )
    if mismatch:
        print(
            "* the variance curves give a different value than the bundled"
            " reference table"
        )
    return 0


def _parse_grid(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must be start:stop:count or a comma list, got {text!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ConfigError("grid count must be >= 1")
        return [float(v) for v in np.linspace(start, stop, count)]
    return [float(v) for v in text.split(",")]


def _cmd_sweep(args) -> int:
    merged = _merged_config_dict(args)
    omega_rule = None
    setting = merged["omega"]
    if args.axis == "sigma" and isinstance(setting, str) and setting.startswith("auto:"):
        omega_rule = setting
    cfg, notes = _build_config(args)
    grid = _parse_grid(args.grid)
    rows = sweep(cfg, args.axis, grid, args.trials, omega_rule=omega_rule)
    # On sigma-axis auto sweeps the per-row rule and the base-config note
    # carry the same token; the merge must not pass the key twice.
    extra = {"axis": args.axis, "grid": grid, "trials": args.trials, **notes}
    if omega_rule is not None:
        extra["omega_rule"] = omega_rule
    manifest = _manifest(
        "sweep", cfg.to_json_dict(), cfg.seed,
        None if args.out == "-" else args.out,
        **extra,
    )
    if args.out == "-":
        write_sweep_csv(rows, sys.stdout, manifest)
    else:
        write_sweep_csv(rows, args.out, manifest)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="cmphase", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cmphase {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[], help="one snapshot plus estimates")
    _add_config_flags(p)
    p.add_argument("--estimator", choices=["simple", "joint"], default="simple")
    p.add_argument("--strict", action="store_true",
                   help="exit 2 if the snapshot saturates")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("asv", help="asymptotic variances at an operating point")
    _point_args(p, with_omega=True)
    p.add_argument("--theta", type=float, help="true location (enables the SNR row)")
    p.add_argument("--closed-forms", dest="closed_forms", action="store_true",
                   help="include closed-form values with verification flags")
    p.set_defaults(func=_cmd_asv)

    p = sub.add_parser("opt-omega", help="omega tuning")
    _point_args(p, with_omega=False)
    p.add_argument("--target", choices=list(_AUTO_TARGETS) + ["all"], default="all")
    p.add_argument("--gamma", type=float, help="SNR value for the gamma target")
    p.add_argument("--omega-min", dest="omega_min", type=float, default=1e-4)
    p.add_argument("--omega-max", dest="omega_max", type=float, default=2.0 * math.pi)
    p.add_argument("--analytic", action="store_true",
                   help="include the closed-form tuning equations and agreement flags")
    p.set_defaults(func=_cmd_opt_omega)

    p = sub.add_parser("are", help="asymptotic relative efficiency table")
    p.add_argument("--model", choices=list(MODEL_TOKENS) + ["all"], default="all")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_are)

    p = sub.add_parser("sweep", help="Monte Carlo sweep, CSV output")
    _add_config_flags(p)
    p.add_argument("--axis", choices=["omega", "sigma"], required=True)
    p.add_argument("--grid", required=True,
                   help="start:stop:count or comma-separated values")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--out", default="-", help="CSV path, or - for stdout")
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, AllTrialsSaturatedError, ValueError, OSError) as exc:
        print(f"cmphase: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
