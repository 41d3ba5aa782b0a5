"""Command line entry point: ``qsl run | verify | sweep``.

Exit codes: 0 success, 1 verification failure, 2 config error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import ScenarioConfig, parse_config
from .errors import ConfigError, ValidationError
from .runner import EXIT_CONFIG, run_scenario
from .verify import verify_suite

log = logging.getLogger("qsl")


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    changes = {}
    if args.dt_override is not None:
        changes["dt"] = args.dt_override
    if args.hbar is not None:
        changes["hbar"] = args.hbar
    return cfg.with_updates(**changes) if changes else cfg


def _summary(out) -> str:
    rep = out.report
    if "error" in rep:
        return f"{out.report_json_path}: {rep['error']['type']}: {rep['error']['message']}"
    lines = [f"{out.report_json_path} (exit {out.exit_status})"]
    for kind, e in rep["bounds"]["entries"].items():
        flag = "ok" if e["valid"] else "INVALID"
        lines.append(f"  {kind:<20s} tau_qsl={e['tau_qsl']:.6g}  B={e['B_tau']:.6g}  F={e['F_tau']:.6g}  {flag}")
    for kind, why in rep["bounds"]["skipped"].items():
        lines.append(f"  {kind:<20s} skipped: {why}")
    return "\n".join(lines)


def cmd_run(args) -> int:
    cfg = _apply_overrides(parse_config(args.config), args)
    out = run_scenario(cfg, args.out_dir, write_states=args.states)
    print(_summary(out))
    return out.exit_status


def sweep_configs(cfg: ScenarioConfig, param: str, values: list[float]) -> list[ScenarioConfig]:
    key = param.removeprefix("params.")
    configs = []
    for v in values:
        label = f"{cfg.name}__{key}={v:g}"
        if key in ("tau", "dt", "hbar"):
            configs.append(cfg.with_updates(name=label, **{key: v}))
        elif key in _model_keys(cfg):
            configs.append(cfg.with_updates(name=label, params={**cfg.params, key: v}))
        else:
            raise ValidationError("--param", f"{param!r} is neither a parameter of {cfg.model} nor tau/dt/hbar")
    return configs


def _model_keys(cfg: ScenarioConfig) -> set[str]:
    from .scenarios import MODELS

    if cfg.model in MODELS:
        _, required, optional = MODELS[cfg.model]
        return required | optional
    return set()


def _run_one(job):
    cfg, out_dir, states = job
    out = run_scenario(cfg, out_dir, write_states=states)
    return out.exit_status, _summary(out)


def cmd_sweep(args) -> int:
    cfg = _apply_overrides(parse_config(args.config), args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError("--values", str(exc)) from exc
    jobs = [(c, args.out_dir, args.states) for c in sweep_configs(cfg, args.param, values)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    for _, text in results:
        print(text)
    return max(status for status, _ in results)


def cmd_verify(args) -> int:
    status, _ = verify_suite(args.level, args.seed)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsl", description="Quantum speed limit bounds under generalized fidelities.")
    parser.add_argument("--version", action="version", version=f"qsl {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_flags(p):
        p.add_argument("config", type=Path, help="scenario file (.toml or .json)")
        p.add_argument("--out-dir", type=Path, default=Path("."), help="directory for CSV/JSON output")
        p.add_argument("--dt-override", type=float, default=None, help="replace the config's dt")
        p.add_argument("--hbar", type=float, default=None, help="replace the config's hbar")
        p.add_argument("--states", action="store_true", help="also write the density matrices as CSV")

    p_run = sub.add_parser("run", help="run one scenario")
    scenario_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="re-run a scenario for several values of one parameter")
    scenario_flags(p_sweep)
    p_sweep.add_argument("--param", required=True, help="model parameter (gamma, omega) or tau/dt/hbar")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the randomized invariant suite")
    p_verify.add_argument("--level", choices=["fast", "full"], default="fast")
    p_verify.add_argument("--seed", type=int, default=1)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
