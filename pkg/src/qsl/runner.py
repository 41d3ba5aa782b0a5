"""End-to-end scenario execution: evolve, bound, check D-independence, write files."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, io
from .bounds import BoundKind, build_report, integrand
from .config import ScenarioConfig, build_generator, build_initial_state
from .dfunc import builtin_d, verify_chain_identity, verify_independence
from .dynamics import evolve
from .errors import ConfigError, QSLError
from .fidelity import FidelityKind, fidelity_series
from .states import is_pure

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


@dataclass(frozen=True)
class RunOutput:
    series_csv_path: Path | None
    report_json_path: Path
    exit_status: int
    report: dict


def _error_record(exc: Exception) -> dict:
    rec = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("index", "violation", "field", "key", "line"):
        if getattr(exc, attr, None) is not None:
            rec[attr] = getattr(exc, attr)
    return rec


def run_scenario(cfg: ScenarioConfig, out_dir=".", write_states: bool = False) -> RunOutput:
    out_dir = Path(out_dir)
    report: dict = {
        "schema_version": io.SCHEMA_VERSION,
        "tool": {"name": "qsl", "version": __version__},
        "config": cfg.echo(),
    }
    json_path = out_dir / f"{cfg.name}.report.json"
    csv_path = None
    try:
        status, csv_path = _run(cfg, out_dir, report, write_states)
    except ConfigError as exc:
        status = EXIT_CONFIG
        report["error"] = _error_record(exc)
    except QSLError as exc:
        status = EXIT_NUMERIC
        report["error"] = _error_record(exc)
    report["exit_status"] = status
    io.atomic_write_text(json_path, io.report_json(report))
    log.info("%s: exit status %d", cfg.name, status)
    return RunOutput(csv_path, json_path, status, report)


def _run(cfg: ScenarioConfig, out_dir: Path, report: dict, write_states: bool):
    generator = build_generator(cfg)
    rho0 = build_initial_state(cfg)
    traj = evolve(generator, rho0, cfg.tau, cfg.dt, hbar=cfg.hbar)
    report["trajectory"] = {
        "steps": len(traj) - 1,
        "dt": traj.dt,
        "tau": traj.tau,
        "max_trace_deviation": float(np.max(np.abs(np.trace(traj.states, axis1=1, axis2=2).real - 1))),
        "fd_constant": traj.fd_constant,
        "initial_purity": float(np.real(np.trace(rho0 @ rho0))),
    }
    kw = {"shift": cfg.shift, "energy_measure": cfg.energy_measure}
    kinds = [BoundKind.parse(k) for k in cfg.bounds]

    columns: dict[str, np.ndarray] = {"t": traj.times}
    series = {}
    series_errors = {}
    for name in cfg.fidelities:
        kind = FidelityKind.parse(name)
        try:
            series[kind] = fidelity_series(kind, traj)
            columns[f"F_{kind.value}"] = series[kind].values
        except QSLError as exc:
            series_errors[kind.value] = _error_record(exc)
    for kind in kinds:
        try:
            columns[f"B_{kind.value}"] = integrand(kind, traj, **kw)
        except QSLError:
            pass  # reason recorded by build_report below

    bound_report = build_report(traj, kinds, method=cfg.quadrature, **kw)
    report["bounds"] = bound_report.as_dict()
    if series_errors:
        report["fidelity_errors"] = series_errors

    d_funcs = [builtin_d(n) for n in cfg.d_functionals]
    independence = {}
    if d_funcs:
        for kind in bound_report.entries:
            res = verify_independence(d_funcs, traj, kind, method=cfg.quadrature, **kw)
            independence[kind.value] = res.as_dict()
    report["d_independence"] = independence

    chain = {}
    fd_step = min(1e-4, traj.dt)
    for kind, s in series.items():
        for D in d_funcs:
            key = f"{kind.value}/{D.name}"
            try:
                res = verify_chain_identity(D, s, fd_step)
                chain[key] = {
                    "max_residual": res.max_residual,
                    "evaluated": res.evaluated,
                    "excluded": int(res.excluded_times.size),
                }
            except QSLError as exc:
                chain[key] = {"error": _error_record(exc)}
    report["chain_identity"] = {"fd_step": fd_step, "results": chain}
    report["notes"] = _notes(cfg, traj)

    csv_path = io.atomic_write_text(out_dir / f"{cfg.name}.csv", io.columns_csv(columns))
    if write_states:
        io.atomic_write_text(
            out_dir / f"{cfg.name}.states.csv", io.columns_csv(io.states_columns(traj.times, traj.states))
        )
    ok = bound_report.all_valid and all(v["ok"] for v in independence.values())
    return (EXIT_OK if ok else EXIT_VERIFY), csv_path


def _notes(cfg: ScenarioConfig, traj) -> list[str]:
    notes = []
    fids = {FidelityKind.parse(f) for f in cfg.fidelities}
    fids |= {BoundKind.parse(b).fidelity for b in cfg.bounds}
    if is_pure(traj.rho0):
        if FidelityKind.SUPER in fids:
            notes.append(
                "initial state is pure: the super-fidelity purity factor equals 1 and the Super bounds reduce to the Bures bounds"
            )
        if FidelityKind.ALTERNATIVE in fids:
            notes.append("initial state is pure: the alternative fidelity equals the Bures fidelity")
    else:
        if any(BoundKind.parse(b).fidelity is FidelityKind.BURES for b in cfg.bounds):
            notes.append("initial state is mixed: Bures bounds are skipped (they assume a pure initial state)")
    return notes
