"""Scenario files (TOML or JSON) and their validation.

Parsing is strict: unknown keys are errors, because a misspelled rate
silently falling back to a default is the worst outcome for a physics run.
See ``configs/annotated.toml`` for every key with comments.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import scenarios
from .bounds import BoundKind
from .dfunc import BUILTIN as D_FUNCTIONALS
from .dynamics import HamiltonianSpec, LindbladSpec, step_count
from .errors import InvalidInput, ParseError, UnknownName, ValidationError
from .fidelity import FidelityKind
from .states import random_density, validate

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

MODEL_NAMES = (*scenarios.MODELS, "custom_matrices")
TOP_KEYS = {
    "name", "model", "dim", "params", "initial_state", "tau", "dt", "fidelities", "bounds",
    "d_functionals", "hbar", "seed", "shift", "energy_measure", "quadrature", "custom",
}
STATE_KEYS = {"pure", "spectrum", "basis", "file", "random_rank"}
CUSTOM_KEYS = {"hamiltonian", "jumps"}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    model: str
    tau: float
    dt: float
    initial_state: dict[str, Any]
    dim: int = 2
    params: dict[str, float] = field(default_factory=dict)
    fidelities: tuple[str, ...] = tuple(k.value for k in FidelityKind)
    bounds: tuple[str, ...] = tuple(k.value for k in BoundKind)
    d_functionals: tuple[str, ...] = ("linear", "bures_angle", "modified_angle", "exponential")
    hbar: float = 1.0
    seed: int = 0
    shift: str = "per_instant"
    energy_measure: str = "expectation"
    quadrature: str = "trapezoid"
    custom: dict[str, Any] = field(default_factory=dict)
    base_dir: str = "."

    @property
    def steps(self) -> int:
        return step_count(self.tau, self.dt)

    def echo(self) -> dict:
        out = dataclasses.asdict(self)
        out.pop("base_dir")
        out["fidelities"] = list(self.fidelities)
        out["bounds"] = list(self.bounds)
        out["d_functionals"] = list(self.d_functionals)
        return out

    def with_updates(self, **changes) -> "ScenarioConfig":
        return check(dataclasses.replace(self, **changes))


def _line_of(text: str, key: str) -> int | None:
    pattern = re.compile(rf'^\s*"?{re.escape(key)}"?\s*[=:]', re.M)
    m = pattern.search(text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def parse_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            raw = json.loads(text)
        else:
            raw = tomllib.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ParseError(f"invalid TOML: {exc}", line=int(m.group(1)) if m else None) from exc
    if not isinstance(raw, dict):
        raise ParseError("top level must be a table")
    return from_mapping(raw, base_dir=path.parent, text=text)


def _reject_unknown(mapping: dict, allowed: set, where: str, text: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ParseError(f"unknown key in {where}", line=_line_of(text, key), key=key)


def from_mapping(raw: dict, base_dir=".", text: str = "") -> ScenarioConfig:
    _reject_unknown(raw, TOP_KEYS, "scenario", text)
    if isinstance(raw.get("initial_state"), dict):
        _reject_unknown(raw["initial_state"], STATE_KEYS, "initial_state", text)
    if isinstance(raw.get("custom"), dict):
        _reject_unknown(raw["custom"], CUSTOM_KEYS, "custom", text)
    if isinstance(raw.get("params"), dict) and raw.get("model") in scenarios.MODELS:
        _, required, optional = scenarios.MODELS[raw["model"]]
        _reject_unknown(raw["params"], required | optional, f"params of model {raw['model']}", text)
    for key in ("name", "model", "tau", "dt", "initial_state"):
        if key not in raw:
            raise ValidationError(key, "required")
    kwargs = dict(raw)
    for key in ("fidelities", "bounds", "d_functionals"):
        if key in kwargs:
            if not isinstance(kwargs[key], list):
                raise ValidationError(key, "must be a list")
            kwargs[key] = tuple(kwargs[key])
    try:
        kwargs["params"] = {k: float(v) for k, v in dict(kwargs.get("params", {})).items()}
        for key in ("tau", "dt", "hbar"):
            if key in kwargs:
                kwargs[key] = float(kwargs[key])
    except (TypeError, ValueError) as exc:
        raise ValidationError("params", f"numeric value expected: {exc}") from exc
    return check(ScenarioConfig(**kwargs, base_dir=str(base_dir)))


def check(cfg: ScenarioConfig) -> ScenarioConfig:
    """Validate field values; returns the config unchanged."""
    if not isinstance(cfg.name, str) or not re.fullmatch(r"[\w.=+-]+", cfg.name):
        raise ValidationError("name", "use letters, digits and _.=+- only")
    if cfg.model not in MODEL_NAMES:
        raise ValidationError("model", f"expected one of {list(MODEL_NAMES)}, got {cfg.model!r}")
    if not isinstance(cfg.dim, int) or cfg.dim < 1:
        raise ValidationError("dim", "positive integer expected")
    if cfg.model != "custom_matrices" and cfg.dim != 2:
        raise ValidationError("dim", f"model {cfg.model} is a qubit model (dim 2)")
    for key in ("tau", "dt", "hbar"):
        if not getattr(cfg, key) > 0:
            raise ValidationError(key, "must be positive")
    try:
        step_count(cfg.tau, cfg.dt)
    except InvalidInput as exc:
        raise ValidationError("dt", str(exc)) from exc
    for key, value in cfg.params.items():
        if not value >= 0:
            raise ValidationError(f"params.{key}", "must be non-negative")
    if cfg.model in scenarios.MODELS:
        _, required, optional = scenarios.MODELS[cfg.model]
        for key in required - set(cfg.params):
            raise ValidationError(f"params.{key}", f"required by model {cfg.model}")
        for key in set(cfg.params) - required - optional:
            raise ValidationError(f"params.{key}", f"not a parameter of model {cfg.model}")
    elif cfg.params:
        raise ValidationError("params", "custom_matrices takes operators from [custom], not params")
    for key, parse in (("fidelities", FidelityKind.parse), ("bounds", BoundKind.parse)):
        for name in getattr(cfg, key):
            try:
                parse(name)
            except UnknownName as exc:
                raise ValidationError(key, str(exc)) from None
    for name in cfg.d_functionals:
        if name not in D_FUNCTIONALS:
            raise ValidationError("d_functionals", f"unknown functional {name!r}")
    if cfg.shift not in ("per_instant", "global"):
        raise ValidationError("shift", "per_instant or global")
    if cfg.energy_measure not in ("expectation", "trace_norm"):
        raise ValidationError("energy_measure", "expectation or trace_norm")
    if cfg.quadrature not in ("trapezoid", "simpson"):
        raise ValidationError("quadrature", "trapezoid or simpson")
    _check_state_block(cfg)
    if cfg.model == "custom_matrices":
        _check_custom_block(cfg)
    return cfg


def _check_state_block(cfg: ScenarioConfig) -> None:
    block = cfg.initial_state
    if not isinstance(block, dict):
        raise ValidationError("initial_state", "must be a table")
    chosen = [k for k in ("pure", "spectrum", "file", "random_rank") if k in block]
    if len(chosen) != 1:
        raise ValidationError("initial_state", "give exactly one of pure, spectrum, file, random_rank")
    if "basis" in block and chosen != ["spectrum"]:
        raise ValidationError("initial_state.basis", "only valid together with spectrum")
    if "file" in block:
        _existing(cfg, block["file"], "initial_state.file")


def _check_custom_block(cfg: ScenarioConfig) -> None:
    custom = cfg.custom
    if not custom.get("hamiltonian") and not custom.get("jumps"):
        raise ValidationError("custom", "give a hamiltonian file and/or jumps")
    if custom.get("hamiltonian"):
        _existing(cfg, custom["hamiltonian"], "custom.hamiltonian")
    for i, jump in enumerate(custom.get("jumps", [])):
        if not isinstance(jump, dict) or set(jump) != {"file", "rate"}:
            raise ValidationError(f"custom.jumps[{i}]", "needs exactly file and rate")
        _existing(cfg, jump["file"], f"custom.jumps[{i}].file")
        if not float(jump["rate"]) >= 0:
            raise ValidationError(f"custom.jumps[{i}].rate", "must be non-negative")


def _existing(cfg: ScenarioConfig, name: str, field_name: str) -> Path:
    p = Path(cfg.base_dir) / name
    if not p.is_file():
        raise ValidationError(field_name, f"file not found: {p}")
    return p


# ----------------------------------------------------------------------
# From config to physics objects
# ----------------------------------------------------------------------


def parse_complex(value) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def load_matrix(path: Path) -> np.ndarray:
    """Operator or state from ``.npy`` or ``.json`` ({"real": ..., "imag": ...} or entry lists)."""
    if path.suffix == ".npy":
        return np.asarray(np.load(path), dtype=np.complex128)
    data = json.loads(path.read_text())
    if isinstance(data, dict):
        real = np.asarray(data["real"], dtype=float)
        return real + 1j * np.asarray(data.get("imag", np.zeros_like(real)), dtype=float)
    return np.vectorize(parse_complex, otypes=[np.complex128])(np.asarray(data, dtype=object))


def _entries(values) -> np.ndarray:
    return np.array([parse_complex(v) for v in values], dtype=np.complex128)


def build_initial_state(cfg: ScenarioConfig) -> np.ndarray:
    block = cfg.initial_state
    d = cfg.dim
    try:
        if "pure" in block:
            v = _entries(block["pure"])
            if v.shape != (d,):
                raise ValidationError("initial_state.pure", f"expected {d} amplitudes")
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValidationError("initial_state.pure", "vector is not normalized")
            return np.outer(v, v.conj())
        if "spectrum" in block:
            p = np.asarray(block["spectrum"], dtype=float)
            if p.shape != (d,):
                raise ValidationError("initial_state.spectrum", f"expected {d} weights")
            V = np.eye(d, dtype=np.complex128)
            if "basis" in block:
                V = np.array([_entries(col) for col in block["basis"]]).T
                if V.shape != (d, d) or not np.allclose(V.conj().T @ V, np.eye(d), atol=1e-10):
                    raise ValidationError("initial_state.basis", "columns must form an orthonormal basis")
            return validate((V * p) @ V.conj().T).mat
        if "random_rank" in block:
            return random_density(d, int(block["random_rank"]), cfg.seed).mat
        M = load_matrix(Path(cfg.base_dir) / block["file"])
        if M.ndim == 1:
            M = np.outer(M, M.conj())
        return validate(M).mat
    except InvalidInput as exc:
        raise ValidationError("initial_state", str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ValidationError("initial_state", f"malformed entries: {exc}") from exc


def build_generator(cfg: ScenarioConfig) -> LindbladSpec | HamiltonianSpec:
    if cfg.model in scenarios.MODELS:
        factory = scenarios.MODELS[cfg.model][0]
        return factory(**cfg.params)
    base = Path(cfg.base_dir)
    try:
        H = None
        if cfg.custom.get("hamiltonian"):
            H = HamiltonianSpec.constant(load_matrix(base / cfg.custom["hamiltonian"]))
        jumps = [(load_matrix(base / j["file"]), float(j["rate"])) for j in cfg.custom.get("jumps", [])]
        if not jumps:
            return H
        return LindbladSpec(cfg.dim, hamiltonian=H, jumps=jumps)
    except InvalidInput as exc:
        raise ValidationError("custom", str(exc)) from exc
