"""Time-averaged rate bounds and the resulting speed-limit times.

Every bound has the same shape: a fidelity series ``F(t)`` starting at 1 and
an instantaneous bound ``B(t) >= |dF/dt|``. Averaging ``B`` over ``[0, tau]``
gives ``B(tau)`` and the speed-limit time is ``(1 - F(tau)) / B(tau)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import _kernels
from .dynamics import HamiltonianSpec, Trajectory, check_states, hamiltonian_of
from .errors import (
    InvalidInput,
    MixedInitialState,
    QSLError,
    TooFewSamples,
    ZeroDenominator,
    ZeroEnergy,
)
from .fidelity import (
    FidelityKind,
    FidelitySeries,
    _guarded_ratio,
    _mixedness,
    fidelity_series,
    rate_bound_series,
    trace_data,
)
from .states import is_pure

ZERO_TOL = 1e-12
VALIDITY_RTOL = 1e-6
NORM_COLUMNS = {"op": 0, "tr": 1, "hs": 2}


class BoundKind(str, enum.Enum):
    BURES_ML_OP = "BuresMLop"
    BURES_ML_TR = "BuresMLtr"
    BURES_MT_HS = "BuresMThs"
    BURES_ML_HAMILTONIAN = "BuresMLHamiltonian"
    SUPER_ML_OP = "SuperMLop"
    SUPER_ML_TR = "SuperMLtr"
    SUPER_MT_HS = "SuperMThs"
    OPERATOR_MT = "OperatorMT"
    ALTERNATIVE_MT = "AlternativeMT"

    @property
    def fidelity(self) -> FidelityKind:
        for kind in FidelityKind:
            if self.value.startswith(kind.value):
                return kind
        raise AssertionError(self)

    @property
    def norm(self) -> str | None:
        tail = self.value[-2:]
        return tail if tail in NORM_COLUMNS and self.value[-4:-2] in ("ML", "MT") else None

    @classmethod
    def parse(cls, name) -> "BoundKind":
        if isinstance(name, cls):
            return name
        for kind in cls:
            if kind.value.lower() == str(name).lower():
                return kind
        from .errors import UnknownName

        raise UnknownName(f"unknown bound {name!r}; expected one of {[k.value for k in cls]}")


# ----------------------------------------------------------------------
# Quadrature and the generic assembly
# ----------------------------------------------------------------------


def time_average(samples, dt: float, method: str = "trapezoid") -> float:
    """(1/tau) * integral over the uniform grid spanned by ``samples``."""
    y = np.asarray(samples, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise TooFewSamples(f"need at least 2 samples, got {y.size}")
    tau = dt * (y.size - 1)
    if method == "trapezoid":
        total = integrate.trapezoid(y, dx=dt)
    elif method == "simpson":
        total = integrate.simpson(y, dx=dt)
    else:
        raise InvalidInput(f"unknown quadrature {method!r}")
    return float(total / tau)


def tau_qsl(F_tau: float, B_tau: float) -> float:
    if not -1e-9 <= F_tau <= 1 + 1e-9:
        raise InvalidInput(f"F(tau) = {F_tau!r} lies outside [0, 1]")
    if B_tau < 0:
        raise InvalidInput(f"B(tau) = {B_tau!r} is negative")
    gap = max(1.0 - F_tau, 0.0)
    if B_tau < ZERO_TOL:
        if gap < ZERO_TOL:
            return 0.0
        raise ZeroDenominator(f"B(tau) = {B_tau:.3e} vanishes while 1 - F(tau) = {gap:.3e}")
    return gap / B_tau


def is_valid(value: float, tau: float) -> bool:
    return value <= tau + VALIDITY_RTOL * tau


# ----------------------------------------------------------------------
# Per-kind integrands
# ----------------------------------------------------------------------


def _require_pure(traj: Trajectory, what: str) -> None:
    if not is_pure(traj.rho0):
        raise MixedInitialState(f"{what} assumes a pure initial state")


def _norm_samples(traj: Trajectory, norm: str) -> np.ndarray:
    if norm not in NORM_COLUMNS:
        raise InvalidInput(f"norm must be one of {list(NORM_COLUMNS)}, got {norm!r}")
    return _kernels.schatten_norms(np.ascontiguousarray(traj.derivs))[:, NORM_COLUMNS[norm]]


def super_factor(traj: Trajectory, td=None) -> np.ndarray:
    """1 + sqrt((1 - Tr rho0^2) / (1 - Tr rho_t^2)) at each grid point."""
    td = td or trace_data(traj)
    return 1.0 + _guarded_ratio(np.full(len(traj), td.m0), _mixedness(td.pt), td.trtd, "super-fidelity factor")


def shifted_hamiltonians(traj: Trajectory, H: HamiltonianSpec, shift: str = "per_instant") -> np.ndarray:
    """H_t - lambda_min * I, shifting per grid point or by the global minimum."""
    Hs = H.samples(traj.times)
    lam = np.linalg.eigvalsh(Hs)[:, 0]
    if shift == "global":
        lam = np.full_like(lam, lam.min())
    elif shift != "per_instant":
        raise InvalidInput(f"unknown shift policy {shift!r}")
    return Hs - lam[:, None, None] * np.eye(traj.dim)


def energy_samples(
    traj: Trajectory,
    H: HamiltonianSpec | None = None,
    shift: str = "per_instant",
    measure: str = "expectation",
) -> np.ndarray:
    """<H_t> along the trajectory after the positivity shift.

    ``measure="expectation"`` gives Tr(H~ rho); ``"trace_norm"`` gives the
    (never smaller) Tr|H~ rho|.
    """
    H = H or hamiltonian_of(traj.generator)
    if H is None:
        raise InvalidInput("energy average needs a Hamiltonian (non-unitary trajectory given)")
    Ht = shifted_hamiltonians(traj, H, shift)
    if measure == "expectation":
        return np.real(np.einsum("ijk,ikj->i", Ht, traj.states))
    if measure == "trace_norm":
        return _kernels.schatten_norms(np.ascontiguousarray(Ht @ traj.states))[:, 1]
    raise InvalidInput(f"unknown energy measure {measure!r}")


def avg_energy(traj: Trajectory, H=None, shift: str = "per_instant", measure: str = "expectation") -> float:
    return time_average(energy_samples(traj, H, shift, measure), traj.dt)


def integrand(kind, traj: Trajectory, *, H=None, shift="per_instant", energy_measure="expectation") -> np.ndarray:
    """Instantaneous B(t) for ``kind`` on every grid point."""
    kind = BoundKind.parse(kind)
    fid = kind.fidelity
    if fid is FidelityKind.BURES:
        _require_pure(traj, kind.value)
        if kind is BoundKind.BURES_ML_HAMILTONIAN:
            if H is None and hamiltonian_of(traj.generator) is None:
                raise InvalidInput(f"{kind.value} needs Hamiltonian-only dynamics")
            return 2.0 * energy_samples(traj, H, shift, energy_measure) / traj.hbar
        return _norm_samples(traj, kind.norm)
    if fid is FidelityKind.SUPER:
        return _norm_samples(traj, kind.norm) * super_factor(traj)
    return rate_bound_series(fid, traj)


def ingredients(kind, traj: Trajectory, **kw) -> tuple[FidelitySeries, np.ndarray]:
    """(fidelity series, integrand samples) for one bound kind."""
    kind = BoundKind.parse(kind)
    samples = integrand(kind, traj, **kw)
    return fidelity_series(kind.fidelity, traj), samples


# ----------------------------------------------------------------------
# Named bounds
# ----------------------------------------------------------------------


def b_bures(traj: Trajectory, norm: str = "op", method: str = "trapezoid") -> float:
    _require_pure(traj, "Bures bound")
    return time_average(_norm_samples(traj, norm), traj.dt, method)


def b_super(traj: Trajectory, norm: str = "op", method: str = "trapezoid") -> float:
    return time_average(_norm_samples(traj, norm) * super_factor(traj), traj.dt, method)


def b_operator(traj: Trajectory, method: str = "trapezoid") -> float:
    return time_average(rate_bound_series(FidelityKind.OPERATOR, traj), traj.dt, method)


def b_alternative(traj: Trajectory, method: str = "trapezoid") -> float:
    return time_average(rate_bound_series(FidelityKind.ALTERNATIVE, traj), traj.dt, method)


def ml_hamiltonian_bound(
    traj: Trajectory,
    H: HamiltonianSpec | None = None,
    hbar: float | None = None,
    shift: str = "per_instant",
    energy_measure: str = "expectation",
) -> float:
    """hbar (1 - F_B(tau)) / (2 E_tau) for unitary dynamics from a pure state."""
    _require_pure(traj, "Hamiltonian ML bound")
    H = H or hamiltonian_of(traj.generator)
    if H is None:
        raise InvalidInput("Hamiltonian ML bound needs Hamiltonian-only dynamics")
    hbar = traj.hbar if hbar is None else hbar
    F = fidelity_series(FidelityKind.BURES, traj).values[-1]
    E = avg_energy(traj, H, shift, energy_measure)
    gap = max(1.0 - F, 0.0)
    if E < 1e-14:
        if gap < ZERO_TOL:
            return 0.0
        raise ZeroEnergy(f"time-averaged energy {E:.3e} vanishes while 1 - F = {gap:.3e}")
    return hbar * gap / (2.0 * E)


# ----------------------------------------------------------------------
# Reports
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class BoundEntry:
    kind: BoundKind
    B_tau: float
    F_tau: float
    tau_qsl: float
    valid: bool

    def as_dict(self) -> dict:
        return {
            "B_tau": self.B_tau,
            "F_tau": self.F_tau,
            "tau_qsl": self.tau_qsl,
            "valid": self.valid,
        }


@dataclass
class BoundReport:
    tau: float
    entries: dict[BoundKind, BoundEntry] = field(default_factory=dict)
    skipped: dict[BoundKind, str] = field(default_factory=dict)
    unified_bures: float | None = None
    unified_super: float | None = None

    @property
    def all_valid(self) -> bool:
        return all(e.valid for e in self.entries.values())

    def as_dict(self) -> dict:
        return {
            "tau": self.tau,
            "entries": {k.value: e.as_dict() for k, e in self.entries.items()},
            "skipped": {k.value: why for k, why in self.skipped.items()},
            "unified_bures": self.unified_bures,
            "unified_super": self.unified_super,
            "all_valid": self.all_valid,
        }


def unified_bound(entries) -> float:
    """The largest (sharpest) of several lower bounds for one fidelity."""
    values = [e.tau_qsl if isinstance(e, BoundEntry) else float(e) for e in entries]
    if not values:
        raise InvalidInput("unified bound needs at least one entry")
    return max(values)


def compute_entry(kind, traj: Trajectory, method: str = "trapezoid", **kw) -> BoundEntry:
    kind = BoundKind.parse(kind)
    series, samples = ingredients(kind, traj, **kw)
    B = time_average(samples, traj.dt, method)
    F = float(series.values[-1])
    value = tau_qsl(F, B)
    return BoundEntry(kind, B, F, value, is_valid(value, traj.tau))


def build_report(traj: Trajectory, kinds=None, method: str = "trapezoid", **kw) -> BoundReport:
    """Evaluate every requested kind; kinds that cannot be formed are skipped with a reason."""
    check_states(traj.states, traj.derivs)
    kinds = list(BoundKind) if kinds is None else [BoundKind.parse(k) for k in kinds]
    report = BoundReport(tau=traj.tau)
    for kind in kinds:
        try:
            report.entries[kind] = compute_entry(kind, traj, method, **kw)
        except QSLError as exc:
            report.skipped[kind] = f"{type(exc).__name__}: {exc}"
    for fid, attr in ((FidelityKind.BURES, "unified_bures"), (FidelityKind.SUPER, "unified_super")):
        family = [e for k, e in report.entries.items() if k.fidelity is fid]
        if family:
            setattr(report, attr, unified_bound(family))
    return report
