"""Monotone fidelity functionals and the checks that the bounds ignore them.

A functional ``D`` maps ``[0, 1]`` to the reals, strictly decreasing, with a
differentiable inverse. Composing a fidelity series with ``D``, bounding the
derivative of ``D^-1(D(F))`` and integrating gives a speed-limit time;
:func:`verify_independence` carries out that route for several ``D`` and
compares with the direct ``(1 - F(tau)) / B(tau)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .bounds import BoundKind, ingredients, tau_qsl, time_average
from .dynamics import Trajectory
from .errors import DomainExit, InvalidInput, UnknownName
from .fidelity import FidelitySeries

Fn = Callable[[np.ndarray], np.ndarray]

ENDPOINT_TOL = 1e-6
MAX_SLOPE = 1e6
INDEPENDENCE_RTOL = 1e-9


@dataclass(frozen=True)
class DFunctional:
    name: str
    forward: Fn
    inverse: Fn
    derivative: Fn

    def __call__(self, x):
        return self.forward(np.asarray(x, dtype=float))

    def inverse_derivative(self, y):
        """d D^-1 / dy, through the inverse function theorem."""
        return 1.0 / self.derivative(self.inverse(np.asarray(y, dtype=float)))


def _arccos_sqrt(name: str) -> DFunctional:
    return DFunctional(
        name,
        forward=lambda x: np.arccos(np.sqrt(np.clip(x, 0.0, 1.0))),
        inverse=lambda y: np.cos(y) ** 2,
        derivative=lambda x: -0.5 / np.sqrt(x * (1.0 - x)),
    )


_E1 = np.exp(-1.0)

BUILTIN = {
    # arccos sqrt(F); applied to the super-fidelity it is the modified angle
    "bures_angle": _arccos_sqrt("bures_angle"),
    "modified_angle": _arccos_sqrt("modified_angle"),
    "linear": DFunctional(
        "linear",
        forward=lambda x: 1.0 - x,
        inverse=lambda y: 1.0 - y,
        derivative=lambda x: -np.ones_like(x),
    ),
    "exponential": DFunctional(
        "exponential",
        forward=lambda x: np.exp(-x) - _E1,
        inverse=lambda y: -np.log(y + _E1),
        derivative=lambda x: -np.exp(-x),
    ),
}


def builtin_d(name: str) -> DFunctional:
    try:
        return BUILTIN[name]
    except KeyError:
        raise UnknownName(f"unknown D-functional {name!r}; expected one of {sorted(BUILTIN)}") from None


@dataclass(frozen=True)
class AdmissibilityReport:
    name: str
    strictly_decreasing: bool
    negative_derivative: bool
    max_round_trip: float

    @property
    def ok(self) -> bool:
        return self.strictly_decreasing and self.negative_derivative and self.max_round_trip <= 1e-10


def check_admissible(D: DFunctional, step: float = 1e-3, margin: float = 1e-6) -> AdmissibilityReport:
    """Sweep the invariants on a grid over [0, 1]; round trip and slope skip the endpoints."""
    x = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    y = D(x)
    inner = x[(x >= margin) & (x <= 1.0 - margin)]
    return AdmissibilityReport(
        D.name,
        strictly_decreasing=bool(np.all(np.diff(y) < 0)),
        negative_derivative=bool(np.all(D.derivative(inner) < 0)),
        max_round_trip=float(np.max(np.abs(D.inverse(D(inner)) - inner))),
    )


# ----------------------------------------------------------------------
# Chain identity
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ChainCheck:
    max_residual: float
    evaluated: int
    excluded_times: np.ndarray

    def __float__(self) -> float:
        return self.max_residual


def verify_chain_identity(
    D: DFunctional,
    series: FidelitySeries,
    fd_step: float = 1e-4,
    route: str = "composition",
    endpoint_tol: float = ENDPOINT_TOL,
    max_slope: float = MAX_SLOPE,
) -> ChainCheck:
    """Compare d/dt D^-1(D(F(t))) against dF/dt by central differences.

    The series is interpolated with a cubic spline so ``fd_step`` need not be a
    multiple of the grid step. ``route="composition"`` differentiates the
    composed function directly; ``route="chain_rule"`` forms
    ``(D^-1)'(D(F)) * d/dt D(F)``, whose residual carries the O(fd_step^2)
    truncation error of the two difference quotients. Interior grid points
    whose stencil comes within ``endpoint_tol`` of 0 or 1, or where
    ``|D'(F)| > max_slope``, are skipped and reported.
    """
    t = np.asarray(series.times, dtype=float)
    F = np.asarray(series.values, dtype=float)
    out = (F < -1e-9) | (F > 1 + 1e-9)
    if np.any(out):
        i = int(np.argmax(out))
        raise DomainExit(f"fidelity {F[i]!r} leaves [0, 1]", i)
    if route not in ("composition", "chain_rule"):
        raise InvalidInput(f"unknown route {route!r}")
    spline = CubicSpline(t, F)
    h = fd_step
    inside = (t - h >= t[0]) & (t + h <= t[-1])
    tc = t[inside]
    f_minus, f_mid, f_plus = spline(tc - h), spline(tc), spline(tc + h)
    stencil = np.stack([f_minus, f_mid, f_plus])
    near_edge = np.any((stencil < endpoint_tol) | (stencil > 1.0 - endpoint_tol), axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        steep = ~(np.abs(D.derivative(np.clip(f_mid, 0.0, 1.0))) <= max_slope)
    keep = ~(near_edge | steep)
    tk = tc[keep]
    fm, f0, fp = f_minus[keep], f_mid[keep], f_plus[keep]
    direct = (fp - fm) / (2 * h)
    if route == "composition":
        via_d = (D.inverse(D(fp)) - D.inverse(D(fm))) / (2 * h)
    else:
        via_d = D.inverse_derivative(D(f0)) * (D(fp) - D(fm)) / (2 * h)
    residual = np.abs(via_d - direct)
    return ChainCheck(
        max_residual=float(residual.max()) if residual.size else 0.0,
        evaluated=int(tk.size),
        excluded_times=tc[~keep],
    )


# ----------------------------------------------------------------------
# D-independence of the speed-limit time
# ----------------------------------------------------------------------


def d_mediated_tau(D: DFunctional, series: FidelitySeries, samples, dt: float, method: str = "trapezoid") -> float:
    """Integrate -d/dt D^-1(D(F)) <= B(t) over the grid and solve for tau.

    The left side is integrated step by step on the transformed series; the
    steps telescope to D^-1(D(F(0))) - D^-1(D(F(tau))).
    """
    recovered = D.inverse(D(np.asarray(series.values, dtype=float)))
    drop = float(-np.sum(np.diff(recovered)))
    B = time_average(samples, dt, method)
    # same degenerate-case conventions as the direct formula
    return tau_qsl(1.0 - drop, B)


@dataclass
class IndependenceReport:
    kind: BoundKind
    d_free: float
    per_d: dict[str, float] = field(default_factory=dict)

    @property
    def spread(self) -> float:
        """Largest relative deviation of a D-mediated value from the D-free one."""
        if not self.per_d:
            return 0.0
        scale = max(abs(self.d_free), 1e-300)
        return max(abs(v - self.d_free) for v in self.per_d.values()) / scale

    @property
    def ok(self) -> bool:
        return self.d_free == 0.0 and all(v == 0.0 for v in self.per_d.values()) or self.spread <= INDEPENDENCE_RTOL

    def as_dict(self) -> dict:
        return {"d_free": self.d_free, "per_d": dict(self.per_d), "spread": self.spread, "ok": self.ok}


def verify_independence(D_set: Sequence[DFunctional | str], traj: Trajectory, kind, method: str = "trapezoid", **kw) -> IndependenceReport:
    kind = BoundKind.parse(kind)
    funcs = [builtin_d(d) if isinstance(d, str) else d for d in D_set]
    if not funcs:
        raise InvalidInput("need at least one D-functional")
    series, samples = ingredients(kind, traj, **kw)
    B = time_average(samples, traj.dt, method)
    report = IndependenceReport(kind, tau_qsl(float(series.values[-1]), B))
    for D in funcs:
        report.per_d[D.name] = d_mediated_tau(D, series, samples, traj.dt, method)
    return report
