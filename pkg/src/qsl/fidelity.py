"""Bures fidelity, super-fidelity, operator fidelity and the alternative fidelity.

Alongside the measures themselves this module provides the instantaneous
upper bounds on ``|dF/dt|`` that feed the time-averaged speed-limit
quantities in :mod:`qsl.bounds`. Those come in two flavours: scalar functions
of ``(rho0, rho_t, drho_t)`` and vectorized versions over a whole trajectory.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels, matcore
from .dynamics import Trajectory
from .errors import DimMismatch, PurityDegenerate, QSLError
from .states import PureState, is_pure, leading_vector

DEGENERATE_TOL = 1e-12


class FidelityKind(str, enum.Enum):
    BURES = "Bures"
    SUPER = "Super"
    OPERATOR = "Operator"
    ALTERNATIVE = "Alternative"

    @classmethod
    def parse(cls, name) -> "FidelityKind":
        if isinstance(name, cls):
            return name
        for kind in cls:
            if kind.value.lower() == str(name).lower():
                return kind
        from .errors import UnknownName

        raise UnknownName(f"unknown fidelity {name!r}; expected one of {[k.value for k in cls]}")


@dataclass(frozen=True, eq=False)
class FidelitySeries:
    kind: FidelityKind
    times: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def _pair(rho, sigma):
    A = matcore.as_matrix(rho, "rho")
    B = matcore.as_matrix(sigma, "sigma")
    if A.shape != B.shape:
        raise DimMismatch(f"states have dims {A.shape[0]} and {B.shape[0]}")
    return A, B


def _overlap(A, B) -> float:
    return float(np.real(np.sum(A * B.T)))


def _mixedness(p):
    """1 - purity, clamped to [0, 1]."""
    return np.clip(1.0 - p, 0.0, 1.0)


def _purity_and_mixedness(A):
    """(Tr A^2, 1 - Tr A^2) from the spectrum, with round-off eigenvalues zeroed.

    The mixedness is summed as sum_i l_i (1 - l_i) with the trace in place of 1,
    so a pure state gives exactly 0 rather than ~1e-16, whose square root
    would otherwise leak ~1e-8 into the super and alternative fidelities.
    """
    w = np.linalg.eigvalsh(A)
    floor = 4 * w.size * np.finfo(float).eps * max(abs(w[0]), abs(w[-1]))
    w = np.where(w > floor, w, 0.0)
    total = np.sum(w)
    return float(np.sum(w * w)), float(np.clip(np.sum(w * (total - w)), 0.0, 1.0))


def bures(rho, sigma) -> float:
    """[Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2.

    The inner trace equals the trace norm of sqrt(rho) sqrt(sigma); taking it
    from singular values avoids a second square root of a nearly singular matrix.
    """
    A, B = _pair(rho, sigma)
    return matcore.norm_tr(matcore.sqrtm_psd(A) @ matcore.sqrtm_psd(B)) ** 2


def bures_pure(psi0, sigma) -> float:
    """<psi0|sigma|psi0>, the Bures fidelity when the first state is pure."""
    if not isinstance(psi0, PureState):
        psi0 = PureState(psi0)
    B = matcore.as_matrix(sigma, "sigma")
    v = psi0.amplitudes
    if v.shape[0] != B.shape[0]:
        raise DimMismatch(f"vector dim {v.shape[0]} vs state dim {B.shape[0]}")
    return float(np.real(v.conj() @ B @ v))


def super_fidelity(rho, sigma) -> float:
    A, B = _pair(rho, sigma)
    (_, ma), (_, mb) = _purity_and_mixedness(A), _purity_and_mixedness(B)
    return float(_overlap(A, B) + np.sqrt(ma) * np.sqrt(mb))


def operator_fidelity(rho, sigma) -> float:
    A, B = _pair(rho, sigma)
    return float(abs(np.sum(A * B.T)) / (np.sqrt(_overlap(A, A)) * np.sqrt(_overlap(B, B))))


def alternative_fidelity(rho, sigma) -> float:
    A, B = _pair(rho, sigma)
    (pa, ma), (pb, mb) = _purity_and_mixedness(A), _purity_and_mixedness(B)
    factor = 1.0 + np.sqrt(ma / pa) * np.sqrt(mb / pb)
    return float(factor * _overlap(A, B))


FIDELITIES = {
    FidelityKind.BURES: bures,
    FidelityKind.SUPER: super_fidelity,
    FidelityKind.OPERATOR: operator_fidelity,
    FidelityKind.ALTERNATIVE: alternative_fidelity,
}


def fidelity(kind, rho, sigma) -> float:
    return FIDELITIES[FidelityKind.parse(kind)](rho, sigma)


# ----------------------------------------------------------------------
# Trajectory-wide quantities
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class _TraceData:
    """Per-grid-point traces shared by the series and the rate bounds."""

    p0: float  # Tr rho0^2
    m0: float  # 1 - Tr rho0^2, from the spectrum
    pt: np.ndarray  # Tr rho_t^2
    trace_t: np.ndarray  # Tr rho_t
    overlap: np.ndarray  # Tr rho0 rho_t
    tr0d: np.ndarray  # Tr rho0 drho_t
    trtd: np.ndarray  # Tr rho_t drho_t
    dd: np.ndarray  # Tr drho_t^2


def trace_data(traj: Trajectory) -> _TraceData:
    S = np.ascontiguousarray(traj.states)
    D = np.ascontiguousarray(traj.derivs)
    rho0 = np.ascontiguousarray(S[0])
    p0, m0 = _purity_and_mixedness(rho0)
    return _TraceData(
        p0=p0,
        m0=m0,
        pt=_kernels.trace_pairs(S, S).real,
        trace_t=np.trace(S, axis1=1, axis2=2).real,
        overlap=_kernels.trace_with(rho0, S).real,
        tr0d=_kernels.trace_with(rho0, D).real,
        trtd=_kernels.trace_pairs(S, D).real,
        dd=_kernels.trace_pairs(D, D).real,
    )


def fidelity_series(kind, traj: Trajectory) -> FidelitySeries:
    kind = FidelityKind.parse(kind)
    td = trace_data(traj)
    if kind is FidelityKind.BURES:
        if is_pure(traj.rho0):
            # Tr(rho0 rho_t) = <psi0|rho_t|psi0> for pure rho0
            values = td.overlap
        else:
            values = np.empty(len(traj))
            for i in range(len(traj)):
                try:
                    values[i] = bures(traj.rho0, traj.states[i])
                except QSLError as exc:
                    exc.index = i
                    raise
    elif kind is FidelityKind.SUPER:
        values = td.overlap + np.sqrt(td.m0) * np.sqrt(_mixedness(td.pt))
    elif kind is FidelityKind.OPERATOR:
        values = np.abs(td.overlap) / (np.sqrt(td.p0) * np.sqrt(td.pt))
    else:
        values = (
            1.0 + np.sqrt(td.m0 / td.p0) * np.sqrt(_mixedness(td.pt) / td.pt)
        ) * td.overlap
    return FidelitySeries(kind, np.array(traj.times), np.asarray(values, dtype=float))


def _guarded_ratio(numer, denom, partner, what: str):
    """sqrt(numer/denom), defined as 0 when denom and (numer or partner) vanish together."""
    numer = np.atleast_1d(np.asarray(numer, dtype=float))
    denom = np.atleast_1d(np.asarray(denom, dtype=float))
    partner = np.atleast_1d(np.asarray(partner, dtype=float))
    numer, denom, partner = np.broadcast_arrays(numer, denom, partner)
    small = denom < DEGENERATE_TOL
    harmless = (numer < DEGENERATE_TOL) | (np.abs(partner) < DEGENERATE_TOL)
    bad = small & ~harmless
    if np.any(bad):
        i = int(np.argmax(bad))
        raise PurityDegenerate(f"{what}: 1 - Tr rho_t^2 = {denom[i]:.3e} vanishes", i)
    out = np.zeros(denom.shape)
    ok = ~small
    out[ok] = np.sqrt(numer[ok] / denom[ok])
    return out


def _super_rate(m0, pt, tr0d, trtd):
    ratio = _guarded_ratio(m0, _mixedness(pt), trtd, "super-fidelity rate")
    return np.abs(tr0d) + ratio * np.abs(trtd)


def _operator_rate(pt, dd):
    return 2.0 * np.sqrt(np.clip(dd, 0.0, None) / pt)


def _alternative_rate(p0, m0, pt, trace_t, overlap, trtd, dd):
    mt = _mixedness(pt)
    inv = _guarded_ratio(np.broadcast_to(m0, np.shape(pt)), mt, trtd, "alternative-fidelity rate")
    term1 = np.sqrt(m0 / p0) * np.sqrt(pt) * inv * np.abs(trtd * overlap / trace_t**2)
    root_dd = np.sqrt(np.clip(dd, 0.0, None))
    term2 = np.sqrt(p0) * root_dd
    term3 = np.sqrt(mt / pt) * np.sqrt(m0) * root_dd
    return term1 + term2 + term3


def _scalars(rho0, rho_t, drho_t):
    R0 = matcore.as_matrix(rho0, "rho0")
    Rt = matcore.as_matrix(rho_t, "rho_t")
    Dt = matcore.as_matrix(drho_t, "drho_t")
    if not (R0.shape == Rt.shape == Dt.shape):
        raise DimMismatch("rho0, rho_t and drho_t must share a dimension")
    return R0, Rt, Dt


def rate_bound_super(rho0, rho_t, drho_t) -> float:
    """Upper bound on |d/dt super_fidelity(rho0, rho_t)|."""
    R0, Rt, Dt = _scalars(rho0, rho_t, drho_t)
    _, m0 = _purity_and_mixedness(R0)
    return float(_super_rate(m0, _overlap(Rt, Rt), _overlap(R0, Dt), _overlap(Rt, Dt))[0])


def rate_bound_operator(rho_t, drho_t) -> float:
    """2 sqrt(Tr drho^2 / Tr rho^2), bounding |d/dt operator_fidelity|."""
    _, Rt, Dt = _scalars(rho_t, rho_t, drho_t)
    return float(_operator_rate(_overlap(Rt, Rt), _overlap(Dt, Dt)))


def rate_bound_alternative(rho0, rho_t, drho_t) -> float:
    """Three-term bound on |d/dt alternative_fidelity(rho0, rho_t)|."""
    R0, Rt, Dt = _scalars(rho0, rho_t, drho_t)
    value = _alternative_rate(
        *_purity_and_mixedness(R0),
        np.array([_overlap(Rt, Rt)]),
        np.array([np.trace(Rt).real]),
        np.array([_overlap(R0, Rt)]),
        np.array([_overlap(Rt, Dt)]),
        np.array([_overlap(Dt, Dt)]),
    )
    return float(value[0])


def rate_bound_series(kind, traj: Trajectory, td: _TraceData | None = None) -> np.ndarray:
    """The rate bound of ``kind`` at every grid point of ``traj``.

    For Bures this is ``||L_t(rho_t)||_op`` (pure rho0), the sharpest of the
    norm bounds.
    """
    kind = FidelityKind.parse(kind)
    td = td or trace_data(traj)
    if kind is FidelityKind.BURES:
        return _kernels.schatten_norms(np.ascontiguousarray(traj.derivs))[:, 0]
    if kind is FidelityKind.SUPER:
        return _super_rate(td.m0, td.pt, td.tr0d, td.trtd)
    if kind is FidelityKind.OPERATOR:
        return _operator_rate(td.pt, td.dd)
    return _alternative_rate(td.p0, td.m0, td.pt, td.trace_t, td.overlap, td.trtd, td.dd)


def pure_vector(rho) -> PureState:
    v = leading_vector(rho)
    return PureState(v / np.linalg.norm(v))
