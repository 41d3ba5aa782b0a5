"""Von Neumann and Lindblad evolution on a uniform time grid."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels, matcore
from .errors import DimMismatch, DriftExceeded, InvalidInput, NotHermitian, StepMismatch
from .states import RELAXED_TOL, DensityMatrix, validate


@dataclass(frozen=True)
class HamiltonianSpec:
    """Time-dependent Hamiltonian ``t -> H_t`` in energy units."""

    dim: int
    evaluator: Callable[[float], np.ndarray]
    fixed: np.ndarray | None = field(default=None, repr=False)  # set for time-independent H

    @classmethod
    def constant(cls, H) -> "HamiltonianSpec":
        H = matcore.as_matrix(H, "H")
        err = matcore.hermiticity_error(H)
        if err > 1e-10:
            raise NotHermitian("H is not Hermitian", err)
        H.setflags(write=False)
        return cls(H.shape[0], lambda t: H, fixed=H)

    def samples(self, times) -> np.ndarray:
        """H at each time, stacked as (n, d, d); checked once when constant."""
        times = np.asarray(times, dtype=float)
        if self.fixed is not None:
            return np.ascontiguousarray(np.broadcast_to(self.fixed, (times.size, self.dim, self.dim)))
        return np.stack([self(float(t)) for t in times])

    def __call__(self, t: float) -> np.ndarray:
        H = matcore.as_matrix(self.evaluator(t), "H")
        if H.shape[0] != self.dim:
            raise DimMismatch(f"H(t={t}) has dim {H.shape[0]}, expected {self.dim}")
        err = matcore.hermiticity_error(H)
        if err > 1e-10:
            raise NotHermitian(f"H(t={t}) is not Hermitian", err)
        return H


@dataclass(frozen=True)
class LindbladSpec:
    """Hamiltonian part plus jump operators with constant non-negative rates."""

    dim: int
    hamiltonian: HamiltonianSpec | None = None
    jumps: Sequence[tuple[np.ndarray, float]] = field(default_factory=tuple)

    def __post_init__(self):
        checked = []
        for A, rate in self.jumps:
            A = matcore.as_matrix(A, "jump operator")
            if A.shape[0] != self.dim:
                raise DimMismatch(f"jump operator has dim {A.shape[0]}, expected {self.dim}")
            if not rate >= 0:
                raise InvalidInput(f"jump rate must be non-negative, got {rate}")
            checked.append((A, float(rate)))
        object.__setattr__(self, "jumps", tuple(checked))
        if self.hamiltonian is not None and self.hamiltonian.dim != self.dim:
            raise DimMismatch("Hamiltonian dim does not match")

    @property
    def is_unitary(self) -> bool:
        return all(rate == 0.0 for _, rate in self.jumps)

    def _jump_arrays(self):
        d = self.dim
        if not self.jumps:
            z = np.zeros((0, d, d), dtype=np.complex128)
            return z, z, z, np.zeros(0)
        A = np.ascontiguousarray(np.stack([a for a, _ in self.jumps]))
        Ad = np.ascontiguousarray(matcore.dagger(A))
        return A, Ad, np.ascontiguousarray(Ad @ A), np.array([r for _, r in self.jumps])

    def hamiltonian_at(self, t: float) -> np.ndarray:
        if self.hamiltonian is None:
            return np.zeros((self.dim, self.dim), dtype=np.complex128)
        return self.hamiltonian(t)


def as_lindblad(spec: LindbladSpec | HamiltonianSpec) -> LindbladSpec:
    if isinstance(spec, HamiltonianSpec):
        return LindbladSpec(spec.dim, hamiltonian=spec)
    return spec


def hamiltonian_of(spec) -> HamiltonianSpec | None:
    """The Hamiltonian when ``spec`` generates unitary dynamics, else None."""
    if isinstance(spec, HamiltonianSpec):
        return spec
    if isinstance(spec, LindbladSpec) and spec.is_unitary:
        return spec.hamiltonian or HamiltonianSpec.constant(np.zeros((spec.dim, spec.dim)))
    return None


def von_neumann_rhs(H, rho, hbar: float = 1.0) -> np.ndarray:
    """(1/(i hbar)) [H, rho]."""
    H = matcore.as_matrix(H, "H")
    R = matcore.as_matrix(rho, "rho")
    if H.shape != R.shape:
        raise DimMismatch(f"H {H.shape} and rho {R.shape} differ")
    if not hbar > 0:
        raise InvalidInput("hbar must be positive")
    return (H @ R - R @ H) / (1j * hbar)


def lindblad_rhs(spec: LindbladSpec | HamiltonianSpec, rho, t: float = 0.0, hbar: float = 1.0) -> np.ndarray:
    spec = as_lindblad(spec)
    R = matcore.as_matrix(rho, "rho")
    if R.shape[0] != spec.dim:
        raise DimMismatch(f"rho has dim {R.shape[0]}, spec has dim {spec.dim}")
    A, Ad, AdA, rates = spec._jump_arrays()
    return _kernels.lindblad_rhs(spec.hamiltonian_at(t), A, Ad, AdA, rates, R, float(hbar))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States and generator outputs ``L_t(rho_t)`` on a uniform grid ``0..tau``."""

    times: np.ndarray
    states: np.ndarray  # (n+1, d, d)
    derivs: np.ndarray  # (n+1, d, d)
    dt: float
    hbar: float = 1.0
    generator: LindbladSpec | HamiltonianSpec | None = None
    fd_constant: float = 0.0  # max |central FD of states - derivs| / dt^2

    def __len__(self) -> int:
        return len(self.times)

    @property
    def tau(self) -> float:
        return float(self.times[-1])

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def rho0(self) -> np.ndarray:
        return self.states[0]

    def state(self, i: int) -> DensityMatrix:
        return DensityMatrix(self.states[i])


def step_count(tau: float, dt: float) -> int:
    if not (tau > 0 and dt > 0):
        raise StepMismatch(f"tau and dt must be positive (tau={tau}, dt={dt})")
    ratio = tau / dt
    n = int(round(ratio))
    if abs(ratio - n) > 1e-9 * max(1.0, ratio) or n < 2:
        raise StepMismatch(f"tau/dt = {ratio!r} is not an integer >= 2")
    return n


def check_states(states: np.ndarray, derivs: np.ndarray, tol: float = RELAXED_TOL) -> None:
    """Raise DriftExceeded at the first grid point that is not a valid state."""
    herm = np.max(np.abs(states - matcore.dagger(states)), axis=(1, 2))
    trace_dev = np.abs(np.trace(states, axis1=1, axis2=2).real - 1.0)
    min_eig = _kernels.min_eigvals(np.ascontiguousarray(states))
    deriv_trace = np.abs(np.trace(derivs, axis1=1, axis2=2))
    bad = (herm > tol) | (trace_dev > tol) | (min_eig < -tol) | (deriv_trace > 1e-9)
    if np.any(bad):
        i = int(np.argmax(bad))
        try:
            validate(states[i], tol)
            cause = None
        except InvalidInput as exc:
            cause = exc
        what = str(cause) if cause else f"generator trace {deriv_trace[i]:.3e}"
        raise DriftExceeded(f"state left the density-matrix set: {what}", i, cause)


def evolve(
    spec: LindbladSpec | HamiltonianSpec,
    rho0,
    tau: float,
    dt: float,
    hbar: float = 1.0,
    tol: float = RELAXED_TOL,
) -> Trajectory:
    """Fixed-step classical RK4. No renormalization; drift beyond ``tol`` raises."""
    lind = as_lindblad(spec)
    R0 = matcore.as_matrix(rho0, "rho0")
    if R0.shape[0] != lind.dim:
        raise DimMismatch(f"rho0 has dim {R0.shape[0]}, spec has dim {lind.dim}")
    validate(R0, tol)
    if not hbar > 0:
        raise InvalidInput("hbar must be positive")
    n = step_count(tau, dt)
    dt = tau / n
    half_grid = np.linspace(0.0, tau, 2 * n + 1)
    if lind.hamiltonian is None:
        hams = np.zeros((2 * n + 1, lind.dim, lind.dim), dtype=np.complex128)
    else:
        hams = lind.hamiltonian.samples(half_grid)
    A, Ad, AdA, rates = lind._jump_arrays()
    states, derivs = _kernels.rk4_evolve(
        hams, A, Ad, AdA, rates, np.ascontiguousarray(R0), float(dt), n, float(hbar)
    )
    check_states(states, derivs, tol)
    fd = (states[2:] - states[:-2]) / (2 * dt) - derivs[1:-1]
    fd_constant = float(np.max(np.abs(fd)) / dt**2) if n >= 2 else 0.0
    states.setflags(write=False)
    derivs.setflags(write=False)
    return Trajectory(
        times=half_grid[::2].copy(),
        states=states,
        derivs=derivs,
        dt=dt,
        hbar=float(hbar),
        generator=spec,
        fd_constant=fd_constant,
    )
