"""Density matrices, pure states and random state generation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import BadRank, NotHermitian, NotNormalized, NotPSD, TraceDeviation

STRICT_TOL = 1e-10
RELAXED_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A checked quantum state. Build it with :func:`validate`."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.array(self.mat, dtype=np.complex128)
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        err = abs(np.linalg.norm(v) - 1.0)
        if err > 1e-12:
            raise NotNormalized("state vector is not normalized", err)
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


def validate(M, tol: float = STRICT_TOL) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity; raise with the measured violation."""
    A = matcore.as_matrix(M)
    herm = matcore.hermiticity_error(A)
    if herm > tol:
        raise NotHermitian("matrix is not Hermitian", herm)
    dev = abs(np.trace(A).real - 1.0)
    if dev > tol:
        raise TraceDeviation("trace differs from 1", dev)
    w = np.linalg.eigvalsh(0.5 * (A + matcore.dagger(A)))
    if w[0] < -tol:
        raise NotPSD("matrix has a negative eigenvalue", -w[0])
    return DensityMatrix(A)


def density_from_pure(psi) -> DensityMatrix:
    if not isinstance(psi, PureState):
        psi = PureState(psi)
    v = psi.amplitudes
    return DensityMatrix(np.outer(v, v.conj()))


def purity(rho) -> float:
    A = np.asarray(getattr(rho, "mat", rho))
    return float(np.real(np.sum(A * A.T)))


def is_pure(rho, tol: float = 1e-10) -> bool:
    return purity(rho) >= 1.0 - tol


def leading_vector(rho) -> np.ndarray:
    """Eigenvector of the largest eigenvalue (the state vector when rho is pure)."""
    _, V = matcore.hermitian_eig(np.asarray(getattr(rho, "mat", rho)), hermiticity_tol=1e-8)
    return V[:, -1]


def random_density(dim: int, rank: int | None = None, seed=None) -> DensityMatrix:
    """Ginibre state G G† / Tr(G G†) with G of shape (dim, rank)."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise BadRank(f"rank must lie in [1, {dim}], got {rank}")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = G @ G.conj().T
    rho /= np.trace(rho).real
    return validate(0.5 * (rho + rho.conj().T))


def random_pure(dim: int, seed=None) -> PureState:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v))


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(np.eye(dim) / dim)
