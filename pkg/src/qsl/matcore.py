"""Dense complex-matrix primitives.

Matrices are plain ``numpy.ndarray`` of dtype complex128. Eigen- and singular
value problems are delegated to LAPACK through numpy; this module adds the
checks (Hermiticity, positivity, finiteness) and the clamping conventions the
rest of the package relies on.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimMismatch, InvalidInput, NotHermitian, NotPSD, NumericalFailure

HERMITICITY_TOL = 1e-10
CLAMP_TOL = 1e-10


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns, unitary


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a square, finite complex128 array."""
    A = np.asarray(getattr(M, "mat", M), dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InvalidInput(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput(f"{name} has non-finite entries")
    return A


def dagger(A: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(A, -1, -2))


def hermiticity_error(M: np.ndarray) -> float:
    return float(np.max(np.abs(M - dagger(M))))


def hermitian_eig(M, hermiticity_tol: float = HERMITICITY_TOL) -> HermitianEigen:
    A = as_matrix(M)
    err = hermiticity_error(A)
    if err > hermiticity_tol:
        raise NotHermitian("matrix is not Hermitian", err)
    A = 0.5 * (A + dagger(A))
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalFailure(f"eigendecomposition did not converge: {exc}") from exc
    return HermitianEigen(w, V)


def sqrtm_psd(M, clamp_tol: float = CLAMP_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-clamp_tol, 0)`` are treated as round-off and set to
    zero; anything more negative raises :class:`NotPSD`. Eigenvalues below the
    eigensolver's own resolution are zeroed too, since their square roots
    would otherwise inject ~1e-8 noise into rank-deficient inputs.
    """
    w, V = hermitian_eig(M)
    if w[0] < -clamp_tol:
        raise NotPSD("matrix has a negative eigenvalue", -w[0])
    floor = 4 * w.size * np.finfo(float).eps * max(abs(w[0]), abs(w[-1]))
    root = (V * np.sqrt(np.where(w > floor, w, 0.0))) @ dagger(V)
    return 0.5 * (root + dagger(root))


def singular_values(M) -> np.ndarray:
    """Singular values, descending."""
    A = as_matrix(M)
    try:
        return np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc


def norm_op(M) -> float:
    return float(singular_values(M)[0])


def norm_tr(M) -> float:
    return float(np.sum(singular_values(M)))


def norm_hs(M) -> float:
    s = singular_values(M)
    return float(np.sqrt(np.sum(s * s)))


NORMS = {"op": norm_op, "tr": norm_tr, "hs": norm_hs}


def trace_product(A, B) -> complex:
    """Tr(AB) as sum_ij A_ij B_ji, without forming AB."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise DimMismatch(f"shapes {A.shape} and {B.shape} differ")
    return complex(np.sum(A * B.T))


def tensor(A, B) -> np.ndarray:
    return np.kron(as_matrix(A, "A"), as_matrix(B, "B"))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """exp(-iH) for a random Hermitian H, built from its eigendecomposition."""
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    w, V = hermitian_eig(0.5 * (G + dagger(G)))
    return (V * np.exp(-1j * w)) @ dagger(V)
