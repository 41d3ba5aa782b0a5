"""Built-in qubit models and random open-system generators."""

from __future__ import annotations

import numpy as np

from . import matcore
from .dynamics import HamiltonianSpec, LindbladSpec
from .states import density_from_pure, random_density, random_pure

SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
LOWER = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |0><1|
KET0 = np.array([1, 0], dtype=np.complex128)
KET1 = np.array([0, 1], dtype=np.complex128)
PLUS = np.array([1, 1], dtype=np.complex128) / np.sqrt(2)


def _detuning(omega: float) -> HamiltonianSpec | None:
    return HamiltonianSpec.constant(0.5 * omega * SZ) if omega else None


def dephasing(gamma: float, omega: float = 0.0) -> LindbladSpec:
    """gamma (sz rho sz - rho); coherences decay as exp(-2 gamma t)."""
    return LindbladSpec(2, hamiltonian=_detuning(omega), jumps=[(SZ, gamma)])


def amplitude_damping(gamma: float, omega: float = 0.0) -> LindbladSpec:
    """Decay |1> -> |0> at rate gamma."""
    return LindbladSpec(2, hamiltonian=_detuning(omega), jumps=[(LOWER, gamma)])


def depolarizing(gamma: float) -> LindbladSpec:
    """Bloch vector shrinks as exp(-gamma t)."""
    return LindbladSpec(2, jumps=[(SX, gamma / 4), (SY, gamma / 4), (SZ, gamma / 4)])


def rabi_drive(omega: float, gamma: float = 0.0) -> LindbladSpec | HamiltonianSpec:
    """H = omega sx / 2, optionally with amplitude damping."""
    H = HamiltonianSpec.constant(0.5 * omega * SX)
    if gamma == 0.0:
        return H
    return LindbladSpec(2, hamiltonian=H, jumps=[(LOWER, gamma)])


MODELS = {
    "dephasing": (dephasing, {"gamma"}, {"omega"}),
    "amplitude_damping": (amplitude_damping, {"gamma"}, {"omega"}),
    "depolarizing": (depolarizing, {"gamma"}, set()),
    "rabi_drive": (rabi_drive, {"omega"}, {"gamma"}),
}


def _ginibre(dim: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def random_lindblad(dim: int, rng: np.random.Generator, max_rate: float = 2.0, max_jumps: int = 3) -> LindbladSpec:
    """Random Hamiltonian and jump operators, each scaled to unit operator norm."""
    G = _ginibre(dim, rng)
    H = 0.5 * (G + matcore.dagger(G))
    H /= matcore.norm_op(H)
    jumps = []
    for _ in range(int(rng.integers(1, max_jumps + 1))):
        A = _ginibre(dim, rng)
        jumps.append((A / matcore.norm_op(A), float(rng.uniform(0.0, max_rate))))
    return LindbladSpec(dim, hamiltonian=HamiltonianSpec.constant(H), jumps=jumps)


def random_initial_state(dim: int, rng: np.random.Generator, pure: bool) -> np.ndarray:
    seed = int(rng.integers(2**32))
    if pure:
        return density_from_pure(random_pure(dim, seed)).mat
    return random_density(dim, dim, seed).mat
