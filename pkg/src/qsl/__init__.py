"""Quantum speed limit bounds for closed and open systems under generalized fidelities."""

__version__ = "0.1.0"

from ._accel import BACKEND
from .bounds import (
    BoundKind,
    BoundReport,
    avg_energy,
    b_alternative,
    b_bures,
    b_operator,
    b_super,
    build_report,
    ml_hamiltonian_bound,
    tau_qsl,
    time_average,
    unified_bound,
)
from .dfunc import DFunctional, builtin_d, verify_chain_identity, verify_independence
from .dynamics import HamiltonianSpec, LindbladSpec, Trajectory, evolve, lindblad_rhs, von_neumann_rhs
from .fidelity import (
    FidelityKind,
    alternative_fidelity,
    bures,
    bures_pure,
    fidelity_series,
    operator_fidelity,
    rate_bound_alternative,
    rate_bound_operator,
    rate_bound_super,
    super_fidelity,
)
from .states import DensityMatrix, PureState, density_from_pure, purity, random_density, validate

__all__ = [name for name in dir() if not name.startswith("_")]
