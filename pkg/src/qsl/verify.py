"""Randomized invariant suite behind ``qsl verify``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bounds, dfunc, matcore, scenarios
from .dynamics import evolve
from .errors import QSLError
from .fidelity import (
    FIDELITIES,
    FidelityKind,
    alternative_fidelity,
    bures,
    fidelity_series,
    operator_fidelity,
    rate_bound_series,
    super_fidelity,
)
from .states import density_from_pure, random_density, random_pure

LEVELS = {
    # pairs, qubit pairs, pure pairs, random scenarios
    "fast": dict(pairs=40, qubit_pairs=20, pure_pairs=20, scenarios=4),
    "full": dict(pairs=200, qubit_pairs=100, pure_pairs=100, scenarios=20),
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    samples: int
    worst: float  # most negative slack, or largest error, depending on the check
    detail: str = ""


def _random_state(rng, dim):
    return random_density(dim, int(rng.integers(1, dim + 1)), int(rng.integers(2**32))).mat


def _random_matrix(rng, dim):
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def _slack_check(name, n, slacks, tol) -> CheckResult:
    worst = float(np.min(slacks))
    return CheckResult(name, worst >= -tol, n, worst)


def _error_check(name, n, errors, tol) -> CheckResult:
    worst = float(np.max(errors))
    return CheckResult(name, worst <= tol, n, worst)


def check_operator_inequalities(rng, n) -> list[CheckResult]:
    hier, vn, cs = [], [], []
    for _ in range(n):
        d = int(rng.integers(2, 6))
        A, B = _random_matrix(rng, d), _random_matrix(rng, d)
        op, hs, tr = matcore.norm_op(A), matcore.norm_hs(A), matcore.norm_tr(A)
        hier.append(min(hs - op, tr - hs))
        sa, sb = matcore.singular_values(A), matcore.singular_values(B)
        vn.append(float(np.dot(sa, sb)) - abs(matcore.trace_product(A, B)))
        cs.append(matcore.norm_hs(A) * matcore.norm_hs(B) - abs(matcore.trace_product(matcore.dagger(A), B)))
    return [
        _slack_check("norm hierarchy op <= hs <= tr", n, hier, 1e-12),
        _slack_check("von Neumann trace inequality", n, vn, 1e-10),
        _slack_check("Cauchy-Schwarz for operators", n, cs, 1e-10),
    ]


def check_fidelity_axioms(rng, n) -> list[CheckResult]:
    sym, rng_err, unit, mult, supmult, dom = [], [], [], [], [], []
    alt_range = []
    for _ in range(n):
        d = int(rng.integers(2, 7))
        rho, sigma = _random_state(rng, d), _random_state(rng, d)
        U = matcore.random_unitary(d, rng)
        for kind, f in FIDELITIES.items():
            v = f(rho, sigma)
            sym.append(abs(v - f(sigma, rho)))
            unit.append(abs(v - f(U @ rho @ U.conj().T, U @ sigma @ U.conj().T)))
            excess = max(-v, v - 1.0, 0.0)
            (alt_range if kind is FidelityKind.ALTERNATIVE else rng_err).append(excess)
        dom.append(super_fidelity(rho, sigma) - bures(rho, sigma))
        d2 = int(rng.integers(2, 4))
        r2, s2 = _random_state(rng, d2), _random_state(rng, d2)
        R, S = matcore.tensor(rho, r2), matcore.tensor(sigma, s2)
        mult.append(abs(bures(R, S) - bures(rho, sigma) * bures(r2, s2)))
        for f in (super_fidelity, alternative_fidelity):
            supmult.append(f(R, S) - f(rho, sigma) * f(r2, s2))
    out = [
        _error_check("symmetry (all four fidelities)", n, sym, 1e-10),
        _error_check("range [0,1] (Bures, Super, Operator)", n, rng_err, 1e-10),
        _error_check("unitary invariance (all four)", n, unit, 1e-9),
        _error_check("Bures multiplicativity under tensor", n, mult, 1e-8),
        _slack_check("super-multiplicativity (Super, Alternative)", n, supmult, 1e-10),
        _slack_check("dominance Bures <= Super", n, dom, 1e-10),
    ]
    worst = float(np.max(alt_range))
    out.append(CheckResult("range [0,1] (Alternative, reported)", True, n, worst,
                           "violation found" if worst > 1e-10 else "no violation"))
    return out


def check_coincidences(rng, n_qubit, n_pure) -> list[CheckResult]:
    qubit, oper, alt = [], [], []
    for _ in range(n_qubit):
        rho, sigma = _random_state(rng, 2), _random_state(rng, 2)
        qubit.append(abs(super_fidelity(rho, sigma) - bures(rho, sigma)))
    for _ in range(n_pure):
        d = int(rng.integers(2, 7))
        psi = density_from_pure(random_pure(d, int(rng.integers(2**32)))).mat
        phi = density_from_pure(random_pure(d, int(rng.integers(2**32)))).mat
        oper.append(abs(operator_fidelity(psi, phi) - bures(psi, phi)))
        sigma = _random_state(rng, d)
        alt.append(abs(alternative_fidelity(psi, sigma) - bures(psi, sigma)))
    return [
        _error_check("qubit: Super == Bures", n_qubit, qubit, 1e-9),
        _error_check("pure pairs: Operator == Bures", n_pure, oper, 1e-9),
        _error_check("pure first state: Alternative == Bures", n_pure, alt, 1e-9),
    ]


def check_bound_validity(rng, n) -> CheckResult:
    worst = -np.inf
    count = 0
    for i in range(n):
        d = int(rng.integers(2, 5))
        spec = scenarios.random_lindblad(d, rng)
        rho0 = scenarios.random_initial_state(d, rng, pure=(i % 2 == 0))
        traj = evolve(spec, rho0, 1.0, 1e-3)
        report = bounds.build_report(traj)
        for e in report.entries.values():
            worst = max(worst, e.tau_qsl - traj.tau)
            count += 1
    return CheckResult("bound validity tau_qsl <= tau", worst <= 1e-6, count, float(worst))


def reference_trajectories(dt: float = 1e-3) -> dict:
    """Dephasing and amplitude damping from pure and mixed states, tau = 1."""
    plus = density_from_pure(scenarios.PLUS).mat
    mixed = np.array([[0.6, 0.3], [0.3, 0.4]], dtype=np.complex128)
    ad_mixed = np.diag([0.75, 0.25]).astype(np.complex128)
    ad_coherent = np.array([[0.3, 0.35], [0.35, 0.7]], dtype=np.complex128)
    return {
        "dephasing/pure": evolve(scenarios.dephasing(1.0), plus, 1.0, dt),
        "dephasing/mixed": evolve(scenarios.dephasing(1.0), mixed, 1.0, dt),
        "amplitude_damping/mixed": evolve(scenarios.amplitude_damping(1.0), ad_mixed, 1.0, dt),
        "amplitude_damping/coherent": evolve(scenarios.amplitude_damping(1.0), ad_coherent, 1.0, dt),
    }


def rate_bound_slack(kind, traj) -> float:
    """min over interior points of rate bound - |central difference of F|."""
    F = fidelity_series(kind, traj).values
    fd = np.abs(F[2:] - F[:-2]) / (2 * traj.dt)
    return float(np.min(rate_bound_series(kind, traj)[1:-1] - fd))


def check_rate_bounds(trajs) -> CheckResult:
    worst = np.inf
    n = 0
    for traj in trajs.values():
        for kind in (FidelityKind.SUPER, FidelityKind.OPERATOR, FidelityKind.ALTERNATIVE):
            worst = min(worst, rate_bound_slack(kind, traj))
            n += 1
    return CheckResult("rate bounds >= |dF/dt| pointwise", worst >= -1e-6, n, float(worst))


def check_independence(trajs) -> CheckResult:
    D_set = [dfunc.builtin_d(n) for n in ("linear", "bures_angle", "modified_angle", "exponential")]
    worst, n = 0.0, 0
    for traj in trajs.values():
        for kind in bounds.BoundKind:
            try:
                res = dfunc.verify_independence(D_set, traj, kind)
            except QSLError:
                continue
            worst = max(worst, res.spread)
            n += 1
    return CheckResult("D-independence (relative spread)", worst <= 1e-9, n, worst)


def verify_suite(level: str = "fast", seed: int = 1, emit: Callable[[str], None] | None = print):
    """Run the randomized suites; returns (exit status, results)."""
    if level not in LEVELS:
        raise ValueError(f"level must be one of {list(LEVELS)}")
    counts = LEVELS[level]
    rng = np.random.default_rng(seed)
    results: list[CheckResult] = []
    results += check_operator_inequalities(rng, counts["pairs"])
    results += check_fidelity_axioms(rng, counts["pairs"])
    results += check_coincidences(rng, counts["qubit_pairs"], counts["pure_pairs"])
    trajs = reference_trajectories()
    results.append(check_rate_bounds(trajs))
    results.append(check_independence(trajs))
    results.append(check_bound_validity(rng, counts["scenarios"]))
    if emit is not None:
        emit(format_table(results, level, seed))
    status = 0 if all(r.passed for r in results) else 1
    return status, results


def format_table(results, level, seed) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"qsl verify --level {level} --seed {seed}", ""]
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        extra = f"  {r.detail}" if r.detail else ""
        lines.append(f"{mark}  {r.name:<{width}}  n={r.samples:<4d} worst={r.worst:+.3e}{extra}")
    failed = sum(not r.passed for r in results)
    lines += ["", f"{len(results) - failed}/{len(results)} checks passed"]
    return "\n".join(lines)
