import numpy as np
import pytest

from qsl import matcore, scenarios
from qsl.dynamics import evolve
from qsl.errors import DimMismatch, PurityDegenerate, UnknownName
from qsl.fidelity import (
    FIDELITIES,
    FidelityKind,
    alternative_fidelity,
    bures,
    bures_pure,
    fidelity,
    fidelity_series,
    operator_fidelity,
    pure_vector,
    rate_bound_alternative,
    rate_bound_operator,
    rate_bound_series,
    rate_bound_super,
    super_fidelity,
)
from qsl.states import density_from_pure, maximally_mixed, random_density, random_pure

from oracles import bures_factors, bures_scipy, factor_states, dephasing_bures_plus, dephasing_operator_rate

KET0 = np.diag([1.0, 0.0]).astype(complex)
KET1 = np.diag([0.0, 1.0]).astype(complex)
HALF = np.eye(2) / 2


def rand_state(rng, d):
    return random_density(d, int(rng.integers(1, d + 1)), int(rng.integers(2**32))).mat


def rand_pure(rng, d):
    return density_from_pure(random_pure(d, int(rng.integers(2**32)))).mat


class TestBures:
    def test_identical(self, rng):
        rho = rand_state(rng, 3)
        assert bures(rho, rho) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert bures(KET0, KET1) == pytest.approx(0.0, abs=1e-15)

    def test_pure_against_mixed(self):
        assert bures(KET0, HALF) == pytest.approx(0.5, abs=1e-15)

    def test_matches_full_rank_scipy_oracle(self, rng):
        for _ in range(30):
            d = int(rng.integers(2, 6))
            rho, sigma = (random_density(d, seed=int(rng.integers(2**32))).mat for _ in range(2))
            assert bures(rho, sigma) == pytest.approx(bures_scipy(rho, sigma), abs=1e-9)

    def test_matches_uhlmann_factor_oracle(self, rng):
        for _ in range(100):
            d = int(rng.integers(2, 7))
            A, rho, B, sigma = factor_states(rng, d, int(rng.integers(1, d + 1)), int(rng.integers(1, d + 1)))
            assert bures(rho, sigma) == pytest.approx(bures_factors(A, B), abs=1e-10)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            bures(KET0, np.eye(3) / 3)


class TestBuresPure:
    def test_plus(self):
        s = 1 / np.sqrt(2)
        assert bures_pure([s, s], np.full((2, 2), 0.5)) == pytest.approx(1.0)

    def test_zero_against_mixed(self):
        assert bures_pure([1, 0], HALF) == pytest.approx(0.5)

    def test_matches_full_route(self, rng):
        psi = random_pure(4, seed=12)
        sigma = rand_state(rng, 4)
        assert bures_pure(psi, sigma) == pytest.approx(bures(density_from_pure(psi), sigma), abs=1e-9)


class TestSuper:
    def test_maximally_mixed(self):
        assert super_fidelity(HALF, HALF) == pytest.approx(1.0)

    def test_dominates_bures(self, rng):
        for _ in range(100):
            d = int(rng.integers(2, 6))
            rho, sigma = rand_state(rng, d), rand_state(rng, d)
            assert super_fidelity(rho, sigma) >= bures(rho, sigma) - 1e-10

    def test_equals_bures_for_qubits(self, rng):
        for _ in range(100):
            rho, sigma = rand_state(rng, 2), rand_state(rng, 2)
            assert super_fidelity(rho, sigma) == pytest.approx(bures(rho, sigma), abs=1e-9)


class TestOperator:
    def test_self(self, rng):
        rho = rand_state(rng, 4)
        assert operator_fidelity(rho, rho) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert operator_fidelity(KET0, KET1) == 0.0

    def test_equals_bures_on_pure_pairs(self, rng):
        for _ in range(20):
            d = int(rng.integers(2, 7))
            psi, phi = random_pure(d, int(rng.integers(2**32))), random_pure(d, int(rng.integers(2**32)))
            expected = abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2
            assert operator_fidelity(density_from_pure(psi), density_from_pure(phi)) == pytest.approx(expected, abs=1e-9)


class TestAlternative:
    def test_pure_first_argument(self, rng):
        for _ in range(20):
            d = int(rng.integers(2, 6))
            psi = random_pure(d, int(rng.integers(2**32)))
            sigma = rand_state(rng, d)
            assert alternative_fidelity(density_from_pure(psi), sigma) == pytest.approx(bures_pure(psi, sigma), abs=1e-9)

    def test_orthogonal(self):
        assert alternative_fidelity(KET0, KET1) == 0.0

    def test_maximally_mixed_qubit(self):
        # (1 + 1) * 1/2
        assert alternative_fidelity(HALF, HALF) == pytest.approx(1.0)

    def test_mixed_range_is_reported_not_assumed(self, rng):
        worst = max(alternative_fidelity(rand_state(rng, d), rand_state(rng, d)) for d in rng.integers(2, 7, 500))
        assert worst <= 1 + 1e-10


def test_dispatch_is_exhaustive():
    assert set(FIDELITIES) == set(FidelityKind)
    assert fidelity("Super", HALF, HALF) == pytest.approx(1.0)
    assert FidelityKind.parse("bures") is FidelityKind.BURES
    with pytest.raises(UnknownName):
        FidelityKind.parse("trace-distance")


def test_bures_monotone_under_shared_channel(rng):
    """Two states pushed through the same depolarizing semigroup only get closer."""
    spec = scenarios.depolarizing(1.0)
    rho, sigma = rand_state(rng, 2), rand_state(rng, 2)
    a = evolve(spec, rho, 1.0, 1e-2)
    b = evolve(spec, sigma, 1.0, 1e-2)
    values = [bures(a.states[i], b.states[i]) for i in range(0, len(a), 10)]
    assert np.all(np.diff(values) >= -1e-12)


class TestSeries:
    @pytest.mark.parametrize("kind", list(FidelityKind))
    def test_static_is_one(self, static_traj, static_mixed_traj, kind):
        for traj in (static_traj, static_mixed_traj):
            np.testing.assert_allclose(fidelity_series(kind, traj).values, 1.0, atol=1e-12)

    def test_bures_dephasing_closed_form(self, dephasing_traj):
        s = fidelity_series("Bures", dephasing_traj)
        np.testing.assert_allclose(s.values, dephasing_bures_plus(1.0, s.times), atol=1e-6)

    def test_super_equals_bures_for_pure_start(self, dephasing_traj):
        a = fidelity_series("Super", dephasing_traj).values
        b = fidelity_series("Bures", dephasing_traj).values
        np.testing.assert_allclose(a, b, atol=1e-9)

    @pytest.mark.parametrize("kind", list(FidelityKind))
    def test_starts_at_one(self, ad_mixed_traj, kind):
        assert fidelity_series(kind, ad_mixed_traj).values[0] == pytest.approx(1.0, abs=1e-9)

    def test_mixed_bures_series_uses_full_formula(self, ad_mixed_traj):
        s = fidelity_series("Bures", ad_mixed_traj)
        i = 500
        assert s.values[i] == pytest.approx(bures_scipy(ad_mixed_traj.rho0, ad_mixed_traj.states[i]), abs=1e-9)
        assert len(s) == len(ad_mixed_traj)
        assert s.dt == pytest.approx(1e-3)


def _fd(values, dt):
    return np.abs(values[2:] - values[:-2]) / (2 * dt)


class TestRateBounds:
    def test_super_pure_reduces(self, rng):
        rho0 = rand_pure(rng, 3)
        rho_t, drho = rand_state(rng, 3), rng.standard_normal((3, 3))
        drho = drho + drho.T
        assert rate_bound_super(rho0, rho_t, drho) == pytest.approx(abs(np.trace(rho0 @ drho)), rel=1e-12)

    @pytest.mark.parametrize("fn", ["super", "alternative"])
    def test_zero_derivative(self, rng, fn):
        rho0, rho_t = rand_state(rng, 3), rand_state(rng, 3)
        f = {"super": rate_bound_super, "alternative": rate_bound_alternative}[fn]
        assert f(rho0, rho_t, np.zeros((3, 3))) == 0.0
        assert rate_bound_operator(rho_t, np.zeros((3, 3))) == 0.0

    def test_operator_closed_form(self, dephasing_traj):
        t = dephasing_traj.times
        np.testing.assert_allclose(rate_bound_series("Operator", dephasing_traj), dephasing_operator_rate(1.0, t), rtol=1e-9)

    def test_alternative_pure_reduces(self, rng):
        rho0 = rand_pure(rng, 2)
        rho_t = rand_state(rng, 2)
        drho = np.array([[0.1, 0.2 - 0.1j], [0.2 + 0.1j, -0.1]])
        assert rate_bound_alternative(rho0, rho_t, drho) == pytest.approx(matcore.norm_hs(drho), rel=1e-7)

    @pytest.mark.parametrize("kind", ["Super", "Operator", "Alternative"])
    @pytest.mark.parametrize("name", ["dephasing_mixed_traj", "ad_mixed_traj", "ad_coherent_traj", "dephasing_traj"])
    def test_bounds_finite_difference(self, request, kind, name):
        traj = request.getfixturevalue(name)
        F = fidelity_series(kind, traj).values
        bound = rate_bound_series(kind, traj)[1:-1]
        assert np.all(bound >= _fd(F, traj.dt) - 1e-6)

    def test_degenerate_purity_raises(self):
        # pure rho_t, mixed rho0, rho_t moving: the super ratio blows up
        rho0 = HALF
        rho_t = KET0
        drho = np.array([[0.0, 1.0], [1.0, 0.0]]) + np.diag([1.0, -1.0])
        with pytest.raises(PurityDegenerate):
            rate_bound_super(rho0, rho_t, drho)

    def test_degenerate_purity_harmless(self):
        drho = np.array([[0.0, 1.0], [1.0, 0.0]])  # Tr(rho_t drho) = 0
        assert np.isfinite(rate_bound_super(HALF, KET0, drho))


def test_pure_vector_round_trip():
    psi = random_pure(3, seed=4)
    v = pure_vector(density_from_pure(psi))
    assert abs(np.vdot(v.amplitudes, psi.amplitudes)) == pytest.approx(1.0)
