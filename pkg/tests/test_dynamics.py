import numpy as np
import pytest

from qsl import scenarios
from qsl.dynamics import (
    HamiltonianSpec,
    LindbladSpec,
    Trajectory,
    check_states,
    evolve,
    hamiltonian_of,
    lindblad_rhs,
    step_count,
    von_neumann_rhs,
)
from qsl.errors import DimMismatch, DriftExceeded, InvalidInput, NotHermitian, NotPSD, StepMismatch
from qsl.states import random_density

from conftest import AD_MIXED, KET0, PLUS
from oracles import E2, amplitude_damping_state, dephasing_state, rabi_state

SX, SZ = scenarios.SX, scenarios.SZ


class TestVonNeumann:
    def test_commuting(self):
        np.testing.assert_array_equal(von_neumann_rhs(np.diag([1.0, 2.0]), np.diag([0.3, 0.7])), np.zeros((2, 2)))

    def test_sz_on_plus(self):
        # (1/i)(sz rho - rho sz) = (1/i) [[0, 1], [-1, 0]]
        expected = np.array([[0, -1j], [1j, 0]])
        np.testing.assert_allclose(von_neumann_rhs(SZ, PLUS), expected, atol=1e-15)

    def test_traceless(self, rng):
        for d in (2, 3, 5):
            G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            out = von_neumann_rhs(G + G.conj().T, random_density(d, seed=d).mat)
            assert abs(np.trace(out)) < 1e-13

    def test_hbar_scales(self):
        a = von_neumann_rhs(SZ, PLUS, hbar=1.0)
        np.testing.assert_allclose(von_neumann_rhs(SZ, PLUS, hbar=2.0), a / 2)

    def test_bad_hbar(self):
        with pytest.raises(InvalidInput):
            von_neumann_rhs(SZ, PLUS, hbar=0.0)


class TestLindbladRhs:
    def test_empty_generator(self):
        np.testing.assert_array_equal(lindblad_rhs(LindbladSpec(2), PLUS), np.zeros((2, 2)))

    def test_dephasing_hand_expanded(self):
        gamma, c = 0.7, 0.3 - 0.1j
        rho = np.array([[0.5, c], [np.conj(c), 0.5]])
        expected = np.array([[0, -2 * gamma * c], [-2 * gamma * np.conj(c), 0]])
        np.testing.assert_allclose(lindblad_rhs(scenarios.dephasing(gamma), rho), expected, atol=1e-15)

    def test_amplitude_damping_excited(self):
        gamma = 1.3
        out = lindblad_rhs(scenarios.amplitude_damping(gamma), np.diag([0.0, 1.0]))
        np.testing.assert_allclose(out, gamma * np.diag([1.0, -1.0]), atol=1e-15)

    def test_matches_hamiltonian_part(self):
        H = np.array([[0.2, 0.1 - 0.3j], [0.1 + 0.3j, -0.4]])
        spec = HamiltonianSpec.constant(H)
        np.testing.assert_allclose(lindblad_rhs(spec, PLUS), von_neumann_rhs(H, PLUS), atol=1e-15)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            lindblad_rhs(scenarios.dephasing(1.0), np.eye(3) / 3)


class TestSpecs:
    def test_negative_rate(self):
        with pytest.raises(InvalidInput):
            LindbladSpec(2, jumps=[(SZ, -1.0)])

    def test_jump_dim(self):
        with pytest.raises(DimMismatch):
            LindbladSpec(2, jumps=[(np.eye(3), 1.0)])

    def test_non_hermitian_hamiltonian(self):
        spec = HamiltonianSpec(2, lambda t: np.array([[0, 1], [0, 0]]))
        with pytest.raises(NotHermitian):
            spec(0.0)

    def test_unitary_detection(self):
        assert hamiltonian_of(scenarios.rabi_drive(1.0)) is not None
        assert hamiltonian_of(LindbladSpec(2, jumps=[(SZ, 0.0)])) is not None
        assert hamiltonian_of(scenarios.dephasing(1.0)) is None


class TestStepCount:
    def test_integral(self):
        assert step_count(1.0, 1e-3) == 1000

    @pytest.mark.parametrize("tau,dt", [(1.0, 0.3), (1.0, 0.6), (1.0, 0.0), (-1.0, 0.1)])
    def test_rejected(self, tau, dt):
        with pytest.raises(StepMismatch):
            step_count(tau, dt)


class TestEvolve:
    def test_zero_generator(self):
        traj = evolve(LindbladSpec(3), random_density(3, seed=1).mat, 1.0, 0.1)
        np.testing.assert_array_equal(traj.states, np.broadcast_to(traj.rho0, traj.states.shape))

    def test_dephasing_closed_form(self, dephasing_traj):
        assert dephasing_traj.states[-1, 0, 1].real == pytest.approx(E2 / 2, abs=1e-6)
        exact = np.stack([dephasing_state(PLUS, 1.0, t) for t in dephasing_traj.times])
        np.testing.assert_allclose(dephasing_traj.states, exact, atol=1e-12)

    def test_rabi_flip(self):
        omega = 2.0
        traj = evolve(scenarios.rabi_drive(omega), KET0, np.pi / omega, np.pi / omega / 1000)
        np.testing.assert_allclose(traj.states[-1], np.diag([0.0, 1.0]), atol=1e-6)
        np.testing.assert_allclose(traj.states[300], rabi_state(omega, traj.times[300]), atol=1e-10)

    def test_amplitude_damping_closed_form(self, ad_coherent_traj):
        t = ad_coherent_traj.times
        exact = np.stack([amplitude_damping_state(0.7, 0.35, 1.0, s) for s in t])
        np.testing.assert_allclose(ad_coherent_traj.states, exact, atol=1e-11)

    def test_grid(self, dephasing_traj):
        assert dephasing_traj.tau == 1.0
        assert len(dephasing_traj) == 1001
        assert dephasing_traj.dt == pytest.approx(1e-3)
        np.testing.assert_allclose(np.diff(dephasing_traj.times), 1e-3, atol=1e-15)

    def test_derivs_are_generator_outputs(self, ad_mixed_traj):
        spec = ad_mixed_traj.generator
        for i in (0, 250, 1000):
            np.testing.assert_allclose(ad_mixed_traj.derivs[i], lindblad_rhs(spec, ad_mixed_traj.states[i]), atol=1e-15)

    def test_fd_consistency_constant(self, ad_mixed_traj):
        assert 0 < ad_mixed_traj.fd_constant < 10

    def test_rk4_fourth_order(self):
        spec = scenarios.dephasing(1.0, omega=3.0)
        errors = []
        for dt in (0.1, 0.05, 0.025):
            traj = evolve(spec, PLUS, 1.0, dt)
            exact = np.stack([_detuned_dephasing(t, 1.0, 3.0) for t in traj.times])
            errors.append(np.max(np.abs(traj.states - exact)))
        assert errors[0] / errors[1] >= 12
        assert errors[1] / errors[2] >= 12

    def test_time_dependent_hamiltonian(self):
        # H_t = f(t) sx / 2 rotates by the pulse area
        spec = HamiltonianSpec(2, lambda t: 0.5 * np.pi * np.sin(np.pi * t) * SX)
        traj = evolve(spec, KET0, 1.0, 1e-3)
        # area = int_0^1 pi sin(pi t) dt = 2
        np.testing.assert_allclose(traj.states[-1], rabi_state(1.0, 2.0), atol=1e-9)

    def test_read_only(self, dephasing_traj):
        with pytest.raises(ValueError):
            dephasing_traj.states[0, 0, 0] = 0

    def test_drift_raises(self):
        # huge steps on a strong generator leave the state set
        spec = scenarios.amplitude_damping(50.0)
        with pytest.raises(DriftExceeded) as info:
            evolve(spec, AD_MIXED, 1.0, 0.5)
        assert info.value.index >= 1

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            evolve(scenarios.dephasing(1.0), np.eye(3) / 3, 1.0, 0.1)

    def test_invalid_initial_state(self):
        with pytest.raises(NotPSD):
            evolve(scenarios.dephasing(1.0), [[0.9, 0.4], [0.4, 0.1]], 1.0, 0.1)


def _detuned_dephasing(t, gamma, omega):
    rho = np.array(PLUS, dtype=complex)
    rho[0, 1] *= np.exp(-(2 * gamma + 1j * omega) * t)
    rho[1, 0] = np.conj(rho[0, 1])
    return rho


class TestInvariants:
    @pytest.mark.parametrize(
        "spec",
        [scenarios.dephasing(1.0), scenarios.amplitude_damping(2.0), scenarios.depolarizing(1.5), scenarios.rabi_drive(3.0, 0.5)],
        ids=["dephasing", "amplitude_damping", "depolarizing", "damped_rabi"],
    )
    def test_trace_and_hermiticity(self, spec):
        traj = evolve(spec, random_density(2, seed=3).mat, 1.0, 1e-3)
        assert np.max(np.abs(np.trace(traj.states, axis1=1, axis2=2) - 1)) <= 1e-8
        assert np.max(np.abs(traj.states - np.conj(np.swapaxes(traj.states, 1, 2)))) <= 1e-9

    def test_unitary_purity_constant(self, rng):
        H = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        spec = HamiltonianSpec.constant(0.3 * (H + H.conj().T))
        traj = evolve(spec, random_density(3, seed=8).mat, 1.0, 1e-3)
        p = np.real(np.einsum("ijk,ikj->i", traj.states, traj.states))
        assert np.ptp(p) <= 1e-8

    def test_check_states_flags_non_states(self):
        states = np.stack([np.eye(2) / 2, np.diag([1.2, -0.2])]).astype(complex)
        with pytest.raises(DriftExceeded) as info:
            check_states(states, np.zeros_like(states))
        assert info.value.index == 1


def test_trajectory_state_accessor(dephasing_traj):
    assert isinstance(dephasing_traj, Trajectory)
    assert dephasing_traj.state(0).dim == 2


class TestScenarios:
    def test_depolarizing_bloch_decay(self):
        gamma = 0.8
        rho0 = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
        traj = evolve(scenarios.depolarizing(gamma), rho0, 1.0, 1e-3)
        bloch0 = np.array([2 * rho0[0, 1].real, -2 * rho0[0, 1].imag, (rho0[0, 0] - rho0[1, 1]).real])
        r = traj.states[-1]
        bloch = np.array([2 * r[0, 1].real, -2 * r[0, 1].imag, (r[0, 0] - r[1, 1]).real])
        np.testing.assert_allclose(bloch, bloch0 * np.exp(-gamma), atol=1e-12)

    def test_random_lindblad_normalized(self, rng):
        spec = scenarios.random_lindblad(3, rng)
        assert np.linalg.norm(spec.hamiltonian_at(0.0), 2) == pytest.approx(1.0)
        for A, rate in spec.jumps:
            assert np.linalg.norm(A, 2) == pytest.approx(1.0)
            assert 0 <= rate <= 2.0

    def test_damped_rabi_is_lindblad(self):
        assert hamiltonian_of(scenarios.rabi_drive(1.0, 0.5)) is None
