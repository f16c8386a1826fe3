import numpy as np
import pytest

from circulant_gate import core, dynamics
from circulant_gate.dynamics import RampSchedule, adiabatic_phases, propagate
from circulant_gate.errors import ConvergenceError, DegeneracyError
from circulant_gate.hamiltonian import build_case2, build_detuning, fourier_state

KHZ = core.from_khz
PI4 = np.pi / 4

DNDN = np.array([1, 0, 0, 0], dtype=complex)
UPUP = np.array([0, 0, 0, 1], dtype=complex)


@pytest.fixture(scope="module")
def fig2a_schedule():
    return RampSchedule.case2(KHZ(2.0), KHZ(50.0), KHZ(30.0), KHZ(10.0), KHZ(0.2), PI4)


@pytest.fixture(scope="module")
def fig2a_result(fig2a_schedule):
    return propagate(fig2a_schedule, initial_state=DNDN, tolerance=1e-7)


class TestSchedule:
    def test_t_max_relation(self):
        ramp = KHZ(0.18)
        schedule = RampSchedule.case2(KHZ(2.0), KHZ(40.0), KHZ(60.0), KHZ(28.0), ramp, PI4)
        assert abs(schedule.t_max - np.pi / (2 * ramp)) < 1e-12

    def test_case2_endpoint_coefficients(self, fig2a_schedule):
        params0, det0 = dynamics.coefficients_at(fig2a_schedule, 0.0)
        assert params0.j == 0.0 and params0.omega1 == 0.0
        assert det0.delta1 == fig2a_schedule.delta1
        assert det0.delta2 == fig2a_schedule.delta2
        params1, det1 = dynamics.coefficients_at(fig2a_schedule, fig2a_schedule.t_max)
        assert params1.j == pytest.approx(fig2a_schedule.j0, abs=1e-12)
        assert params1.omega1 == pytest.approx(fig2a_schedule.omega1, abs=1e-12)
        assert abs(det1.delta1) < 1e-12 and abs(det1.delta2) < 1e-12

    def test_rabi_controlled_endpoint_lock(self):
        schedule = RampSchedule.rabi_controlled(KHZ(2.0), KHZ(3.8), KHZ(30.0),
                                                KHZ(0.6), PI4)
        params, _ = dynamics.coefficients_at(schedule, schedule.t_max)
        assert params.omega2 == pytest.approx(schedule.j0, abs=1e-12)
        assert params.omega1 == schedule.omega1

    def test_exp_detuning_cutoff(self):
        schedule = RampSchedule.exp_detuning(KHZ(2.0), KHZ(10.0), KHZ(100.0),
                                             KHZ(40.0), gamma=5.0, phi=PI4)
        _, det = dynamics.coefficients_at(schedule, schedule.t_max)
        assert det.delta1 / schedule.delta1 < 1e-4
        params, _ = dynamics.coefficients_at(schedule, schedule.t_max)
        assert params.omega2 == schedule.j0  # circulant lock held throughout

    def test_out_of_range_time(self, fig2a_schedule):
        with pytest.raises(ValueError):
            dynamics.coefficients_at(fig2a_schedule, -0.1)
        with pytest.raises(ValueError):
            dynamics.coefficients_at(fig2a_schedule, 2 * fig2a_schedule.t_max)

    def test_hamiltonian_at_matches_builders(self, fig2a_schedule):
        t = 0.37 * fig2a_schedule.t_max
        params, det = dynamics.coefficients_at(fig2a_schedule, t)
        direct = build_case2(params.j, params.omega1, PI4) + build_detuning(det)
        assert np.max(np.abs(dynamics.hamiltonian_at(fig2a_schedule, t) - direct)) < 1e-12

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError):
            RampSchedule("case3", j0=1.0, phi=0.0, ramp=1.0)


class TestPropagate:
    def test_zero_hamiltonian_gives_identity(self):
        schedule = RampSchedule.case1(0.0, 0.0, 0.0, KHZ(0.5), 0.0)
        result = propagate(schedule, tolerance=1e-10)
        assert np.max(np.abs(result.propagator - np.eye(4))) < 1e-12

    def test_fig2a_transfer(self, fig2a_result):
        overlap = abs(np.vdot(fourier_state(3), fig2a_result.final_state)) ** 2
        assert overlap >= 0.999
        assert fig2a_result.unitarity_defect < 1e-9

    def test_fig2b_transfer(self):
        schedule = RampSchedule.rabi_controlled(KHZ(2.0), KHZ(3.8), KHZ(30.0),
                                                KHZ(0.6), PI4)
        initial = dynamics.rotating_basis_state(-1, -1, PI4)
        result = propagate(schedule, initial_state=initial, tolerance=1e-7)
        overlap = abs(np.vdot(fourier_state(3), result.final_state)) ** 2
        assert overlap >= 0.999

    def test_richardson_self_consistency(self, fig2a_schedule):
        loose = propagate(fig2a_schedule, tolerance=1e-4).propagator
        tight = propagate(fig2a_schedule, tolerance=5e-5).propagator
        assert np.max(np.abs(loose - tight)) < 1e-4

    def test_norm_preservation(self, fig2a_result):
        assert abs(np.linalg.norm(fig2a_result.final_state) - 1.0) < 1e-9

    def test_linearity(self, fig2a_schedule):
        amplitudes = np.array([0.6, 0.0, 0.0, 0.8j])
        superposed = propagate(fig2a_schedule, initial_state=amplitudes,
                               tolerance=1e-6).final_state
        u = propagate(fig2a_schedule, tolerance=1e-6).propagator
        recombined = 0.6 * (u @ DNDN) + 0.8j * (u @ UPUP)
        assert np.max(np.abs(superposed - recombined)) < 1e-9

    def test_adiabatic_limit_monotone_in_ramp(self):
        overlaps = []
        for ramp_khz in (1.6, 0.8, 0.4, 0.2):
            schedule = RampSchedule.case2(KHZ(2.0), KHZ(50.0), KHZ(30.0), KHZ(10.0),
                                          KHZ(ramp_khz), PI4)
            result = propagate(schedule, initial_state=DNDN, tolerance=1e-6)
            overlaps.append(abs(np.vdot(fourier_state(3), result.final_state)) ** 2)
        assert all(b >= a for a, b in zip(overlaps, overlaps[1:]))

    def test_step_ceiling_raises(self, fig2a_schedule):
        with pytest.raises(ConvergenceError):
            propagate(fig2a_schedule, tolerance=1e-16, step_ceiling=8000)

    def test_sampling_grid(self, fig2a_schedule):
        times = np.linspace(0.0, fig2a_schedule.t_max, 11)
        result = propagate(fig2a_schedule, sample_times=times, tolerance=1e-6)
        assert result.sample_propagators.shape == (11, 4, 4)
        assert np.max(np.abs(result.sample_times - times)) < fig2a_schedule.t_max / 2000
        assert np.max(np.abs(result.sample_propagators[0] - np.eye(4))) < 1e-12
        assert np.max(np.abs(result.sample_propagators[-1] - result.propagator)) < 1e-12

    def test_requires_normalized_state(self, fig2a_schedule):
        with pytest.raises(ValueError):
            propagate(fig2a_schedule, initial_state=np.array([2.0, 0, 0, 0]))


class TestAdiabaticPhases:
    def test_zero_amplitudes(self):
        schedule = RampSchedule.case2(0.0, 0.0, KHZ(1.0), KHZ(0.3), KHZ(0.5), PI4)
        alpha2, beta2 = adiabatic_phases(schedule)
        expected_a = (schedule.delta1 + schedule.delta2) * schedule.t_max / 2
        expected_b = (schedule.delta1 - schedule.delta2) * schedule.t_max / 2
        assert alpha2 == pytest.approx(expected_a, abs=1e-8)
        assert beta2 == pytest.approx(expected_b, abs=1e-8)

    def test_scaling_identity(self):
        base = RampSchedule.case2(KHZ(2.0), KHZ(40.0), KHZ(60.0), KHZ(28.0),
                                  KHZ(0.18), PI4)
        doubled = RampSchedule.case2(2 * base.j0, 2 * base.omega1, 2 * base.delta1,
                                     2 * base.delta2, 2 * base.ramp, PI4)
        a1, b1 = adiabatic_phases(base)
        a2, b2 = adiabatic_phases(doubled)
        assert a2 == pytest.approx(a1, abs=1e-5)
        assert b2 == pytest.approx(b1, abs=1e-5)

    def test_degenerate_detunings_rejected(self):
        schedule = RampSchedule.case2(KHZ(2.0), KHZ(40.0), KHZ(30.0), KHZ(30.0),
                                      KHZ(0.2), PI4)
        with pytest.raises(DegeneracyError):
            adiabatic_phases(schedule)

    def test_requires_quarter_pi(self):
        schedule = RampSchedule.case2(KHZ(2.0), KHZ(40.0), KHZ(30.0), KHZ(10.0),
                                      KHZ(0.2), np.pi / 3)
        with pytest.raises(ValueError):
            adiabatic_phases(schedule)

    def test_phase_matches_propagator(self, fig2a_schedule, fig2a_result):
        # the dndn branch accumulates exp(+i alpha2) on its way to psi3
        amp = np.vdot(fourier_state(3), fig2a_result.final_state)
        mismatch = np.angle(amp * np.exp(-1j * fig2a_result.alpha2))
        assert abs(mismatch) < 0.05

    def test_result_carries_phases(self, fig2a_result):
        assert fig2a_result.alpha2 is not None
        direct = adiabatic_phases(
            RampSchedule.case2(KHZ(2.0), KHZ(50.0), KHZ(30.0), KHZ(10.0), KHZ(0.2), PI4))
        assert fig2a_result.alpha2 == pytest.approx(direct[0], abs=1e-9)


class TestRotatingBasisState:
    def test_plus_plus_phase_zero_is_psi0(self):
        state = dynamics.rotating_basis_state(+1, +1, 0.0)
        assert np.allclose(state, np.full(4, 0.5))

    def test_minus_minus_quarter_pi(self):
        state = dynamics.rotating_basis_state(-1, -1, PI4)
        phase = np.exp(1j * PI4)
        expected = 0.5 * np.array([1.0, -phase, -1.0, phase])
        assert np.allclose(state, expected, atol=1e-14)

    def test_normalized(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            q1, q2 = rng.choice([-1, 1], 2)
            phi = rng.uniform(0, 2 * np.pi)
            state = dynamics.rotating_basis_state(int(q1), int(q2), phi)
            assert abs(np.linalg.norm(state) - 1.0) < 1e-14

    def test_rejects_bad_signs(self):
        with pytest.raises(ValueError):
            dynamics.rotating_basis_state(0, 1, 0.0)
