import numpy as np
import pytest

from circulant_gate import core, dynamics, gatecheck, tuner
from circulant_gate.dynamics import RampSchedule
from circulant_gate.errors import ConvergenceError, DegeneracyError
from circulant_gate.hamiltonian import DetuningPair

KHZ = core.from_khz
PI4 = np.pi / 4


def base_schedule(j0=2.0, omega1=40.0, ramp=0.18):
    return RampSchedule.case2(KHZ(j0), KHZ(omega1), KHZ(1.0), KHZ(0.5),
                              KHZ(ramp), PI4)


@pytest.fixture(scope="module")
def tuned_benchmark():
    target = tuner.TuneTarget(80, 40, base_schedule())
    return target, tuner.tune(target)


def test_target_validation():
    with pytest.raises(ValueError):
        tuner.TuneTarget(1, 2, base_schedule())
    with pytest.raises(ValueError):
        tuner.TuneTarget(2, 0, base_schedule())
    rabi = RampSchedule.rabi_controlled(KHZ(2.0), KHZ(2.0), KHZ(30.0), KHZ(0.8), PI4)
    with pytest.raises(ValueError):
        tuner.TuneTarget(4, 2, rabi)


def test_decoupled_limit_closed_form_recovered():
    # couplings off: the solver must land exactly on the closed form
    schedule = RampSchedule.case2(0.0, 0.0, KHZ(1.0), KHZ(0.5), KHZ(0.18), PI4)
    target = tuner.TuneTarget(8, 3, schedule, tolerance=1e-10)
    expected = tuner.decoupled_guess(target)
    result = tuner.tune(target, guess=DetuningPair(expected.delta1 * 1.3,
                                                   expected.delta2 * 0.8))
    assert result.detunings.delta1 == pytest.approx(expected.delta1, rel=1e-10)
    assert result.detunings.delta2 == pytest.approx(expected.delta2, rel=1e-10)


def test_benchmark_detunings(tuned_benchmark):
    _, result = tuned_benchmark
    assert core.to_khz(result.detunings.delta1) == pytest.approx(59.96, rel=5e-3)
    assert core.to_khz(result.detunings.delta2) == pytest.approx(27.76, rel=5e-3)
    assert abs(result.alpha2 - 160 * np.pi) < 0.05
    assert abs(result.beta2 - 80 * np.pi) < 0.05


def test_postcondition_replay(tuned_benchmark):
    target, result = tuned_benchmark
    residual = tuner.phase_residual(result.detunings, target)
    assert abs(residual[0]) < target.tolerance
    assert abs(residual[1]) < target.tolerance


def test_residual_continuity(tuned_benchmark):
    # the phase map is smooth: a 1e-4 relative nudge of delta1 moves the
    # alpha residual by about (t_max/2) * d(delta1), here ~0.02 rad
    target, result = tuned_benchmark
    d = result.detunings
    nearby = DetuningPair(d.delta1 * (1 + 1e-4), d.delta2)
    r0 = tuner.phase_residual(d, target)
    r1 = tuner.phase_residual(nearby, target)
    change = abs(r1[0] - r0[0])
    assert 0.0 < change < 0.05
    half_step = DetuningPair(d.delta1 * (1 + 5e-5), d.delta2)
    r_half = tuner.phase_residual(half_step, target)
    assert abs(r_half[0] - r0[0]) == pytest.approx(change / 2, rel=1e-2)


def test_residual_deterministic(tuned_benchmark):
    target, result = tuned_benchmark
    first = tuner.phase_residual(result.detunings, target)
    second = tuner.phase_residual(result.detunings, target)
    assert first == second


def test_degenerate_guess_rejected():
    target = tuner.TuneTarget(80, 40, base_schedule())
    with pytest.raises(ValueError):
        tuner.tune(target, guess=DetuningPair(KHZ(30.0), KHZ(30.0)))


def test_equal_detunings_degenerate_in_phases():
    schedule = base_schedule().replace(delta1=KHZ(30.0), delta2=KHZ(30.0))
    with pytest.raises(DegeneracyError):
        dynamics.adiabatic_phases(schedule)


def test_iteration_ceiling():
    target = tuner.TuneTarget(80, 40, base_schedule())
    with pytest.raises(ConvergenceError) as err:
        tuner.tune(target, max_iterations=1)
    assert err.value.residual is not None


def test_tuned_beats_seeded_perturbations(tuned_benchmark):
    target, result = tuned_benchmark
    tuned_schedule = target.base.replace(delta1=result.detunings.delta1,
                                         delta2=result.detunings.delta2)
    u = dynamics.propagate(tuned_schedule, tolerance=1e-6).propagator
    tuned_fidelity = gatecheck.gate_fidelity(u, gatecheck.target_gate(),
                                             unitarity_tol=1e-6)
    rng = np.random.default_rng(123)
    trials = 0
    while trials < 10:
        factors = 1.0 + 0.2 * (2.0 * rng.random(2) - 1.0)
        d1 = result.detunings.delta1 * factors[0]
        d2 = result.detunings.delta2 * factors[1]
        if d1 <= d2:
            continue
        trials += 1
        perturbed = target.base.replace(delta1=d1, delta2=d2)
        u_p = dynamics.propagate(perturbed, tolerance=1e-6).propagator
        fidelity = gatecheck.gate_fidelity(u_p, gatecheck.target_gate(),
                                           unitarity_tol=1e-6)
        assert fidelity < tuned_fidelity
