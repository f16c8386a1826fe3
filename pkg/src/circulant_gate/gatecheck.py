"""Target gate matrices, transition maps, and fidelity measures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics, sta
from .core import BASIS_LABELS, require_unitary
from .hamiltonian import fourier_state

PI_QUARTER = math.pi / 4.0


@dataclass(frozen=True)
class TargetGate:
    """Ideal gate matrix for one of the two coupling-phase branches."""

    matrix: np.ndarray
    branch: float


def _branch_sign(branch):
    if np.isclose(branch, PI_QUARTER):
        return +1
    if np.isclose(branch, -PI_QUARTER):
        return -1
    raise ValueError("branch must be +pi/4 or -pi/4")


def transition_map(branch, alpha2, beta2):
    """Images of the four computational states under adiabatic following.

    Returns [(input_label, output_vector), ...] in basis order.  For the
    +pi/4 branch:

        dndn -> e^{+i alpha2} psi3      dnup -> -i e^{+i beta2} psi1
        updn -> e^{-i beta2}  psi2      upup -> e^{-i alpha2} psi0

    The -pi/4 branch conjugates everything, which swaps the psi3/psi1
    images (dndn -> e^{+i alpha2} psi1, dnup -> +i e^{+i beta2} psi3).
    """
    sign = _branch_sign(branch)
    ea, eb = np.exp(1j * alpha2), np.exp(1j * beta2)
    if sign > 0:
        outputs = (
            ea * fourier_state(3),
            -1j * eb * fourier_state(1),
            np.conj(eb) * fourier_state(2),
            np.conj(ea) * fourier_state(0),
        )
    else:
        outputs = (
            ea * fourier_state(1),
            +1j * eb * fourier_state(3),
            np.conj(eb) * fourier_state(2),
            np.conj(ea) * fourier_state(0),
        )
    return list(zip(BASIS_LABELS, outputs))


def target_gate(branch=PI_QUARTER):
    """Gate realized when both adiabatic phases are multiples of 2pi.

    Columns are the transition images at zero phases; the determinant is
    exactly 1 and the -pi/4 gate is the entrywise conjugate of the +pi/4
    one.
    """
    columns = [vec for _, vec in transition_map(branch, 0.0, 0.0)]
    return TargetGate(np.column_stack(columns), branch)


def gate_fidelity(actual, target, unitarity_tol=1e-8):
    """Trace-overlap fidelity |tr(G_target^dag G_actual)|^2 / 16.

    Invariant under a global phase of either argument.  Both matrices must
    be unitary within ``unitarity_tol``.
    """
    if isinstance(target, TargetGate):
        target = target.matrix
    actual = require_unitary(actual, unitarity_tol)
    target = require_unitary(target, unitarity_tol)
    overlap = np.trace(target.conj().T @ actual)
    return float(np.abs(overlap) ** 2) / 16.0


def entangled_phases(schedule):
    """Compensation phases (alpha, beta) for the entangled-state overlap.

    alpha undoes the adiabatic phase of the chi_minus branch, beta that of
    the nu_minus branch, so that in the perfectly adiabatic limit the
    evolved superposition lands exactly on (psi3 + psi2)/sqrt2.
    """
    phases = sta.branch_phases(schedule)
    return -phases["chi_minus"], -phases["nu_minus"]


def entangled_fidelity(schedule, alpha, beta, *, tolerance=1e-8,
                       evolved_chi=None, evolved_nu=None):
    """Creation fidelity of the two-mode superposition (psi3 + psi2)/sqrt2.

    Evolves the two rotating-basis eigenstates |+1,-2> and |-1,-2> under a
    rabi-controlled schedule and evaluates

        F = 1/2 |<target| (e^{-i alpha} U|chi(0)> + e^{-i beta} U|nu(0)>)|^2.

    Precomputed evolved states may be injected to evaluate the overlap
    formula on its own.
    """
    if schedule.variant != "rabi_controlled":
        raise ValueError("entangled-state creation uses rabi_controlled schedules")
    if evolved_chi is None or evolved_nu is None:
        chi0 = dynamics.rotating_basis_state(+1, -1, schedule.phi)
        nu0 = dynamics.rotating_basis_state(-1, -1, schedule.phi)
        u = dynamics.propagate(schedule, tolerance=tolerance).propagator
        evolved_chi = u @ chi0
        evolved_nu = u @ nu0
    target = (fourier_state(3) + fourier_state(2)) / np.sqrt(2.0)
    amplitude = np.vdot(target,
                        np.exp(-1j * alpha) * evolved_chi
                        + np.exp(-1j * beta) * evolved_nu)
    return 0.5 * float(np.abs(amplitude) ** 2)


def _h3_endpoints(schedule):
    j0, o10, o20, _, _ = dynamics.scalar_coefficients(schedule, 0.0)
    jf, o1f, o2f, _, _ = dynamics.scalar_coefficients(schedule, schedule.t_max)
    start = sta.h3_eigenbasis(j0, o10, o20, schedule.phi)
    end = sta.h3_eigenbasis(jf, o1f, o2f, schedule.phi)
    return start, end


def rotating_transport_fidelity(schedule, *, tolerance=1e-8):
    """Per-branch endpoint transport fidelity for a rabi-controlled schedule.

    For each exact eigenbranch, |<n(t_max)| U |n(0)>|^2; all four approach
    1 in the adiabatic limit, where the branch endpoints are the Fourier
    modes.
    """
    if schedule.variant != "rabi_controlled":
        raise ValueError("rotating-basis transport uses rabi_controlled schedules")
    u = dynamics.propagate(schedule, tolerance=tolerance).propagator
    start, end = _h3_endpoints(schedule)
    return {
        label: float(np.abs(np.vdot(end.vectors[label], u @ start.vectors[label])) ** 2)
        for label in sta.STA_LABELS
    }


def rotating_gate_fidelity(schedule, *, tolerance=1e-8):
    """Trace-overlap fidelity of a rabi-controlled run in the rotating basis.

    The realized gate is compared column by column against the ideal map
    |n(0)> -> e^{-i phase_n} |n(t_max)> over the four exact eigenbranches,
    with the branch phases removed, so the figure of merit isolates
    transport quality exactly as the computational-basis fidelity does for
    the detuning schedules.
    """
    if schedule.variant != "rabi_controlled":
        raise ValueError("rotating-basis comparison uses rabi_controlled schedules")
    u = dynamics.propagate(schedule, tolerance=tolerance).propagator
    start, end = _h3_endpoints(schedule)
    phases = sta.branch_phases(schedule)
    realized = np.column_stack([u @ start.vectors[label] for label in sta.STA_LABELS])
    target = np.column_stack([np.exp(-1j * phases[label]) * end.vectors[label]
                              for label in sta.STA_LABELS])
    overlap = np.trace(target.conj().T @ realized)
    return float(np.abs(overlap) ** 2) / 16.0
