"""Ramp schedules and time-dependent Schrödinger propagation.

The sin^2/cos^2 schedules switch the Hamiltonian from detuning-dominated
(or drive-dominated) at t = 0 to purely circulant at t_max = pi/(2*ramp):
couplings rise as sin^2(ramp*t), detunings fall as cos^2(ramp*t).  The
propagator is a product of midpoint-sampled spectral exponentials, refined
by step doubling until it stops changing; this keeps every step exactly
unitary, so accuracy is the only thing the tolerance controls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from . import spectral
from .core import IDENTITY2, SIGMA_Z, tensor, unitarity_defect
from .errors import ConvergenceError, DegeneracyError
from .hamiltonian import DetuningPair, GeneralParams, _coupling_op, _drive_op

VARIANTS = ("case1", "case2", "rabi_controlled", "exp_detuning")

# Residual detuning fraction at cutoff for the exponential-ramp variant.
EXP_RESIDUAL = 5e-5

DEFAULT_TOLERANCE = 1e-8
DEFAULT_STEP_CEILING = 2**22
PI_QUARTER = math.pi / 4.0


@dataclass(frozen=True)
class RampSchedule:
    """Time-parametrized Hamiltonian coefficients over [0, t_max].

    All frequencies are angular (rad/ms); ``ramp`` is the characteristic
    rate controlling adiabaticity for the trigonometric variants, and
    ``gamma`` the decay rate of the exponential-detuning variant.
    """

    variant: str
    j0: float
    phi: float
    ramp: float = 0.0
    omega1: float = 0.0
    v0: float = 0.0
    delta1: float = 0.0
    delta2: float = 0.0
    gamma: float = 0.0
    t_max: float = field(init=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown schedule variant {self.variant!r}")
        if self.variant == "exp_detuning":
            if self.gamma <= 0:
                raise ValueError("exp_detuning schedule needs gamma > 0")
            t_max = math.log(1.0 / EXP_RESIDUAL) / self.gamma
        else:
            if self.ramp <= 0:
                raise ValueError("schedule needs ramp > 0")
            t_max = math.pi / (2.0 * self.ramp)
        object.__setattr__(self, "t_max", t_max)

    @classmethod
    def case1(cls, j0, delta1, delta2, ramp, phi):
        return cls("case1", j0=j0, phi=phi, ramp=ramp, delta1=delta1, delta2=delta2)

    @classmethod
    def case2(cls, j0, omega1, delta1, delta2, ramp, phi):
        return cls("case2", j0=j0, phi=phi, ramp=ramp, omega1=omega1,
                   delta1=delta1, delta2=delta2)

    @classmethod
    def rabi_controlled(cls, j0, v0, omega1, ramp, phi):
        return cls("rabi_controlled", j0=j0, phi=phi, ramp=ramp, omega1=omega1, v0=v0)

    @classmethod
    def exp_detuning(cls, j0, omega1, delta1, delta2, gamma, phi):
        return cls("exp_detuning", j0=j0, phi=phi, omega1=omega1,
                   delta1=delta1, delta2=delta2, gamma=gamma)

    def replace(self, **changes):
        """Schedule with selected fields replaced (t_max recomputed)."""
        fields = dict(variant=self.variant, j0=self.j0, phi=self.phi, ramp=self.ramp,
                      omega1=self.omega1, v0=self.v0, delta1=self.delta1,
                      delta2=self.delta2, gamma=self.gamma)
        fields.update(changes)
        return RampSchedule(**fields)


def _coefficient_arrays(s: RampSchedule, ts):
    """(j, omega1, omega2, delta1, delta2) evaluated on an array of times."""
    ts = np.asarray(ts, dtype=float)
    if s.variant == "exp_detuning":
        ones = np.ones_like(ts)
        decay = np.exp(-s.gamma * ts)
        return s.j0 * ones, s.omega1 * ones, s.j0 * ones, s.delta1 * decay, s.delta2 * decay
    rise = np.sin(s.ramp * ts) ** 2
    fall = np.cos(s.ramp * ts) ** 2
    j = s.j0 * rise
    if s.variant == "case1":
        return j, 0.0 * ts, j, s.delta1 * fall, s.delta2 * fall
    if s.variant == "case2":
        return j, s.omega1 * rise, j, s.delta1 * fall, s.delta2 * fall
    # rabi_controlled: constant spin-1 drive, spin-2 drive descends onto j0
    return j, s.omega1 * np.ones_like(ts), s.j0 + s.v0 * fall, 0.0 * ts, 0.0 * ts


def scalar_coefficients(s: RampSchedule, t):
    """Coefficients (j, omega1, omega2, delta1, delta2) at a single time."""
    j, o1, o2, d1, d2 = _coefficient_arrays(s, np.array([float(t)]))
    return float(j[0]), float(o1[0]), float(o2[0]), float(d1[0]), float(d2[0])


def coefficients_at(s: RampSchedule, t):
    """Instantaneous (GeneralParams, DetuningPair) of the schedule at time t."""
    if not (-1e-12 * s.t_max <= t <= s.t_max * (1 + 1e-12)):
        raise ValueError(f"t={t} outside schedule range [0, {s.t_max}]")
    j, o1, o2, d1, d2 = scalar_coefficients(s, t)
    params = GeneralParams(j, o1, o2, 0.0, s.phi, 0.0, s.phi)
    return params, DetuningPair(d1, d2)


def _basis_matrices(phi):
    a = tensor(_coupling_op(0.0), _coupling_op(phi))
    b = tensor(_drive_op(0.0), IDENTITY2)
    c = tensor(IDENTITY2, _drive_op(phi))
    dz1 = tensor(SIGMA_Z, IDENTITY2)
    dz2 = tensor(IDENTITY2, SIGMA_Z)
    return a, b, c, dz1, dz2


def hamiltonian_batch(s: RampSchedule, ts):
    """Stack of Hamiltonians, shape (len(ts), 4, 4)."""
    ts = np.asarray(ts, dtype=float)
    j, o1, o2, d1, d2 = _coefficient_arrays(s, ts)
    a, b, c, dz1, dz2 = _basis_matrices(s.phi)
    out = (j[:, None, None] * a + np.asarray(o1)[:, None, None] * b
           + np.asarray(o2)[:, None, None] * c
           + np.asarray(d1)[:, None, None] * dz1 + np.asarray(d2)[:, None, None] * dz2)
    return out


def hamiltonian_at(s: RampSchedule, t):
    return hamiltonian_batch(s, np.array([float(t)]))[0]


def _ordered_product(mats):
    """Product mats[-1] @ ... @ mats[0] by pairwise tree reduction."""
    if len(mats) == 0:
        return np.eye(4, dtype=complex)
    mats = np.asarray(mats)
    tail = None
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            tail = mats[0] if tail is None else mats[0] @ tail
            mats = mats[1:]
        mats = mats[1::2] @ mats[::2]
    head = mats[0]
    return head if tail is None else head @ tail


def _step_unitaries(ham_batch, t_max, n):
    dt = t_max / n
    mids = (np.arange(n) + 0.5) * dt
    hs = ham_batch(mids)
    w, v = np.linalg.eigh(hs)
    phases = np.exp(-1j * dt * w)
    return np.einsum("tij,tj,tkj->tik", v, phases, v.conj())


def _run_level(ham_batch, t_max, n, sample_times):
    us = _step_unitaries(ham_batch, t_max, n)
    if sample_times is None:
        return _ordered_product(us), None, None
    dt = t_max / n
    bounds = np.clip(np.rint(np.asarray(sample_times, dtype=float) / dt), 0, n).astype(int)
    snapped = bounds * dt
    cumulative = []
    acc = np.eye(4, dtype=complex)
    prev = 0
    for b in bounds:
        if b < prev:
            raise ValueError("sample_times must be sorted ascending")
        acc = _ordered_product(us[prev:b]) @ acc
        cumulative.append(acc)
        prev = b
    total = _ordered_product(us[prev:]) @ acc
    return total, snapped, np.stack(cumulative)


@dataclass
class EvolutionResult:
    """Propagator over [0, t_max] plus accumulated-phase diagnostics.

    ``alpha2``/``beta2`` are filled for case-2 schedules at coupling phase
    pi/4 with nondegenerate detunings, else left as None.  When sampling
    was requested, ``sample_times`` holds the step-aligned times actually
    used and ``sample_propagators`` the propagators up to each of them.
    """

    propagator: np.ndarray
    final_state: Optional[np.ndarray]
    alpha2: Optional[float]
    beta2: Optional[float]
    steps: int
    unitarity_defect: float
    sample_times: Optional[np.ndarray] = None
    sample_propagators: Optional[np.ndarray] = None


def propagate(schedule: RampSchedule, initial_state=None, *, dt_initial=None,
              tolerance=DEFAULT_TOLERANCE, step_ceiling=DEFAULT_STEP_CEILING,
              sample_times=None, hamiltonian_batch_fn: Callable = None):
    """Integrate the schedule and return its full propagator.

    The step count starts at t_max/dt_initial (default 2000 steps) and
    doubles until two successive refinements agree to ``tolerance`` in max
    norm; exceeding ``step_ceiling`` raises ConvergenceError.  Passing
    ``hamiltonian_batch_fn`` overrides the schedule's Hamiltonian (used by
    the counterdiabatic driver); it must map an array of times to a stacked
    (n, 4, 4) Hermitian array.
    """
    ham = hamiltonian_batch_fn or (lambda ts: hamiltonian_batch(schedule, ts))
    t_max = schedule.t_max
    if dt_initial is None:
        n = 2000
    else:
        if dt_initial <= 0:
            raise ValueError("dt_initial must be positive")
        n = max(2, int(math.ceil(t_max / dt_initial)))

    u_prev, snapped, samples = _run_level(ham, t_max, n, sample_times)
    while True:
        if 2 * n > step_ceiling:
            raise ConvergenceError(
                f"propagator did not converge to {tolerance:.1e} within "
                f"{step_ceiling} steps",
                residual=None,
            )
        n *= 2
        u, snapped, samples = _run_level(ham, t_max, n, sample_times)
        change = float(np.max(np.abs(u - u_prev)))
        if change < tolerance:
            break
        u_prev = u

    defect = unitarity_defect(u)
    final_state = None
    if initial_state is not None:
        initial_state = np.asarray(initial_state, dtype=complex)
        if abs(np.linalg.norm(initial_state) - 1.0) > 1e-6:
            raise ValueError("initial state must be normalized")
        final_state = u @ initial_state

    alpha2 = beta2 = None
    if (schedule.variant == "case2" and abs(schedule.phi - PI_QUARTER) < 1e-12
            and abs(schedule.delta1 - schedule.delta2) > 0):
        try:
            alpha2, beta2 = adiabatic_phases(schedule)
        except DegeneracyError:
            pass

    return EvolutionResult(u, final_state, alpha2, beta2, n, defect,
                           snapped, samples)


def _case2_branch(s: RampSchedule, t, index):
    j, o1, _, d1, d2 = scalar_coefficients(s, t)
    return spectral.analytic_case2(j, o1, d1, d2)[index]


def adiabatic_phases(schedule: RampSchedule, abs_tol=1e-6):
    """Accumulated phases (alpha2, beta2) of the two positive branches.

    alpha2 integrates the lambda_plus branch over the schedule, beta2 the
    mu_plus branch, each by adaptive quadrature to ``abs_tol``.  Only
    defined for case-2 schedules at coupling phase pi/4, where the branch
    frequencies are closed-form.
    """
    if schedule.variant != "case2":
        raise ValueError("adiabatic phases are defined for case2 schedules")
    if abs(schedule.phi - PI_QUARTER) > 1e-12:
        raise ValueError("closed-form branches require coupling phase pi/4")

    # any branch collision along the path invalidates the labels
    probe = np.linspace(0.0, schedule.t_max, 513)
    j, o1, _, d1, d2 = _coefficient_arrays(schedule, probe)
    branches = np.stack(
        [spectral.analytic_case2(jv, ov, dv1, dv2)
         for jv, ov, dv1, dv2 in zip(j, o1, d1, d2)]
    )
    scale = max(float(np.max(np.abs(branches))), 1e-300)
    for k in range(probe.size):
        pairs = spectral.degenerate_pairs(branches[k], spectral.BRANCH_LABELS)
        if pairs:
            raise DegeneracyError(
                f"branches {pairs[0][0]} and {pairs[0][1]} collide at "
                f"t={probe[k]:.6g} ms",
                pair=pairs[0], time=probe[k],
            )

    eps = abs_tol / 2.0
    alpha2, _ = quad(lambda t: _case2_branch(schedule, t, 0), 0.0, schedule.t_max,
                     epsabs=eps, epsrel=1e-12, limit=500)
    beta2, _ = quad(lambda t: _case2_branch(schedule, t, 1), 0.0, schedule.t_max,
                    epsabs=eps, epsrel=1e-12, limit=500)
    return alpha2, beta2


def rotating_basis_state(q1, q2, phi):
    """Product state |q1_1>|q2_2> of the rotating single-spin basis.

    |+-_1> = (|dn> +- |up>)/sqrt2 and |+-_2> = (|dn> +- e^{i phi}|up>)/sqrt2;
    q1, q2 are +1 or -1.
    """
    if q1 not in (+1, -1) or q2 not in (+1, -1):
        raise ValueError("q1 and q2 must be +1 or -1")
    spin1 = np.array([1.0, q1], dtype=complex) / np.sqrt(2.0)
    spin2 = np.array([1.0, q2 * np.exp(1j * phi)], dtype=complex) / np.sqrt(2.0)
    return np.kron(spin1, spin2)
