"""Detuning optimization: quantize the accumulated branch phases.

The realized gate equals the ideal one exactly when both adiabatic phases
are integer multiples of 2pi.  The tuner solves the two-dimensional root
problem (alpha2 - 2k pi, beta2 - 2p pi) = 0 over (delta1, delta2) with a
damped Newton iteration on a finite-difference Jacobian, holding the
ordering delta1 > delta2 > 0 so the branch labels stay fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics
from .errors import ConvergenceError
from .hamiltonian import DetuningPair

# relative finite-difference step for the Jacobian
JACOBIAN_STEP = 1e-3
MAX_ITERATIONS = 60
MAX_BACKTRACKS = 12


@dataclass(frozen=True)
class TuneTarget:
    """Winding numbers (k, p) and the schedule family they apply to.

    ``base`` must be a case-2 schedule at coupling phase pi/4; its detuning
    fields are placeholders that the tuner overwrites.  Requires k > p > 0
    so that the tuned solution keeps delta1 > delta2.
    """

    k: int
    p: int
    base: dynamics.RampSchedule
    tolerance: float = 1e-6

    def __post_init__(self):
        if not (self.k > self.p > 0):
            raise ValueError(f"winding numbers need k > p > 0, got k={self.k}, p={self.p}")
        if self.base.variant != "case2":
            raise ValueError("tuning targets a case2 schedule")
        if abs(self.base.phi - math.pi / 4.0) > 1e-12:
            raise ValueError("tuning requires coupling phase pi/4")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")

    @property
    def alpha_target(self):
        return 2.0 * math.pi * self.k

    @property
    def beta_target(self):
        return 2.0 * math.pi * self.p


@dataclass(frozen=True)
class TuneResult:
    detunings: DetuningPair
    alpha2: float
    beta2: float
    iterations: int
    residual: tuple


def decoupled_guess(target: TuneTarget):
    """Closed-form solution when all couplings vanish.

    With only detunings present the branch integrals reduce to
    (delta1 +- delta2) * t_max / 2, so the quantization conditions invert
    exactly: delta1 + delta2 = 4 k pi / t_max, delta1 - delta2 = 4 p pi / t_max.
    """
    t_max = target.base.t_max
    total = 2.0 * target.alpha_target / t_max
    difference = 2.0 * target.beta_target / t_max
    return DetuningPair((total + difference) / 2.0, (total - difference) / 2.0)


def phase_residual(detunings: DetuningPair, target: TuneTarget):
    """(alpha2 - 2k pi, beta2 - 2p pi) at the given detunings."""
    schedule = target.base.replace(delta1=detunings.delta1, delta2=detunings.delta2)
    alpha2, beta2 = dynamics.adiabatic_phases(schedule, abs_tol=target.tolerance / 10.0)
    return alpha2 - target.alpha_target, beta2 - target.beta_target


def _project(d1, d2, floor):
    d2 = max(d2, floor)
    if d1 <= d2 + floor:
        d1 = d2 + floor
    return d1, d2


def tune(target: TuneTarget, guess: DetuningPair = None, max_iterations=MAX_ITERATIONS):
    """Solve for detunings that quantize both adiabatic phases.

    Starts from the decoupled closed form unless a guess is supplied; the
    guess must satisfy delta1 > delta2 > 0.  Raises ConvergenceError with
    the last residual if the iteration ceiling is reached or the Jacobian
    degenerates (usually a sign the winding numbers are unsuitable for the
    schedule).
    """
    if guess is None:
        guess = decoupled_guess(target)
    if not (guess.delta1 > guess.delta2 > 0):
        raise ValueError("initial guess must satisfy delta1 > delta2 > 0")

    floor = 1e-9 * (guess.delta1 + guess.delta2)
    d1, d2 = guess.delta1, guess.delta2
    residual = np.array(phase_residual(DetuningPair(d1, d2), target))

    for iteration in range(1, max_iterations + 1):
        if np.max(np.abs(residual)) < target.tolerance:
            alpha2 = residual[0] + target.alpha_target
            beta2 = residual[1] + target.beta_target
            return TuneResult(DetuningPair(d1, d2), alpha2, beta2,
                              iteration - 1, tuple(residual))

        jac = np.empty((2, 2))
        for column, (p1, p2) in enumerate(((d1 * (1 + JACOBIAN_STEP), d2),
                                           (d1, d2 * (1 + JACOBIAN_STEP)))):
            step = (p1 - d1) if column == 0 else (p2 - d2)
            perturbed = np.array(phase_residual(DetuningPair(p1, p2), target))
            jac[:, column] = (perturbed - residual) / step

        determinant = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        if abs(determinant) < 1e-12 * max(1.0, float(np.max(np.abs(jac))) ** 2):
            raise ConvergenceError(
                "singular phase Jacobian; try different winding numbers (k, p)",
                residual=tuple(residual),
            )
        delta = np.linalg.solve(jac, -residual)

        scale = 1.0
        for _ in range(MAX_BACKTRACKS):
            c1, c2 = _project(d1 + scale * delta[0], d2 + scale * delta[1], floor)
            candidate = np.array(phase_residual(DetuningPair(c1, c2), target))
            if np.linalg.norm(candidate) < np.linalg.norm(residual):
                d1, d2, residual = c1, c2, candidate
                break
            scale /= 2.0
        else:
            raise ConvergenceError(
                "damped Newton stalled before reaching tolerance",
                residual=tuple(residual),
            )

    raise ConvergenceError(
        f"no convergence within {max_iterations} iterations",
        residual=tuple(residual),
    )
