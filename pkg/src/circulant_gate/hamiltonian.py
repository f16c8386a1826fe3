"""Hamiltonian constructors for the driven two-spin system.

The general matrix couples the spins with strength J and phases
(couple_phase1, couple_phase2) and drives each spin with Rabi frequency
omega_k and phase drive_phase_k:

    H = J (s1+ e^{-i vphi1} + s1- e^{+i vphi1}) (s2+ e^{-i vphi2} + s2- e^{+i vphi2})
      + O1 (s1+ e^{+i phi1} + s1- e^{-i phi1}) + O2 (s2+ e^{+i phi2} + s2- e^{-i phi2})

Two parameter locks make the matrix circulant, which pins its eigenvectors
to the four Fourier modes regardless of the coupling magnitudes:

  * case 1: O2 = J, both spin-2 phases equal, spin-1 drive off;
  * case 2: same as case 1 plus a real spin-1 drive (O1 != 0, phase 0).

The rabi-controlled variant keeps O2 free (not circulant until O2 = J).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    IDENTITY2,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    tensor,
)


def _coupling_op(phase):
    # spin-spin convention: s+ carries e^{-i phase}
    return SIGMA_PLUS * np.exp(-1j * phase) + SIGMA_MINUS * np.exp(1j * phase)


def _drive_op(phase):
    # single-spin drive convention: s+ carries e^{+i phase}
    return SIGMA_PLUS * np.exp(1j * phase) + SIGMA_MINUS * np.exp(-1j * phase)


def _fold_negative(magnitude, phase):
    """Negative magnitudes are folded into a pi phase shift."""
    if magnitude < 0:
        return -magnitude, phase + math.pi
    return magnitude, phase


@dataclass(frozen=True)
class GeneralParams:
    """Instantaneous coefficients of the general two-spin Hamiltonian.

    All frequencies are angular (rad/ms) and non-negative after
    construction; negative inputs are canonicalized by shifting the
    corresponding phase by pi.
    """

    j: float
    omega1: float = 0.0
    omega2: float = 0.0
    couple_phase1: float = 0.0
    couple_phase2: float = 0.0
    drive_phase1: float = 0.0
    drive_phase2: float = 0.0

    def __post_init__(self):
        j, cp1 = _fold_negative(self.j, self.couple_phase1)
        o1, dp1 = _fold_negative(self.omega1, self.drive_phase1)
        o2, dp2 = _fold_negative(self.omega2, self.drive_phase2)
        for name, value in (("j", j), ("omega1", o1), ("omega2", o2),
                            ("couple_phase1", cp1), ("couple_phase2", self.couple_phase2),
                            ("drive_phase1", dp1), ("drive_phase2", dp2)):
            if not math.isfinite(value):
                raise ValueError(f"GeneralParams.{name} must be finite")
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "omega1", o1)
        object.__setattr__(self, "omega2", o2)
        object.__setattr__(self, "couple_phase1", cp1)
        object.__setattr__(self, "drive_phase1", dp1)
        object.__setattr__(self, "drive_phase2", dp2)


@dataclass(frozen=True)
class DetuningPair:
    """Energy offsets (rad/ms) applied to spin 1 and spin 2 via sigma_z."""

    delta1: float
    delta2: float

    def __post_init__(self):
        if not (math.isfinite(self.delta1) and math.isfinite(self.delta2)):
            raise ValueError("detunings must be finite")


@dataclass(frozen=True)
class CirculantSpec:
    """First column (c0, c1, c2, c3) of a 4x4 circulant matrix."""

    c0: complex
    c1: complex
    c2: complex
    c3: complex

    @classmethod
    def hermitian(cls, c0, c1, c2):
        """Hermitian circulant: c0, c2 real and c3 = conj(c1)."""
        return cls(complex(float(c0)), complex(c1), complex(float(c2)), np.conj(complex(c1)))

    def matrix(self):
        w = np.array([self.c0, self.c1, self.c2, self.c3], dtype=complex)
        rows = np.arange(4)
        return w[(rows[:, None] - rows[None, :]) % 4]


def build_general(p: GeneralParams):
    """Assemble the 4x4 Hermitian matrix of the general Hamiltonian."""
    h = p.j * tensor(_coupling_op(p.couple_phase1), _coupling_op(p.couple_phase2))
    if p.omega1:
        h = h + p.omega1 * tensor(_drive_op(p.drive_phase1), IDENTITY2)
    if p.omega2:
        h = h + p.omega2 * tensor(IDENTITY2, _drive_op(p.drive_phase2))
    return h


def build_case1(j, phi):
    """Circulant Hamiltonian with the spin-2 drive locked to the coupling.

    Requires j >= 0.  Eigenvalues are (+-2j cos phi, +-2j sin phi) with the
    Fourier modes as eigenvectors.
    """
    if j < 0:
        raise ValueError("build_case1 requires j >= 0")
    return build_general(GeneralParams(j, 0.0, j, 0.0, phi, 0.0, phi))


def build_case2(j, omega1, phi):
    """Case-1 lock plus a real drive on spin 1; still circulant."""
    if j < 0 or omega1 < 0:
        raise ValueError("build_case2 requires j, omega1 >= 0")
    return build_general(GeneralParams(j, omega1, j, 0.0, phi, 0.0, phi))


def build_rabi_controlled(j, omega1, omega2, phi):
    """Two-spin Hamiltonian with an independent spin-2 drive.

    Not circulant unless omega2 == j; commutes with sigma_x on spin 1,
    which is what makes its eigenbasis exactly solvable.
    """
    return build_general(GeneralParams(j, omega1, omega2, 0.0, phi, 0.0, phi))


def build_detuning(d: DetuningPair):
    """Diagonal detuning term: diag(-d1-d2, -d1+d2, d1-d2, d1+d2)."""
    return d.delta1 * tensor(SIGMA_Z, IDENTITY2) + d.delta2 * tensor(IDENTITY2, SIGMA_Z)


def is_circulant(h, tol):
    """Test h[r, c] == w[(r - c) mod 4] against the first column w.

    Returns (flag, w).  Accepts arbitrary complex matrices; intended as a
    diagnostic, so no Hermiticity is assumed.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    h = np.asarray(h, dtype=complex)
    w = h[:, 0].copy()
    rows = np.arange(4)
    expected = w[(rows[:, None] - rows[None, :]) % 4]
    deviation = float(np.max(np.abs(h - expected)))
    return deviation <= tol, w


def fourier_state(p):
    """Fourier mode p: component j equals i^(j*p) / 2."""
    if p not in (0, 1, 2, 3):
        raise IndexError(f"Fourier index must be 0..3, got {p}")
    return np.array([1j ** (j * p) for j in range(4)], dtype=complex) / 2.0


# Columns are fourier_state(0) .. fourier_state(3).
FOURIER_BASIS = np.column_stack([fourier_state(p) for p in range(4)])
