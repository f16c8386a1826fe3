"""Trapped-ion physical layer: chain statics, transverse modes, couplings.

Axial equilibrium positions are dimensionless, in units of the Coulomb
length l = (e^2 / 4 pi eps0 M omega_z^2)^(1/3).  Mode frequencies are
angular (rad/ms) like the rest of the package; only the Lamb-Dicke factor
touches SI quantities, converting to rad/s internally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChainInstabilityError, ConvergenceError, ResonanceError

# CODATA 2018
HBAR = 1.054571817e-34          # J s
ELEMENTARY_CHARGE = 1.602176634e-19   # C
EPSILON_0 = 8.8541878128e-12    # F/m
ATOMIC_MASS_KG = 1.66053906660e-27    # kg

RAD_PER_MS_TO_RAD_PER_S = 1e3


def _axial_force(u):
    diff = u[:, None] - u[None, :]
    np.fill_diagonal(diff, np.inf)
    return u - np.sum(np.sign(diff) / diff**2, axis=1)


def _axial_jacobian(u):
    diff = u[:, None] - u[None, :]
    np.fill_diagonal(diff, np.inf)
    inv3 = 2.0 / np.abs(diff) ** 3
    jac = -inv3
    np.fill_diagonal(jac, 1.0 + np.sum(inv3, axis=1))
    return jac


def equilibrium_positions(n, tol=1e-12, max_iterations=200):
    """Dimensionless axial equilibrium positions of an n-ion chain.

    Damped Newton on the force balance from a uniformly spaced guess;
    positions come out sorted ascending with the center of mass at zero.
    """
    if not 2 <= n <= 20:
        raise ValueError(f"ion count must be between 2 and 20, got {n}")
    u = np.linspace(-(n - 1) / 2.0, (n - 1) / 2.0, n)
    residual = _axial_force(u)
    for _ in range(max_iterations):
        if np.max(np.abs(residual)) < tol:
            break
        step = np.linalg.solve(_axial_jacobian(u), -residual)
        scale = 1.0
        while scale > 1e-6:
            candidate = u + scale * step
            if np.all(np.diff(candidate) > 0):
                trial = _axial_force(candidate)
                if np.linalg.norm(trial) < np.linalg.norm(residual):
                    u, residual = candidate, trial
                    break
            scale /= 2.0
        else:
            raise ConvergenceError("equilibrium Newton stalled",
                                   residual=float(np.max(np.abs(residual))))
    else:
        raise ConvergenceError("equilibrium positions did not converge",
                               residual=float(np.max(np.abs(residual))))
    return u - np.mean(u)


def transverse_hessian(positions, aspect):
    """Dimensionless transverse Hessian (units of omega_z^2); aspect = omega_x/omega_z."""
    u = np.asarray(positions, dtype=float)
    diff = u[:, None] - u[None, :]
    np.fill_diagonal(diff, np.inf)
    inv3 = 1.0 / np.abs(diff) ** 3
    hess = inv3.copy()
    np.fill_diagonal(hess, aspect**2 - np.sum(inv3, axis=1))
    return hess


def transverse_modes(positions, omega_x, omega_z):
    """Transverse normal modes: frequencies descending plus the mode matrix.

    Returns (freqs, b) with freqs[0] = omega_x (center-of-mass mode) and
    b[ion, mode] orthonormal columns.  A non-positive Hessian eigenvalue
    means the linear chain has buckled and raises ChainInstabilityError.
    """
    aspect = omega_x / omega_z
    eigenvalues, eigenvectors = np.linalg.eigh(transverse_hessian(positions, aspect))
    if eigenvalues[0] <= 0:
        raise ChainInstabilityError(
            f"transverse mode softened (eigenvalue {eigenvalues[0]:.3e} <= 0); "
            f"omega_x/omega_z = {aspect:.3f} is below the linear-chain threshold"
        )
    order = np.argsort(eigenvalues)[::-1]
    freqs = omega_z * np.sqrt(eigenvalues[order])
    b = eigenvectors[:, order]
    # deterministic sign: largest-magnitude component of each mode positive
    for m in range(b.shape[1]):
        pivot = np.argmax(np.abs(b[:, m]))
        if b[pivot, m] < 0:
            b[:, m] = -b[:, m]
    return freqs, b


@dataclass(frozen=True)
class IonChain:
    """Static chain data: geometry, transverse modes, laser wavenumber.

    Frequencies are angular rad/ms, the mass is in kg, and k_laser is the
    effective wavenumber in 1/m.
    """

    n: int
    omega_x: float
    omega_z: float
    mass: float
    k_laser: float
    positions: np.ndarray
    mode_freqs: np.ndarray
    mode_matrix: np.ndarray

    @property
    def length_scale_m(self):
        omega_z_si = self.omega_z * RAD_PER_MS_TO_RAD_PER_S
        return (ELEMENTARY_CHARGE**2
                / (4.0 * np.pi * EPSILON_0 * self.mass * omega_z_si**2)) ** (1.0 / 3.0)


def build_chain(n, omega_x, omega_z, mass, k_laser):
    """Solve statics and transverse modes for a chain of identical ions."""
    if omega_x <= 0 or omega_z <= 0:
        raise ValueError("trap frequencies must be positive")
    if mass <= 0:
        raise ValueError("ion mass must be positive")
    positions = equilibrium_positions(n)
    freqs, b = transverse_modes(positions, omega_x, omega_z)
    return IonChain(n, omega_x, omega_z, mass, k_laser, positions, freqs, b)


def lamb_dicke(chain: IonChain, ion, mode):
    """Lamb-Dicke parameter b[ion, mode] * k * sqrt(hbar / 2 M omega_mode)."""
    omega_si = chain.mode_freqs[mode] * RAD_PER_MS_TO_RAD_PER_S
    zero_point = np.sqrt(HBAR / (2.0 * chain.mass * omega_si))
    return chain.mode_matrix[ion, mode] * chain.k_laser * zero_point


def lamb_dicke_matrix(chain: IonChain):
    omega_si = chain.mode_freqs * RAD_PER_MS_TO_RAD_PER_S
    zero_point = np.sqrt(HBAR / (2.0 * chain.mass * omega_si))
    return chain.mode_matrix * chain.k_laser * zero_point[None, :]


@dataclass(frozen=True)
class DriveParams:
    """Bichromatic drive: Rabi frequency, beatnote, and the two target ions."""

    rabi_x: float
    beatnote: float
    ion_k: int
    ion_m: int

    def __post_init__(self):
        if self.ion_k == self.ion_m:
            raise ValueError("target ions must differ")


def _check_ions(chain, drive):
    for ion in (drive.ion_k, drive.ion_m):
        if not 0 <= ion < chain.n:
            raise ValueError(f"ion index {ion} out of range for {chain.n} ions")


def spin_phonon_couplings(chain: IonChain, drive: DriveParams):
    """Per-mode couplings g[ion, mode] = eta[ion, mode] * rabi_x."""
    _check_ions(chain, drive)
    return lamb_dicke_matrix(chain) * drive.rabi_x


def effective_J(chain: IonChain, drive: DriveParams):
    """Dispersive spin-spin coupling and its per-mode contributions.

    J = sum_n g_kn g_mn / (beatnote^2 - omega_n^2), evaluated with every
    frequency in rad/ms.  A beatnote within 1e-9 relative of any mode is
    rejected as resonant.
    """
    _check_ions(chain, drive)
    close = np.abs(chain.mode_freqs - drive.beatnote) <= 1e-9 * chain.mode_freqs
    if np.any(close):
        index = int(np.argmax(close))
        raise ResonanceError(
            f"beatnote {drive.beatnote:.6g} rad/ms resonant with mode {index} "
            f"({chain.mode_freqs[index]:.6g} rad/ms)"
        )
    g = spin_phonon_couplings(chain, drive)
    per_mode = (g[drive.ion_k] * g[drive.ion_m]
                / (drive.beatnote**2 - chain.mode_freqs**2))
    return float(np.sum(per_mode)), per_mode


def dispersive_margin(chain: IonChain, drive: DriveParams):
    """Worst-case |omega_n - beatnote| / g over modes; +inf for zero drive.

    The dispersive elimination is trustworthy when this is much larger
    than 1; the command-line layer warns below 10 and rejects below 3.
    """
    _check_ions(chain, drive)
    if drive.rabi_x == 0:
        return float("inf")
    g = spin_phonon_couplings(chain, drive)
    strongest = np.maximum(np.abs(g[drive.ion_k]), np.abs(g[drive.ion_m]))
    detunings = np.abs(chain.mode_freqs - drive.beatnote)
    with np.errstate(divide="ignore"):
        ratios = np.where(strongest > 0, detunings / strongest, np.inf)
    return float(np.min(ratios))
