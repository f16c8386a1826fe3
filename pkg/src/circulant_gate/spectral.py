"""Closed-form branch frequencies and tracked numerical spectra.

Branch naming follows the initial-limit convention for detuning ramps with
delta1 > delta2 > 0: the lambda pair starts at +-(delta1 + delta2) and the
mu pair at +-(delta1 - delta2).  Labels are attached at t = 0 and carried
along by eigenvector continuity, never by re-sorting, so they survive
avoided crossings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import hamiltonian
from .core import eigh
from .errors import DegeneracyError

BRANCH_LABELS = ("lambda_plus", "mu_plus", "mu_minus", "lambda_minus")

# Tolerance: eigenvalues closer than this (relative to the spectral scale)
# are treated as degenerate.
DEGENERACY_RTOL = 1e-9


class BranchValues(NamedTuple):
    lambda_plus: float
    mu_plus: float
    mu_minus: float
    lambda_minus: float


class FinalBranch(NamedTuple):
    label: str
    value: float
    fourier_index: int
    vector: np.ndarray


def _split_radicand(total, cross):
    # total - 2*cross can go negative by round-off only
    inner = total - 2.0 * cross
    if inner < -1e-12 * max(total, 1.0):
        raise AssertionError(f"negative radicand {inner}; inputs not real?")
    return np.sqrt(total + 2.0 * cross), np.sqrt(max(inner, 0.0))


def analytic_case1(j, delta1, delta2, phi):
    """Closed-form branch frequencies for the case-1 Hamiltonian plus detunings."""
    total = 2.0 * j**2 + delta1**2 + delta2**2
    cross = np.sqrt(j**4 * np.cos(2.0 * phi) ** 2 + delta1**2 * (j**2 + delta2**2))
    lam, mu = _split_radicand(total, cross)
    return BranchValues(lam, mu, -mu, -lam)


def analytic_case2(j, omega1, delta1, delta2):
    """Closed-form branch frequencies for case 2 at coupling phase pi/4."""
    total = 2.0 * j**2 + omega1**2 + delta1**2 + delta2**2
    cross = np.sqrt(j**2 * (2.0 * omega1**2 + delta1**2) + delta2**2 * (omega1**2 + delta1**2))
    lam, mu = _split_radicand(total, cross)
    return BranchValues(lam, mu, -mu, -lam)


def degenerate_pairs(values, labels=BRANCH_LABELS, rtol=DEGENERACY_RTOL):
    """List label pairs whose values collide within rtol * spectral scale."""
    values = np.asarray(values, dtype=float)
    scale = max(float(np.max(np.abs(values))), 1e-300)
    pairs = []
    for a in range(len(values)):
        for b in range(a + 1, len(values)):
            if abs(values[a] - values[b]) <= rtol * scale:
                pairs.append((labels[a], labels[b]))
    return pairs


def final_case2(j, omega1, phi, rtol=DEGENERACY_RTOL):
    """Endpoint spectrum of the circulant case-2 Hamiltonian with eigenvectors.

    The branch values are (omega1 + 2j cos phi, omega1 - 2j cos phi,
    -omega1 + 2j sin phi, -omega1 - 2j sin phi).  Direct diagonalization
    fixes the eigenvector pairing: lambda_plus and mu_plus live in the
    even Fourier modes (indices 0 and 2), the minus branches in the odd
    ones (indices 3 and 1).

    Raises DegeneracyError naming the colliding pair when any two values
    meet (phi a multiple of pi/2, or omega1 crossing the coupling gap).
    """
    assignment = (
        ("lambda_plus", omega1 + 2.0 * j * np.cos(phi), 0),
        ("mu_plus", omega1 - 2.0 * j * np.cos(phi), 2),
        ("mu_minus", -omega1 + 2.0 * j * np.sin(phi), 1),
        ("lambda_minus", -omega1 - 2.0 * j * np.sin(phi), 3),
    )
    values = [entry[1] for entry in assignment]
    labels = [entry[0] for entry in assignment]
    collisions = degenerate_pairs(values, labels, rtol)
    if collisions:
        a, b = collisions[0]
        raise DegeneracyError(
            f"degenerate endpoint spectrum: branches {a} and {b} collide "
            f"(j={j:.6g}, omega1={omega1:.6g}, phi={phi:.6g})",
            pair=(a, b),
        )
    return tuple(
        FinalBranch(label, value, index, hamiltonian.fourier_state(index))
        for label, value, index in assignment
    )


@dataclass(frozen=True)
class Spectrum:
    """One instantaneous eigensystem: branch values plus eigenvector columns."""

    values: BranchValues
    vectors: np.ndarray


@dataclass
class SpectralPath:
    """Gauge-continuous eigensystem samples along a schedule.

    values[k, b] is the frequency of branch b at times[k]; vectors[k][:, b]
    the matching eigenvector, with the gauge fixed so successive overlaps
    have non-negative real part.  couplings[k, a, b] estimates
    |<v_a(t_k) | d/dt v_b>| by forward differences (zero on the diagonal).
    """

    times: np.ndarray
    values: np.ndarray
    vectors: np.ndarray
    gaps: np.ndarray
    couplings: np.ndarray
    labels: tuple

    def spectrum(self, k):
        """Instantaneous Spectrum at grid index k."""
        return Spectrum(BranchValues(*self.values[k]), self.vectors[k].copy())


def track(schedule, times, overlap_margin=1e-6):
    """Follow the four eigenbranches of a schedule across a time grid.

    Branches are ordered by descending eigenvalue at the first grid point
    (for detuning ramps with delta1 > delta2 > 0 this is exactly
    BRANCH_LABELS order) and continued by maximal-overlap matching.  An
    ambiguous match, two squared overlaps within ``overlap_margin``, means
    the grid stepped over a degeneracy and raises DegeneracyError.
    """
    from . import dynamics

    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("track needs a sorted grid of at least two times")
    if np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly increasing")

    n = times.size
    values = np.empty((n, 4))
    vectors = np.empty((n, 4, 4), dtype=complex)

    w, v = eigh(dynamics.hamiltonian_at(schedule, times[0]))
    order = np.argsort(w)[::-1]
    values[0] = w[order]
    vectors[0] = v[:, order]

    for k in range(1, n):
        w, v = eigh(dynamics.hamiltonian_at(schedule, times[k]))
        overlap = np.abs(vectors[k - 1].conj().T @ v) ** 2
        assigned = np.empty(4, dtype=int)
        for branch in range(4):
            ranked = np.argsort(overlap[branch])[::-1]
            best, runner_up = ranked[0], ranked[1]
            if overlap[branch, best] - overlap[branch, runner_up] < overlap_margin:
                raise DegeneracyError(
                    f"branch continuation ambiguous at t={times[k]:.6g} ms "
                    f"(overlaps {overlap[branch, best]:.3e} vs "
                    f"{overlap[branch, runner_up]:.3e})",
                    time=times[k],
                )
            assigned[branch] = best
        if len(set(assigned.tolist())) != 4:
            raise DegeneracyError(
                f"branch continuation is not one-to-one at t={times[k]:.6g} ms",
                time=times[k],
            )
        values[k] = w[assigned]
        new_vectors = v[:, assigned]
        # gauge: rotate each column so <v_prev | v_new> is real and >= 0
        inner = np.sum(vectors[k - 1].conj() * new_vectors, axis=0)
        phase = np.where(np.abs(inner) > 0, inner / np.abs(np.where(inner == 0, 1, inner)), 1.0)
        vectors[k] = new_vectors * np.conj(phase)[None, :]

    gaps = np.empty(n)
    for k in range(n):
        diffs = np.abs(values[k][:, None] - values[k][None, :])
        gaps[k] = np.min(diffs[~np.eye(4, dtype=bool)])

    dt = np.diff(times)
    dv = (vectors[1:] - vectors[:-1]) / dt[:, None, None]
    couplings = np.abs(np.einsum("kia,kib->kab", vectors[:-1].conj(), dv))
    couplings[:, range(4), range(4)] = 0.0

    return SpectralPath(times, values, vectors, gaps, couplings, BRANCH_LABELS)


def adiabaticity_margin(path: SpectralPath):
    """Worst-case gap-to-coupling ratio over all branch pairs and times.

    Values much greater than 1 indicate the schedule is adiabatic.  Returns
    +inf when every nonadiabatic coupling vanishes (constant Hamiltonian).
    """
    scale = max(float(np.max(np.abs(path.values))), 1e-300)
    margin = np.inf
    for k in range(path.couplings.shape[0]):
        for a in range(4):
            for b in range(4):
                if a == b:
                    continue
                coupling = path.couplings[k, a, b]
                if coupling <= 1e-14 * scale:
                    continue
                gap = abs(path.values[k, a] - path.values[k, b])
                margin = min(margin, gap / coupling)
    return margin
