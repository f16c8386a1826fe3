"""Dense complex linear algebra on the fixed two-spin basis.

Everything downstream works in the product basis (dndn, dnup, updn, upup)
with sigma_z |up> = +|up>, sigma_z |dn> = -|dn>.  Frequencies are angular,
in rad/ms; user-facing entry points take frequency/2pi in kHz and convert
on ingestion (kHz * 2pi == rad/ms), which removes any 2pi ambiguity from
phase bookkeeping.  Time is in ms throughout.
"""

from __future__ import annotations

import numpy as np

from .errors import NonHermitianError, NonUnitaryError

TWO_PI = 2.0 * np.pi

BASIS_LABELS = ("dndn", "dnup", "updn", "upup")

# Single-spin operators in the (dn, up) basis.
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
PROJECT_DOWN = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
IDENTITY4 = np.eye(4, dtype=complex)


def from_khz(value):
    """Convert frequency/2pi in kHz to angular frequency in rad/ms."""
    return TWO_PI * np.asarray(value, dtype=float) if np.ndim(value) else TWO_PI * float(value)

def to_khz(value):
    """Convert angular frequency in rad/ms to frequency/2pi in kHz."""
    return np.asarray(value, dtype=float) / TWO_PI if np.ndim(value) else float(value) / TWO_PI


def tensor(a, b):
    """Kronecker product of two single-spin operators.

    Index convention: result[2*i + k, 2*j + l] = a[i, j] * b[k, l], so the
    first factor acts on spin 1 and the second on spin 2, consistent with
    the (dndn, dnup, updn, upup) basis order.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError(f"tensor expects two 2x2 operators, got {a.shape} and {b.shape}")
    # einsum keeps each entry the plain product a[i,j]*b[k,l], exactly
    return np.einsum("ij,kl->ikjl", a, b).reshape(4, 4)


def normalize(state):
    """Return state scaled to unit norm."""
    state = np.asarray(state, dtype=complex)
    norm = np.linalg.norm(state)
    if norm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return state / norm


def hermiticity_defect(h):
    h = np.asarray(h, dtype=complex)
    return float(np.max(np.abs(h - h.conj().T)))


def require_hermitian(h, tol=1e-9):
    """Validate Hermiticity within tol relative to the matrix scale."""
    h = np.asarray(h, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(h))))
    defect = hermiticity_defect(h)
    if defect > tol * scale:
        raise NonHermitianError(
            f"matrix is not Hermitian: max |H - H^dag| = {defect:.3e} "
            f"exceeds {tol:.1e} * scale {scale:.3e}"
        )
    return h


def eigh(h, tol=1e-9):
    """Eigendecomposition of a Hermitian matrix.

    Returns (values, vectors) with values ascending and the eigenvectors as
    orthonormal columns of ``vectors``.  Rejects non-Hermitian input.
    """
    h = require_hermitian(h, tol)
    return np.linalg.eigh(h)


def expm_i(h, dt):
    """Propagator step exp(-i * h * dt) by spectral decomposition.

    Unitary by construction up to eigendecomposition round-off.
    """
    if not np.isfinite(dt):
        raise ValueError(f"dt must be finite, got {dt}")
    values, vectors = eigh(h)
    phases = np.exp(-1j * values * dt)
    return (vectors * phases) @ vectors.conj().T


def unitarity_defect(u):
    u = np.asarray(u, dtype=complex)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def require_unitary(u, tol=1e-10):
    u = np.asarray(u, dtype=complex)
    defect = unitarity_defect(u)
    if defect > tol:
        raise NonUnitaryError(
            f"matrix is not unitary: max |U^dag U - 1| = {defect:.3e} exceeds {tol:.1e}"
        )
    return u
