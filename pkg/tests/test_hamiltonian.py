import numpy as np
import pytest

from circulant_gate import core
from circulant_gate.hamiltonian import (
    CirculantSpec,
    DetuningPair,
    GeneralParams,
    build_case1,
    build_case2,
    build_detuning,
    build_general,
    build_rabi_controlled,
    fourier_state,
    is_circulant,
)

TWO_PI = 2.0 * np.pi


def test_general_zero_couplings_is_zero():
    h = build_general(GeneralParams(0.0, 0.0, 0.0))
    assert np.array_equal(h, np.zeros((4, 4)))


def test_general_matrix_elements():
    # row 0 fixes all three coefficient conventions at once
    j, o1, o2 = 1.3, 0.7, 2.1
    vp1, vp2, dp1, dp2 = 0.3, 0.5, 0.7, 0.9
    h = build_general(GeneralParams(j, o1, o2, vp1, vp2, dp1, dp2))
    assert h[0, 1] == pytest.approx(o2 * np.exp(-1j * dp2))
    assert h[0, 2] == pytest.approx(o1 * np.exp(-1j * dp1))
    assert h[0, 3] == pytest.approx(j * np.exp(1j * (vp1 + vp2)))
    assert h[1, 2] == pytest.approx(j * np.exp(-1j * (vp2 - vp1)))
    assert core.hermiticity_defect(h) == 0.0


def test_general_coupling_only_pattern():
    # pure spin-spin term at zero phases: sigma_x (x) sigma_x
    h = build_general(GeneralParams(1.0, 0.0, 0.0))
    assert np.array_equal(h, core.tensor(core.SIGMA_X, core.SIGMA_X))


def test_general_with_lock_conditions_is_circulant():
    phi = 0.77
    h = build_general(GeneralParams(2.0, 0.0, 2.0, 0.0, phi, 0.0, phi))
    flag, _ = is_circulant(h, 1e-12)
    assert flag


def test_negative_magnitudes_fold_into_phases():
    p = GeneralParams(-1.0, -2.0, -3.0)
    assert p.j == 1.0 and p.omega1 == 2.0 and p.omega2 == 3.0
    h_folded = build_general(p)
    h_direct = (
        -1.0 * core.tensor(core.SIGMA_X, core.SIGMA_X)
        - 2.0 * core.tensor(core.SIGMA_X, core.IDENTITY2)
        - 3.0 * core.tensor(core.IDENTITY2, core.SIGMA_X)
    )
    assert np.max(np.abs(h_folded - h_direct)) < 1e-12


def test_case1_zero_coupling():
    assert np.array_equal(build_case1(0.0, 0.3), np.zeros((4, 4)))


def test_case1_matches_general_reduction():
    rng = np.random.default_rng(1)
    for _ in range(25):
        j = rng.uniform(0, 5)
        phi = rng.uniform(0, TWO_PI)
        direct = build_case1(j, phi)
        general = build_general(GeneralParams(j, 0.0, j, 0.0, phi, 0.0, phi))
        assert np.max(np.abs(direct - general)) <= 1e-15


def test_case1_eigenvalues():
    j = TWO_PI * 2.1
    phi = np.pi / 8
    values, _ = core.eigh(build_case1(j, phi))
    expected = np.sort([2 * j * np.cos(phi), -2 * j * np.cos(phi),
                        2 * j * np.sin(phi), -2 * j * np.sin(phi)])
    assert np.allclose(values, expected, atol=1e-12 * j)


def test_case1_eigenvectors_are_fourier_modes():
    rng = np.random.default_rng(2)
    for _ in range(50):
        h = build_case1(rng.uniform(0.1, 10), rng.uniform(0, TWO_PI))
        for p in range(4):
            psi = fourier_state(p)
            expectation = np.vdot(psi, h @ psi)
            residual = np.linalg.norm(h @ psi - expectation * psi)
            assert residual < 1e-10


def test_case2_reduces_to_case1():
    assert np.array_equal(build_case2(1.7, 0.0, 0.9), build_case1(1.7, 0.9))


def test_case2_eigenvalues():
    j = TWO_PI * 2.0
    omega1 = TWO_PI * 100.0
    phi = np.pi / 4
    values, _ = core.eigh(build_case2(j, omega1, phi))
    expected = np.sort([omega1 + 2 * j * np.cos(phi), omega1 - 2 * j * np.cos(phi),
                        -omega1 + 2 * j * np.sin(phi), -omega1 - 2 * j * np.sin(phi)])
    assert np.allclose(values, expected, atol=1e-10 * omega1)


def test_case2_circulant_and_hermitian_draws():
    rng = np.random.default_rng(3)
    for _ in range(50):
        h = build_case2(rng.uniform(0, 5), rng.uniform(0, 50), rng.uniform(0, TWO_PI))
        assert core.hermiticity_defect(h) < 1e-14 * max(1.0, np.max(np.abs(h)))
        flag, _ = is_circulant(h, 1e-10)
        assert flag


def test_detuning_zero():
    assert np.array_equal(build_detuning(DetuningPair(0.0, 0.0)), np.zeros((4, 4)))


def test_detuning_diagonal_and_eigenvalues():
    d1, d2 = TWO_PI * 120.0, TWO_PI * 30.0
    h = build_detuning(DetuningPair(d1, d2))
    assert np.array_equal(np.diag(h), np.array([-d1 - d2, -d1 + d2, d1 - d2, d1 + d2]))
    values = np.sort(np.diag(h).real)
    assert np.allclose(core.to_khz(values), [-150, -90, 90, 150])


def test_detuning_equidistant_when_ratio_two():
    # levels are +-(d1+d2), +-(d1-d2); all three gaps are equal exactly
    # when d1 = 2*d2 (spacing 2*d2).  A 3:1 ratio gives gaps (2, 4, 2)*d2.
    d2 = 1.1
    h = build_detuning(DetuningPair(2 * d2, d2))
    spacings = np.diff(np.sort(np.diag(h).real))
    assert np.allclose(spacings, 2 * d2)
    h3 = build_detuning(DetuningPair(3 * d2, d2))
    spacings3 = np.diff(np.sort(np.diag(h3).real))
    assert not np.allclose(spacings3, spacings3[0])


def test_rabi_controlled_circulant_only_at_lock():
    j, o1, phi = 1.0, 3.0, np.pi / 4
    locked, _ = is_circulant(build_rabi_controlled(j, o1, j, phi), 1e-12)
    unlocked, _ = is_circulant(build_rabi_controlled(j, o1, 2.5 * j, phi), 1e-9)
    assert locked and not unlocked


def test_rabi_controlled_decoupled_spins():
    o1, o2 = 3.0, 5.0
    values, _ = core.eigh(build_rabi_controlled(0.0, o1, o2, 0.0))
    assert np.allclose(values, np.sort([o1 + o2, o1 - o2, -o1 + o2, -o1 - o2]))


def test_rabi_controlled_product_eigenvectors():
    # sigma_x on spin 1 commutes with the full operator, so eigenvectors
    # factor as |+-_1> (x) (2-level eigenvector)
    j = TWO_PI * 2.0
    o2 = j + TWO_PI * 3.8
    h = build_rabi_controlled(j, TWO_PI * 30.0, o2, np.pi / 4)
    sx1 = core.tensor(core.SIGMA_X, core.IDENTITY2)
    assert np.max(np.abs(h @ sx1 - sx1 @ h)) < 1e-12 * np.max(np.abs(h))
    _, vectors = core.eigh(h)
    for col in range(4):
        v = vectors[:, col]
        expectation = np.vdot(v, sx1 @ v).real
        assert abs(abs(expectation) - 1.0) < 1e-10


def test_is_circulant_identity():
    flag, witness = is_circulant(np.eye(4, dtype=complex), 1e-12)
    assert flag
    assert np.array_equal(witness, np.array([1, 0, 0, 0], dtype=complex))


def test_is_circulant_rejects_broken_drive_phase():
    h = build_general(GeneralParams(1.0, 0.5, 1.0, 0.0, 0.4, np.pi / 3, 0.4))
    flag, _ = is_circulant(h, 1e-9)
    assert not flag


def test_is_circulant_requires_positive_tol():
    with pytest.raises(ValueError):
        is_circulant(np.eye(4), 0.0)


def test_fourier_states_explicit():
    assert np.allclose(fourier_state(0), np.array([1, 1, 1, 1]) / 2)
    assert np.allclose(fourier_state(1), np.array([1, 1j, -1, -1j]) / 2)
    assert np.allclose(fourier_state(3), np.array([1, -1j, -1, 1j]) / 2)
    with pytest.raises(IndexError):
        fourier_state(4)


def test_fourier_states_orthonormal():
    basis = np.column_stack([fourier_state(p) for p in range(4)])
    gram = basis.conj().T @ basis
    assert np.max(np.abs(gram - np.eye(4))) < 1e-14


def test_circulant_spec_matrix_layout():
    spec = CirculantSpec(1 + 0j, 2 + 1j, 3 + 0j, 4 - 2j)
    m = spec.matrix()
    w = [spec.c0, spec.c1, spec.c2, spec.c3]
    for r in range(4):
        for c in range(4):
            assert m[r, c] == w[(r - c) % 4]


def test_hermitian_circulant_spec():
    spec = CirculantSpec.hermitian(0.5, 1 - 2j, -0.3)
    m = spec.matrix()
    assert core.hermiticity_defect(m) < 1e-15


def test_fourier_modes_diagonalize_random_hermitian_circulants():
    # eigenvectors are fixed by the symmetry alone, not the magnitudes
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        c0, c2 = rng.standard_normal(2)
        c1 = rng.standard_normal() + 1j * rng.standard_normal()
        m = CirculantSpec.hermitian(c0, c1, c2).matrix()
        for p in range(4):
            psi = fourier_state(p)
            expectation = np.vdot(psi, m @ psi)
            assert np.linalg.norm(m @ psi - expectation * psi) < 1e-10
