import itertools

import numpy as np
import pytest
import scipy.linalg as la
from hypothesis import given, settings
from hypothesis import strategies as st

from haldane_ions import spin_model as sm

from conftest import random_state


def kron_site(op, site, n):
    out = np.ones((1, 1))
    for k in range(n):
        out = np.kron(out, op if k == site else np.eye(3))
    return out


def dense_oracle(J, lam, D, h):
    """XXZ-D Hamiltonian assembled from explicit Kronecker products."""
    n = J.shape[0]
    H = np.zeros((3**n, 3**n), dtype=complex)
    for i, j in itertools.combinations(range(n), 2):
        H += J[i, j] * (kron_site(sm.SX, i, n) @ kron_site(sm.SX, j, n)
                        + kron_site(sm.SY, i, n) @ kron_site(sm.SY, j, n)
                        + lam * kron_site(sm.SZ, i, n) @ kron_site(sm.SZ, j, n))
    D = np.broadcast_to(D, (n,))
    for i in range(n):
        H += D[i] * kron_site(sm.SZ @ sm.SZ, i, n) - h * (-1) ** i * kron_site(sm.SZ, i, n)
    return H


def test_spin_algebra():
    comm = sm.SX @ sm.SY - sm.SY @ sm.SX
    assert np.allclose(comm, 1j * sm.SZ)
    S2 = sm.SX @ sm.SX + sm.SY @ sm.SY + sm.SZ @ sm.SZ
    assert np.allclose(S2, 2 * np.eye(3))
    assert np.allclose(sm.FP, np.sqrt(2) * (np.outer([1, 0, 0], [0, 1, 0]) + np.outer([0, 1, 0], [0, 0, 1])))


def test_two_site_heisenberg_spectrum():
    J = np.array([[0.0, 1.0], [1.0, 0.0]])
    E = np.linalg.eigvalsh(sm.build_hamiltonian(sm.ModelParams(J)).toarray())
    # S_tot = 0, 1, 2 with E = [S(S+1) - 4] / 2
    expected = np.sort([-2.0] + [-1.0] * 3 + [1.0] * 5)
    assert np.allclose(E, expected, atol=1e-13)


def test_hamiltonian_matches_kron_oracle(rng):
    n = 4
    A = rng.normal(size=(n, n))
    J = A + A.T
    D = rng.normal(size=n)
    p = sm.ModelParams(J, lam=0.7, D=D, h=0.3)
    H = sm.build_hamiltonian(p).toarray()
    assert np.abs(H - dense_oracle(J, 0.7, D, 0.3)).max() < 1e-12


def test_product_state_ordering():
    psi = sm.product_state([1, 0, -1])
    # digits (0, 1, 2) -> index 0*9 + 1*3 + 2
    assert np.flatnonzero(psi).tolist() == [5]
    assert sm.site_magnetizations(3)[5].tolist() == [1, 0, -1]


def test_sector_blocks_reproduce_spectrum():
    n = 4
    p = sm.ModelParams(sm.nearest_neighbor_couplings(n), 1.2, 0.5, 0.2)
    H = sm.build_hamiltonian(p)
    full = np.linalg.eigvalsh(H.toarray())
    parts = []
    for m in range(-n, n + 1):
        idx = sm.sector_indices(n, m)
        parts.append(np.linalg.eigvalsh(H.toarray()[np.ix_(idx, idx)]))
    assert np.allclose(np.sort(np.concatenate(parts)), full, atol=1e-12)
    # the Hamiltonian conserves total magnetization
    M = sm.total_sz(n)
    assert abs(H @ M - M @ H).max() < 1e-14


def test_solve_ground_lanczos_matches_dense():
    n = 8
    p = sm.ModelParams(sm.nearest_neighbor_couplings(n), 1.0, 0.3)
    H = sm.build_hamiltonian(p)
    E_full, v = sm.solve_ground(H, k=2)  # 6561 > dense threshold: Lanczos
    E_sec, _ = sm.solve_ground(H, k=1, sector=0, n_sites=n)
    E_levels, sectors = sm.lowest_levels(H, n, k=1)
    assert E_full[0] == pytest.approx(E_levels[0], abs=1e-9)
    assert E_sec[0] == pytest.approx(E_levels[sectors == 0][0], abs=1e-9)
    r = H @ v[:, 0] - E_full[0] * v[:, 0]
    assert np.linalg.norm(r) < 1e-8


def test_size_guard():
    with pytest.raises(ValueError):
        sm.check_size(sm.MAX_SITES + 1)


def test_model_params_validation():
    with pytest.raises(ValueError):
        sm.ModelParams(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValueError):
        sm.ModelParams(sm.nearest_neighbor_couplings(3), lam=-1)
    with pytest.raises(ValueError):
        sm.ModelParams(sm.nearest_neighbor_couplings(3), D=[1.0, 2.0])


def test_rotation_is_unitary_and_rotates_axes():
    R = sm.rotation("y", np.pi / 2)
    assert np.allclose(R @ R.conj().T, np.eye(3))
    assert np.allclose(R @ sm.SZ @ R.conj().T, sm.SX, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 2.0))
def test_scheme1_lambda_roundtrip(lam):
    th = sm.theta_from_lambda(1, lam)
    assert sm.lambda_from_theta(1, th) == pytest.approx(lam, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 50.0), st.sampled_from(sm.FORMS))
def test_scheme2_lambda_roundtrip(lam, form):
    th = sm.theta_from_lambda(2, lam, form)
    assert sm.lambda_from_theta(2, th, form) == pytest.approx(lam, rel=1e-10)


def test_effective_form_difference_is_single_site_only():
    J = np.array([[0.2, 1.0], [1.0, 0.2]])
    for scheme in (1, 2):
        a = sm.effective_params(scheme, 0.8, 0.5, J, "printed")
        b = sm.effective_params(scheme, 0.8, 0.5, J, "secular")
        if scheme == 1:
            assert a.lam == pytest.approx(b.lam) and a.J_scale == pytest.approx(b.J_scale)
        assert not np.allclose(a.D, b.D)


def test_dprime_for_target_D_inverts():
    J = np.array([[0.3, 1.0], [1.0, 0.3]])
    for scheme, form in itertools.product((1, 2), sm.FORMS):
        Dp = sm.dprime_for_target_D(scheme, 0.4, 1.7, J_ii=0.3, form=form)
        ep = sm.effective_params(scheme, 0.4, Dp, J, form)
        assert np.allclose(ep.D, 1.7, atol=1e-12)


def test_staggered_field_sign(rng):
    n = 3
    H = sm.staggered_field_operator(n, 0.5).toarray()
    psi = sm.product_state([1, 1, 1])
    # -h sum (-1)^i m_i = -0.5 * (1 - 1 + 1)
    assert np.vdot(psi, H @ psi).real == pytest.approx(-0.5)


def test_expectation_is_real_for_hermitian(rng):
    H = sm.build_hamiltonian(sm.ModelParams(sm.nearest_neighbor_couplings(3), 0.4, 0.1, 0.2))
    assert la.ishermitian(H.toarray(), atol=1e-14)
    psi = random_state(rng, 27)
    assert abs(np.vdot(psi, H @ psi).imag) < 1e-13
