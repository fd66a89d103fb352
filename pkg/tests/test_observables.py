import numpy as np
import pytest
import scipy.linalg as la

from haldane_ions import observables as ob
from haldane_ions import spin_model as sm

from conftest import random_state


def op_chain(ops, n):
    out = np.ones((1, 1))
    for k in range(n):
        out = np.kron(out, ops.get(k, np.eye(3)))
    return out


def string_oracle(psi, i, j, n):
    """-<Sz_i exp(i pi sum_{i<k<j} Sz_k) Sz_j> from explicit matrices."""
    flip = la.expm(1j * np.pi * sm.SZ)
    ops = {i: sm.SZ, j: sm.SZ}
    ops.update({k: flip for k in range(i + 1, j)})
    return float(-np.vdot(psi, op_chain(ops, n) @ psi).real)


def test_local_and_string_correlations_match_oracle(rng):
    n = 4
    psi = random_state(rng, 3**n)
    for i, j in ((0, 1), (0, 2), (0, 3), (1, 3)):
        zz = np.vdot(psi, op_chain({i: sm.SZ, j: sm.SZ}, n) @ psi).real
        assert ob.local_correlation(psi, "z", i, j) == pytest.approx(zz, abs=1e-13)
        if j < i + 2:
            with pytest.raises(ValueError):
                ob.string_correlation(psi, "z", i, j)
            continue
        assert ob.string_correlation(psi, "z", i, j) == pytest.approx(string_oracle(psi, i, j, n), abs=1e-13)


def test_product_state_values():
    psi = sm.product_state([1, 0, -1, 1])
    assert ob.local_correlation(psi, "z", 0, 2) == pytest.approx(-1.0)
    # one bright spin (site 2) between 0 and 3
    assert ob.string_correlation(psi, "z", 0, 3) == pytest.approx(1.0)


def test_string_probabilities_reconstruct(rng):
    n = 5
    for _ in range(10):
        psi = random_state(rng, 3**n)
        P = ob.string_joint_probabilities(psi, 0, 4)
        assert ob.reconstruct_string_from_probabilities(P) == pytest.approx(
            ob.string_correlation(psi, "z", 0, 4), abs=1e-13)


def test_probability_checks():
    with pytest.raises(ValueError):
        ob.reconstruct_zz_from_probabilities(np.full((3, 3), 0.2))
    with pytest.raises(ValueError):
        ob.reconstruct_zz_from_probabilities(-np.eye(3))


def test_entanglement_spectrum_oracles():
    prod = sm.product_state([1, 0, -1, 0])
    es = ob.entanglement_spectrum(prod, 2)
    assert es.probabilities[0] == pytest.approx(1.0)
    assert es.entropy == pytest.approx(0.0, abs=1e-12)
    # two-site singlet: three equal Schmidt weights
    singlet = (sm.product_state([1, -1]) - sm.product_state([0, 0]) + sm.product_state([-1, 1])) / np.sqrt(3)
    es2 = ob.entanglement_spectrum(singlet, 1)
    assert np.allclose(es2.probabilities, 1 / 3)
    assert es2.entropy == pytest.approx(np.log(3))
    with pytest.raises(ValueError):
        ob.entanglement_spectrum(prod, 0)


def test_pairing_report():
    splits, paired = ob.pairing_report(np.array([0.4, 0.39, 0.1, 0.1, 1e-6]))
    assert paired and splits.size == 2
    _, paired = ob.pairing_report(np.array([0.7, 0.2, 0.1]))
    assert not paired


def test_partial_tomography(rng):
    n = 3
    psi = random_state(rng, 27)
    rho = ob.partial_tomography(psi, [0, 2])
    assert np.trace(rho).real == pytest.approx(1.0)
    zz = np.trace(rho @ np.kron(sm.SZ, sm.SZ)).real
    assert zz == pytest.approx(ob.local_correlation(psi, "z", 0, 2), abs=1e-13)
    with pytest.raises(ValueError):
        ob.partial_tomography(random_state(rng, 3**5), range(5))


def test_correlation_profile_and_estimate():
    J = sm.nearest_neighbor_couplings(8)
    H = sm.build_hamiltonian(sm.ModelParams(J))
    _, v = sm.solve_ground(H, sector=0, n_sites=8)
    prof = ob.correlation_profile(v[:, 0])
    assert np.isnan(prof.string[0])
    est = ob.string_order_extrapolate(prof)
    assert 0.2 < est.value < 0.6
    with pytest.raises(ValueError):
        ob.string_order_extrapolate(np.array([0.1, 0.2]))


def test_large_D_ground_state_is_product():
    J = sm.nearest_neighbor_couplings(6)
    sig = ob.haldane_signatures(sm.ModelParams(J, 1.0, 50.0))
    assert abs(sig.string_order) < 1e-2
    assert sig.entanglement.probabilities[0] > 0.99


def test_shot_noise_formula():
    P = np.zeros((3, 3))
    P[0, 0] = P[0, 2] = 0.5
    # outcomes +-1 with equal weight: variance 1
    assert ob.zz_shot_noise(P, 100) == pytest.approx(0.1)
    counts = ob.sample_joint_probabilities(P, 1000, np.random.default_rng(1))
    assert counts.sum() == pytest.approx(1.0)
