"""Acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is repeated in the pytest terminal
summary under "acceptance criteria".
"""

import itertools
import time
import warnings

import numpy as np
import pytest
import scipy.linalg as la
from scipy import integrate

from haldane_ions import adiabatic, drive_model, frames, ion_chain, noise, observables, spin_model
from haldane_ions.integrators import propagate

from conftest import random_state

TWO_PI = 2 * np.pi


def trap(n, axial_hz=1e6, radial_hz=5e6, mass=171.0, eta=0.14):
    return ion_chain.TrapConfig.from_dict(dict(n_ions=n, omega_axial_hz=axial_hz, omega_radial_hz=radial_hz,
                                               mass_amu=mass, lamb_dicke=eta))


# ---------------------------------------------------------------------------
# 1. chain mechanics


def test_chain_mechanics(record_criterion):
    t0 = time.perf_counter()
    cfg2, cfg3 = trap(2), trap(3)
    g2, g3 = ion_chain.solve_equilibrium(cfg2), ion_chain.solve_equilibrium(cfg3)
    a, b = 0.25 ** (1 / 3), 1.25 ** (1 / 3)
    err_pos = max(np.abs(g2.positions_dimensionless - [-a, a]).max() / a,
                  np.abs(g3.positions_dimensionless - [-b, 0.0, b]).max() / b)
    ax = ion_chain.compute_normal_modes(g2, cfg2, "axial").frequencies / cfg2.omega_axial
    err_ax = np.abs(ax - [1.0, np.sqrt(3.0)]).max() / np.sqrt(3.0)
    errs_com = []
    for cfg, g in ((cfg2, g2), (cfg3, g3)):
        rad = ion_chain.compute_normal_modes(g, cfg, "radial").frequencies
        errs_com.append(abs(rad.max() - cfg.omega_radial) / cfg.omega_radial)
    elapsed = time.perf_counter() - t0
    err = max(err_pos, err_ax, *errs_com)
    ok = err < 1e-9 and elapsed < 1.0
    record_criterion(1, ok, f"max relative error {err:.1e}, {elapsed:.3f} s")
    assert ok


# ---------------------------------------------------------------------------
# 2. coupling oracle and realistic magnitudes


def coupling_oracle(eta, rabi, delta, nu):
    n = eta.shape[0]
    J = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for m in range(nu.size):
                s += eta[i, m] * eta[j, m] * rabi**2 * nu[m] / (2.0 * (delta**2 - nu[m] ** 2))
            J[i, j] = s
    return J


def test_coupling_oracle_and_magnitudes(record_criterion):
    t0 = time.perf_counter()
    cfg = trap(3)
    g = ion_chain.solve_equilibrium(cfg)
    modes = ion_chain.compute_normal_modes(g, cfg, "radial")
    eta = ion_chain.lamb_dicke(modes, cfg)
    rabi, delta = TWO_PI * 5e5, TWO_PI * 5.1e6
    J = ion_chain.coupling_matrix(eta, rabi, delta, modes).J_eff
    ref = coupling_oracle(eta, rabi, delta, modes.frequencies)
    rel = np.abs(J - ref).max() / np.abs(ref).max()

    cfg10 = trap(10)
    g10 = ion_chain.solve_equilibrium(cfg10)
    m10 = ion_chain.compute_normal_modes(g10, cfg10, "radial")
    J10 = ion_chain.coupling_matrix(ion_chain.lamb_dicke(m10, cfg10), rabi, delta, m10).J_eff
    nn_khz = np.diag(J10, 1) / TWO_PI / 1e3
    in_window = bool(np.all((nn_khz >= 0.2) & (nn_khz <= 5.0)))
    afm = bool(np.all(np.diag(J10, 1) > 0))
    elapsed = time.perf_counter() - t0
    ok = rel < 1e-12 and in_window and afm and elapsed < 1.0
    record_criterion(2, ok, f"oracle rel. error {rel:.1e}; N=10 nearest-neighbor J in "
                     f"[{nn_khz.min():.2f}, {nn_khz.max():.2f}] kHz x 2pi, AFM={afm}, {elapsed:.3f} s")
    assert ok


# ---------------------------------------------------------------------------
# 3. effective-model validation against the full driven evolution


def _validate(scheme, violate=False, form="secular"):
    p = drive_model.default_validation_params(scheme, violate=violate)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", drive_model.HierarchyWarning)
        return p, drive_model.validate_effective(p, form=form)


@pytest.mark.slow
def test_effective_model_validation(record_criterion):
    t0 = time.perf_counter()
    lines, ok = [], True
    for scheme in (1, 2):
        p, good = _validate(scheme)
        hier = drive_model.validate_hierarchy(p)
        _, bad = _validate(scheme, violate=True)
        bad_hier = drive_model.validate_hierarchy(p.replace(omega_prime=p.delta - p.nu[0]), factor=1.0)
        ok &= hier.passed and good.fidelity >= 0.99 and bad.fidelity < 0.9
        ok &= bad_hier.min_ratio <= 1.0 + 1e-9
        ok &= good.top_fock_population < drive_model.TRUNCATION_LIMIT
        lines.append(f"scheme {scheme}: F={good.fidelity:.4f} (min ratio {hier.min_ratio:.1f}), "
                     f"violated F={bad.fidelity:.4f}")
    elapsed = time.perf_counter() - t0
    record_criterion(3, ok, "; ".join(lines) + f"; {elapsed:.0f} s")
    assert ok


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="the closed-form single-site coefficient does not match the "
                                       "secular limit of the driven dynamics")
@pytest.mark.parametrize("scheme", [1, 2])
def test_printed_effective_form_matches_dynamics(scheme):
    _, rep = _validate(scheme, form="printed")
    assert rep.fidelity >= 0.99


# ---------------------------------------------------------------------------
# 4. lambda coverage


def test_lambda_coverage(record_criterion):
    n = 4
    J = spin_model.nearest_neighbor_couplings(n, 0.7)
    # scheme 1 endpoints
    lam0 = spin_model.lambda_from_theta(1, 0.0)
    lam2 = spin_model.lambda_from_theta(1, np.pi / 2)
    H0 = spin_model.build_effective(1, 0.0, 0.0, J).toarray()
    xy = spin_model.build_hamiltonian(spin_model.ModelParams(J, 0.0, 0.0)).toarray()
    Hpi = spin_model.build_effective(1, np.pi / 2, 0.0, J).toarray()
    ising = spin_model.build_hamiltonian(spin_model.ModelParams(0.5 * J, 2.0, 0.0)).toarray()
    endpoint_err = max(np.abs(H0 - xy).max(), np.abs(Hpi - ising).max())
    try:
        spin_model.theta_from_lambda(1, 2.5)
        beyond = False
    except ValueError:
        beyond = True
    grid = np.linspace(0, np.pi / 2, 201)
    lams = [spin_model.lambda_from_theta(1, th) for th in grid]
    covers = abs(min(lams)) < 1e-15 and abs(max(lams) - 2) < 1e-12

    # scheme 2 reproduces the target Hamiltonians (both coefficient forms)
    worst, unreachable = 0.0, []
    for form in spin_model.FORMS:
        for lam, D_target in itertools.product((0.5, 1.0, 2.0, 5.0), (0.0, 0.8)):
            th = spin_model.theta_from_lambda(2, lam, form)
            try:
                Dp = spin_model.dprime_for_target_D(2, th, D_target, 0.0, form)
            except ValueError:
                # the single-site coefficient vanishes at this theta
                unreachable.append((form, lam))
                continue
            ep = spin_model.effective_params(2, th, Dp, J, form)
            H = spin_model.build_effective(2, th, Dp, J, form).toarray()
            ref = spin_model.build_hamiltonian(
                spin_model.ModelParams(ep.J_scale * J, lam, D_target)).toarray()
            worst = max(worst, np.abs(H - ref).max())
    ok = (abs(lam0) < 1e-15 and abs(lam2 - 2) < 1e-12 and endpoint_err < 1e-12 and beyond and covers
          and worst < 1e-12)
    record_criterion(4, ok, f"scheme 1 lambda range [{min(lams):.3g}, {max(lams):.3g}], endpoint error "
                     f"{endpoint_err:.1e}, lambda>2 rejected={beyond}; scheme 2 max error {worst:.1e} "
                     f"(D != 0 unreachable at {unreachable})")
    assert ok


# ---------------------------------------------------------------------------
# 5. Haldane signatures


def test_haldane_signatures(record_criterion):
    t0 = time.perf_counter()
    J = spin_model.nearest_neighbor_couplings(8)
    hal = observables.haldane_signatures(spin_model.ModelParams(J, 1.0, 0.0))
    big = observables.haldane_signatures(spin_model.ModelParams(J, 1.0, 10.0))
    contrast = hal.string_order - big.string_order
    elapsed = time.perf_counter() - t0
    ok = (contrast > 0.15 and hal.paired and not big.paired and hal.gap > 0 and big.gap > 0
          and elapsed < 60)
    record_criterion(5, ok, f"string order {hal.string_order:.3f} vs {big.string_order:.3f}, "
                     f"ES paired {hal.paired}/{big.paired}, gaps {hal.gap:.3f}/{big.gap:.3f}, "
                     f"{elapsed:.1f} s")
    assert ok


# ---------------------------------------------------------------------------
# 6. adiabatic protocol


def test_adiabatic_protocol(record_criterion):
    t0 = time.perf_counter()
    J = spin_model.nearest_neighbor_couplings(6)
    detour = adiabatic.RampPath(J, h_max=0.5)
    direct = adiabatic.RampPath(J, h_max=0.0)
    prof = adiabatic.gap_along_path(detour)
    T = adiabatic.adiabatic_time(detour, prof, C=10)
    r1 = adiabatic.run_ramp(detour, T=T, profile=prof)
    r0 = adiabatic.run_ramp(direct, T=T, profile=prof, schedule_path=detour)
    mag = max(np.abs(r1.magnetization).max(), np.abs(r0.magnetization).max())
    elapsed = time.perf_counter() - t0
    ok = r1.final_fidelity >= 0.9 and r0.final_fidelity < r1.final_fidelity and mag < 1e-8 and elapsed < 300
    record_criterion(6, ok, f"T={T:.1f}/J, detour F={r1.final_fidelity:.5f}, direct F={r0.final_fidelity:.5f}, "
                     f"max |M|={mag:.1e}, {elapsed:.1f} s")
    assert ok


# ---------------------------------------------------------------------------
# 7. frame unwinding


def _sum_sites(op, n):
    return sum(spin_model.local_operator(op, j, n).toarray() for j in range(n))


def _lab_hamiltonian(stack, Heff, n, t, active, _cache={}):
    """Lab-frame H whose successive interaction pictures are the given frames."""
    key = (id(stack), n)
    if key not in _cache:
        _cache[key] = [(_sum_sites(g.generator, n), np.linalg.eigh(g.generator)) for g in stack.generators]
    H = np.zeros((3**n, 3**n), dtype=complex)
    U = np.eye(3**n)
    for k, (G, (w, V)) in enumerate(_cache[key]):
        if k in active:
            H += U @ G @ U.conj().T
            U = U @ spin_model.global_operator((V * np.exp(-1j * t * w)) @ V.conj().T, n)
    if len(stack) in active:
        H += U @ Heff @ U.conj().T
    return H


def test_frame_unwinding(record_criterion, rng):
    t0 = time.perf_counter()
    worst_id = 0.0
    stacks = [frames.FrameStack.scheme1(1.0, 0.7, bare=[1.3, 0.0, -0.7]),
              frames.FrameStack.scheme2(1.0, 0.6, 6.0, bare=[1.3, 0.0, -0.7]),
              frames.FrameStack.scheme2(TWO_PI * 20e3, 0.6, TWO_PI * 6e6)]
    for stack in stacks:
        scale = np.abs(stack.generators[-1].generator).max()
        for tau in rng.uniform(0, 50, 20) / scale:
            sched = frames.unwind_schedule(stack, tau)
            elapsed = tau
            for g, d in zip(reversed(stack.generators[1:]), sched.durations):
                elapsed += d
                worst_id = max(worst_id, frames.phase_distance(g.site_unitary(elapsed)))

    # brute-force lab-frame propagation through all stages, N=2, scaled units
    n = 2
    stack = stacks[1]
    J = np.array([[0.02, 0.1], [0.1, 0.02]])
    Heff = spin_model.build_effective(2, 0.6, 0.05, J, form="secular").toarray()
    tau = float(rng.uniform(1, 3))
    t2, t1 = frames.unwind_schedule(stack, tau).durations
    psi0 = spin_model.product_state([1, -1])
    dt = 5e-4
    psi = propagate(lambda t: _lab_hamiltonian(stack, Heff, n, t, (0, 1, 2, 3)), psi0, tau, dt_max=dt).final
    psi = propagate(lambda t: _lab_hamiltonian(stack, Heff, n, t, (0, 1, 2)), psi, tau + t2,
                    t0=tau, dt_max=dt).final
    psi = propagate(lambda t: _lab_hamiltonian(stack, Heff, n, t, (0, 1)), psi, tau + t2 + t1,
                    t0=tau + t2, dt_max=dt).final
    U0 = spin_model.global_operator(stack.generators[0].site_unitary(tau + t2 + t1), n)
    ref = U0 @ la.expm(-1j * Heff * tau) @ psi0
    ov = np.vdot(ref, psi)
    lab_err = float(np.abs(psi - ref * ov / abs(ov)).max())
    elapsed = time.perf_counter() - t0
    ok = worst_id < 1e-9 and lab_err < 1e-6 and elapsed < 60
    record_criterion(7, ok, f"max frame residual {worst_id:.1e} over 60 random tau, lab-frame error "
                     f"{lab_err:.1e}, {elapsed:.1f} s")
    assert ok


# ---------------------------------------------------------------------------
# 8. decoherence-free subspace


def test_dfs_exactness(record_criterion):
    gamma, T = 0.37, 2.1
    worst = 0.0
    n = 4
    H = spin_model.build_hamiltonian(spin_model.ModelParams(spin_model.nearest_neighbor_couplings(n), 1.3, 0.4))
    idx = spin_model.sector_indices(n, 0)
    _, V = np.linalg.eigh(H.toarray()[np.ix_(idx, idx)])
    for k in range(V.shape[1]):
        psi = np.zeros(3**n, dtype=complex)
        psi[idx] = V[:, k]
        worst = max(worst, abs(1 - noise.apply_collective_dephasing(psi, gamma, T).fidelity))

    # Gaussian phase average of <+1|.|0> coherence, phi ~ N(0, 2 gamma T)
    var = 2 * gamma * T
    dens = lambda phi: np.exp(-phi**2 / (2 * var)) / np.sqrt(2 * np.pi * var)  # noqa: E731
    re = integrate.quad(lambda p: dens(p) * np.cos(p), -np.inf, np.inf, epsabs=1e-13)[0]
    im = integrate.quad(lambda p: dens(p) * np.sin(p), -np.inf, np.inf, epsabs=1e-13)[0]
    oracle = abs(re + 1j * im)
    got = noise.single_spin_coherence(1, gamma, T)
    err = abs(got - oracle)
    ok = worst < 1e-12 and err < 1e-6 and abs(got - np.exp(-gamma * T)) < 1e-12
    record_criterion(8, ok, f"{V.shape[1]} zero-sector eigenstates, max |1-F| {worst:.1e}; "
                     f"|+1> coherence {got:.8f} vs quadrature {oracle:.8f}")
    assert ok


# ---------------------------------------------------------------------------
# 9. measurement identity


def test_measurement_identity(record_criterion, rng):
    n = 4
    worst, zs = 0.0, []
    for _ in range(100):
        psi = random_state(rng, 3**n)
        i, j = sorted(rng.choice(n, 2, replace=False))
        P = observables.joint_probabilities(psi, i, j)
        worst = max(worst, abs(observables.reconstruct_zz_from_probabilities(P)
                               - observables.local_correlation(psi, "z", i, j)))
        est = observables.reconstruct_zz_from_probabilities(
            observables.sample_joint_probabilities(P, 100_000, rng))
        sigma = observables.zz_shot_noise(P, 100_000)
        zs.append(abs(est - observables.reconstruct_zz_from_probabilities(P)) / sigma)
    # a 3-sigma band holds 99.7% of estimates, so a few excursions in 100 are expected
    inside = float(np.mean(np.array(zs) < 3.0))
    ok = worst < 1e-12 and inside >= 0.97
    record_criterion(9, ok, f"max exact error {worst:.1e}; {inside:.0%} of 10^5-shot estimates within "
                     f"3 sigma (max {max(zs):.2f} sigma)")
    assert ok
