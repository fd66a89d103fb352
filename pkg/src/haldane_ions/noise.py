"""Collective dephasing and quasi-static Rabi noise.

Magnetic-field noise is modeled as a random global rotation
``exp(-i phi sum_j S_z^j)`` with ``phi ~ N(0, 2 gamma T)``.  Averaging over
phi multiplies the density-matrix element between total magnetizations
``M_a`` and ``M_b`` by ``exp(-(M_a - M_b)^2 gamma T)``, so states inside
one magnetization sector (in particular the zero sector) are untouched.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .drive_model import DriveParams, barred_rotation
from .frames import FrameGenerator, FrameStack
from .ion_chain import coupling_matrix
from .spin_model import SX, SY, SZ, build_effective, product_state, rotation, total_magnetization

KINDS = ("collective-dephasing", "rabi-fluctuation")
EXACT_MAX_SITES = 6
MAX_RABI_SPREAD = 0.1


@dataclass(frozen=True)
class NoiseChannel:
    kind: str
    strength: float
    draws: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.strength < 0:
            raise ValueError("strength must be non-negative")
        if self.draws < 0:
            raise ValueError("draws must be non-negative")


@dataclass(frozen=True)
class DFSReport:
    mean: float
    variance: float
    member: bool


def _n_sites(dim: int) -> int:
    n = int(round(np.log(dim) / np.log(3)))
    if 3**n != dim:
        raise ValueError("state dimension is not a power of 3")
    return n


def dfs_projection_check(psi: np.ndarray, tol: float = 1e-8) -> DFSReport:
    """Mean and variance of sum_j S_z^j; DFS membership iff both are below ``tol``."""
    psi = np.asarray(psi)
    M = total_magnetization(_n_sites(psi.size)).astype(float)
    w = np.abs(psi) ** 2
    w = w / w.sum()
    mean = float(w @ M)
    var = float(w @ M**2 - mean**2)
    var = max(var, 0.0)
    return DFSReport(mean, var, bool(abs(mean) < tol and var < tol))


@dataclass(frozen=True)
class DephasingResult:
    fidelity: float
    populations_before: dict
    populations_after: dict
    exact: bool
    rho: np.ndarray | None = None


def coherence_factor(delta_m, gamma: float, T: float) -> np.ndarray:
    """Average of exp(-i phi dM) over phi ~ N(0, 2 gamma T)."""
    return np.exp(-np.asarray(delta_m, dtype=float) ** 2 * gamma * T)


def _sector_populations(M: np.ndarray, diag: np.ndarray) -> dict:
    return {int(m): float(diag[M == m].sum()) for m in np.unique(M)}


def apply_collective_dephasing(state: np.ndarray, gamma: float, T: float,
                               rng: np.random.Generator | None = None, draws: int = 2000,
                               exact_max_sites: int = EXACT_MAX_SITES) -> DephasingResult:
    """Fidelity of a state with itself after quasi-static collective dephasing.

    ``state`` is a vector or a density matrix.  Up to ``exact_max_sites``
    the averaged channel is applied to the density matrix; above, the
    fidelity is the mean of ``|<psi|exp(-i phi M)|psi>|^2`` over ``draws``
    Gaussian phases (vectors only).  For a density matrix the fidelity
    reported is ``Tr(rho rho') / Tr(rho^2)``, which reduces to
    ``<psi|rho'|psi>`` for pure input.
    """
    if gamma < 0 or T < 0:
        raise ValueError("gamma and T must be non-negative")
    state = np.asarray(state, dtype=complex)
    is_dm = state.ndim == 2
    n = _n_sites(state.shape[0])
    M = total_magnetization(n).astype(float)
    if is_dm:
        rho = state
    elif n <= exact_max_sites:
        rho = np.outer(state, state.conj())
    else:
        rho = None
    if rho is not None:
        out = rho * coherence_factor(M[:, None] - M[None, :], gamma, T)
        fid = float(np.real(np.sum(rho.conj() * out)) / np.real(np.sum(rho.conj() * rho)))
        return DephasingResult(fid, _sector_populations(M, np.real(np.diag(rho))),
                               _sector_populations(M, np.real(np.diag(out))), True, out)
    rng = np.random.default_rng() if rng is None else rng
    w = np.abs(state) ** 2
    phis = rng.normal(0.0, np.sqrt(2 * gamma * T), draws)
    amps = np.exp(-1j * np.outer(phis, M)) @ w
    fid = float(np.mean(np.abs(amps) ** 2))
    pops = _sector_populations(M, w)
    return DephasingResult(fid, pops, dict(pops), False)


def single_spin_coherence(m: int, gamma: float, T: float, reference: int = 0) -> float:
    """|rho_{m,ref}| decay factor for a qutrit prepared in (|m> + |ref>)/sqrt2."""
    psi = np.zeros(3, dtype=complex)
    psi[1 - m] += 1
    psi[1 - reference] += 1
    psi /= np.linalg.norm(psi)
    res = apply_collective_dephasing(psi, gamma, T)
    return float(abs(res.rho[1 - m, 1 - reference]) / abs(np.outer(psi, psi.conj())[1 - m, 1 - reference]))


# ---------------------------------------------------------------------------
# Rabi fluctuations


@dataclass(frozen=True)
class RobustnessReport:
    scheme: int
    sigma: float
    targets: tuple
    baseline: float
    fidelities: np.ndarray
    seeds: tuple

    @property
    def mean(self) -> float:
        return float(self.fidelities.mean()) if self.fidelities.size else self.baseline

    @property
    def min(self) -> float:
        return float(self.fidelities.min()) if self.fidelities.size else self.baseline

    @property
    def degradation(self) -> float:
        return self.baseline - self.mean


def _kron_all(u: np.ndarray, n: int) -> np.ndarray:
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, u)
    return out


def _global(op: np.ndarray, n: int) -> np.ndarray:
    I = np.eye(3)
    total = np.zeros((3**n, 3**n), dtype=complex)
    for k in range(n):
        f = np.ones((1, 1))
        for j in range(n):
            f = np.kron(f, op if j == k else I)
        total += f
    return total


def _pair(op: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    I = np.eye(3)
    f = np.ones((1, 1))
    for k in range(n):
        f = np.kron(f, op if k in (i, j) else I)
    return f


def _global_site(op: np.ndarray, site: int, n: int) -> np.ndarray:
    I = np.eye(3)
    f = np.ones((1, 1))
    for k in range(n):
        f = np.kron(f, op if k == site else I)
    return f


def second_order_spin_model(p: DriveParams, eps_rabi: float = 0.0, eps_carrier: float = 0.0,
                            eps_field: float = 0.0):
    """Spin-only Hamiltonian after phonon elimination, with fractional drive errors.

    Returns ``(H, stack)``: ``H`` in the frame where it is static (scheme 1:
    bare-energy frame; scheme 2: nominal carrier frame) and the frame stack
    that must be removed, built from the perturbed field so that unwinding
    follows the actual rates.
    """
    n = p.n_ions
    rabi = p.rabi * (1 + eps_rabi)
    cm = coupling_matrix(p.eta, rabi, p.delta, np.array(p.nu), guard=0.0)
    J = cm.J_eff
    op = p.omega_prime * (1 + eps_field)
    c, s = np.cos(p.theta), np.sin(p.theta)
    H = np.zeros((3**n, 3**n), dtype=complex)
    if p.scheme == 1:
        for i in range(n):
            for j in range(i + 1, n):
                H += J[i, j] * (_pair(SX, i, j, n) + _pair(SY, i, j, n))
        Jd = np.diag(J)
        for k in range(n):
            H += _global_site(SZ @ SZ, k, n) * (p.D_prime - Jd[k] / 2)
            H += _global_site(SZ, k, n) * cm.residual_fields[k]
        fz, fx = op * c, op * s
        H += _global(fz * SZ + fx * SX, n)
        field_gen = fz * SZ + fx * SX
    else:
        for i in range(n):
            for j in range(i + 1, n):
                H += J[i, j] * _pair(SX, i, j, n)
        Jd = np.diag(J)
        for k in range(n):
            H += _global_site(SX @ SX, k, n) * (p.D_prime + Jd[k] / 2)
        # carrier error shifts the residual Fx rate; RF amplitude follows Omega'
        fx = p.omega_prime * c + eps_carrier * p.omega_carrier / np.sqrt(2)
        fz = op * s
        H += _global(fx * SX + fz * SZ, n)
        field_gen = fx * SX + fz * SZ
    stack = FrameStack((FrameGenerator("U0", np.zeros((3, 3))), FrameGenerator("U", field_gen)))
    return H, stack


def _robustness_fidelity(p: DriveParams, eps, t: float, psi_local, target: np.ndarray) -> float:
    H, stack = second_order_spin_model(p, *eps)
    n = p.n_ions
    # barred basis of the actual field
    field = stack.generators[1].generator
    R = _field_rotation(field)
    spins0 = _kron_all(barred_rotation(p.scheme, p.theta), n) @ product_state(list(psi_local))
    w, V = np.linalg.eigh(H)
    psi = V @ (np.exp(-1j * w * t) * (V.conj().T @ spins0))
    psi_I = stack.unitary(t, n, start=1).conj().T @ psi
    psi_bar = _kron_all(R, n).conj().T @ psi_I
    return float(abs(np.vdot(target, psi_bar)) ** 2)


def _field_rotation(field: np.ndarray) -> np.ndarray:
    """Rotation about y taking S_z to the direction of ``a S_z + b S_x``."""
    a = np.real(field[0, 0])
    b = np.real(np.sqrt(2.0) * field[0, 1])
    return rotation("y", np.arctan2(b, a))


def rabi_robustness(p: DriveParams, sigma: float, draws: int, seed: int = 0,
                    targets=("rabi", "carrier", "field"), t_final: float | None = None,
                    psi_local=(1, -1), workers: int = 1) -> RobustnessReport:
    """Quasi-static Rabi-frequency noise at the level of the second-order spin model.

    Each draw multiplies the selected amplitudes (``rabi``: sideband Omega,
    ``carrier``: Omega_car, ``field``: Omega') by ``1 + eps`` with
    ``eps ~ N(0, sigma^2)``, evolves the spin-only model for ``t_final``
    (default pi / (2 J_12)), removes the field frame using the perturbed
    rates, and reports the fidelity with the nominal effective evolution.
    Per-draw seeds are spawned from ``seed``, so results do not depend on
    ``workers`` (the size of the thread pool evaluating draws).
    """
    if not 0 <= sigma <= MAX_RABI_SPREAD:
        raise ValueError(f"sigma must lie in [0, {MAX_RABI_SPREAD}]")
    bad = set(targets) - {"rabi", "carrier", "field"}
    if bad:
        raise ValueError(f"unknown noise targets {sorted(bad)}")
    J = p.couplings().J_eff
    t = np.pi / (2 * abs(J[0, 1])) if t_final is None else t_final
    Heff = build_effective(p.scheme, p.theta, p.D_prime, J, form="secular").toarray()
    target = la.expm(-1j * Heff * t) @ product_state(list(psi_local))
    baseline = _robustness_fidelity(p, (0.0, 0.0, 0.0), t, psi_local, target)
    children = np.random.SeedSequence(seed).spawn(draws)

    def one(ss):
        e = np.random.default_rng(ss).normal(0.0, sigma, 3)
        eps = tuple(float(e[k]) if name in targets else 0.0
                    for k, name in enumerate(("rabi", "carrier", "field")))
        return _robustness_fidelity(p, eps, t, psi_local, target)

    if workers > 1 and draws > 1:
        with ThreadPoolExecutor(max_workers=min(workers, draws)) as pool:
            fids = list(pool.map(one, children))
    else:
        fids = [one(ss) for ss in children]
    return RobustnessReport(p.scheme, sigma, tuple(targets), baseline, np.array(fids),
                            tuple(int(c.generate_state(1)[0]) for c in children))
