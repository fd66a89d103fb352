"""Linear ion-chain mechanics and the phonon-mediated spin-spin couplings.

Lengths are measured internally in units of the axial length scale
``l = (e^2 / (4 pi eps0 m w_axial^2))**(1/3)`` and frequencies in units of
``w_axial``; physical units only appear at the boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
import warnings

import numpy as np
import scipy.constants as const

AMU = const.physical_constants["atomic mass constant"][0]
HBAR = const.hbar
E_CHARGE = const.e
EPS0 = const.epsilon_0


class ConvergenceError(RuntimeError):
    pass


class InstabilityError(RuntimeError):
    pass


class ResonanceError(ValueError):
    pass


@dataclass(frozen=True)
class TrapConfig:
    """Trap and ion parameters.  Frequencies are angular (rad/s), SI units."""

    n_ions: int
    omega_axial: float
    omega_radial: float
    mass: float
    charge: float = E_CHARGE
    k_L: float = 0.0

    def __post_init__(self):
        if self.n_ions < 1:
            raise ValueError("n_ions must be >= 1")
        if self.omega_axial <= 0 or self.omega_radial <= 0:
            raise ValueError("trap frequencies must be positive")
        if self.omega_radial <= self.omega_axial:
            raise ValueError("omega_radial must exceed omega_axial for a linear chain")
        if self.mass <= 0 or self.charge <= 0:
            raise ValueError("mass and charge must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "TrapConfig":
        """Build from the JSON form (frequencies in Hz, mass in amu).

        The laser wavenumber is taken from ``k_L`` (1/m), or from
        ``wavelength_nm`` as ``2 pi / wavelength``, or from
        ``lamb_dicke`` (the single-ion value at the radial frequency).
        """
        mass = d["mass_amu"] * AMU
        wr = 2 * np.pi * d["omega_radial_hz"]
        if "k_L" in d:
            k = float(d["k_L"])
        elif "wavelength_nm" in d:
            k = 2 * np.pi / (d["wavelength_nm"] * 1e-9)
        elif "lamb_dicke" in d:
            k = d["lamb_dicke"] / math.sqrt(HBAR / (2 * mass * wr))
        else:
            k = 0.0
        return cls(
            n_ions=int(d["n_ions"]),
            omega_axial=2 * np.pi * d["omega_axial_hz"],
            omega_radial=wr,
            mass=mass,
            charge=d.get("charge_e", 1.0) * E_CHARGE,
            k_L=k,
        )

    @property
    def length_scale(self) -> float:
        return (self.charge**2 / (4 * np.pi * EPS0 * self.mass * self.omega_axial**2)) ** (1 / 3)


@dataclass(frozen=True)
class ChainGeometry:
    length_scale: float
    positions_dimensionless: np.ndarray
    residual: float
    iterations: int

    @property
    def positions(self) -> np.ndarray:
        return self.length_scale * self.positions_dimensionless

    @property
    def n_ions(self) -> int:
        return self.positions_dimensionless.size


@dataclass(frozen=True)
class NormalModes:
    direction: str
    mode_matrix: np.ndarray  # M[i, n]: ion i, mode n
    frequencies: np.ndarray  # rad/s, ascending


@dataclass(frozen=True)
class CouplingMatrix:
    J_eff: np.ndarray  # (N, N), rad/s, diagonal retained
    J_res: np.ndarray  # (N, n_modes, n_modes), rad/s
    uniformity_metric: float

    @property
    def residual_fields(self) -> np.ndarray:
        """Per-ion coefficient of Fz from the residual term at the phonon vacuum."""
        return 0.5 * np.einsum("jnn->j", self.J_res)


def _forces(u: np.ndarray) -> np.ndarray:
    d = u[:, None] - u[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(d != 0, np.sign(d) / d**2, 0.0)
    return -u + inv.sum(axis=1)


def _jacobian(u: np.ndarray) -> np.ndarray:
    d = np.abs(u[:, None] - u[None, :])
    np.fill_diagonal(d, np.inf)
    c = 2.0 / d**3
    Jm = c.copy()
    np.fill_diagonal(Jm, -1.0 - c.sum(axis=1))
    return Jm


def solve_equilibrium(cfg: TrapConfig, tol: float = 1e-12, max_iter: int = 200) -> ChainGeometry:
    """Equilibrium positions by damped Newton iteration.

    Starts from uniform spacing ``2 N**0.56 / N`` and halves the step until
    the force residual decreases.
    """
    n = cfg.n_ions
    if n == 1:
        return ChainGeometry(cfg.length_scale, np.zeros(1), 0.0, 0)
    spacing = 2.0 * n**0.56 / n
    u = spacing * (np.arange(n) - (n - 1) / 2)
    f = _forces(u)
    res = np.abs(f).max()
    it = 0
    while res > tol and it < max_iter:
        step = np.linalg.solve(_jacobian(u), -f)
        a = 1.0
        while a > 1e-6:
            trial = u + a * step
            if np.all(np.diff(trial) > 0):
                ft = _forces(trial)
                if np.abs(ft).max() < res:
                    break
            a *= 0.5
        u, f = trial, ft
        res = np.abs(f).max()
        it += 1
    if res > tol:
        raise ConvergenceError(f"equilibrium not converged after {it} iterations "
                               f"(residual {res:.3e})")
    # enforce the exact mirror symmetry
    u = 0.5 * (u - u[::-1])
    return ChainGeometry(cfg.length_scale, u, float(np.abs(_forces(u)).max()), it)


def _fix_signs(M: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(M), axis=0)
    signs = np.sign(M[idx, np.arange(M.shape[1])])
    return M * signs


def hessian(geom: ChainGeometry, cfg: TrapConfig, direction: str) -> np.ndarray:
    """Dimensionless Hessian (units of m w_axial^2)."""
    u = geom.positions_dimensionless
    n = u.size
    d = np.abs(u[:, None] - u[None, :])
    np.fill_diagonal(d, np.inf)
    inv3 = 1.0 / d**3
    if direction == "axial":
        A = -2.0 * inv3
        np.fill_diagonal(A, 1.0 + 2.0 * inv3.sum(axis=1))
    elif direction == "radial":
        beta2 = (cfg.omega_radial / cfg.omega_axial) ** 2
        A = inv3.copy()
        np.fill_diagonal(A, beta2 - inv3.sum(axis=1))
    else:
        raise ValueError("direction must be 'axial' or 'radial'")
    return A if n > 1 else A.reshape(1, 1)


def compute_normal_modes(geom: ChainGeometry, cfg: TrapConfig, direction: str = "radial") -> NormalModes:
    """Normal modes of the chain, frequencies ascending, in rad/s.

    Raises :class:`InstabilityError` when a radial eigenvalue is negative
    (the linear chain would buckle into a zig-zag).
    """
    A = hessian(geom, cfg, direction)
    w, M = np.linalg.eigh(A)
    if np.any(w <= 0):
        bad = int(np.flatnonzero(w <= 0)[0])
        raise InstabilityError(f"{direction} mode {bad} has non-positive curvature {w[bad]:.3e}; "
                               "linear chain is unstable")
    order = np.argsort(w)
    w, M = w[order], _fix_signs(M[:, order])
    return NormalModes(direction, M, cfg.omega_axial * np.sqrt(w))


def lamb_dicke(modes: NormalModes, cfg: TrapConfig) -> np.ndarray:
    """eta[j, n] = k_L M[j, n] sqrt(hbar / (2 m nu_n)), signs retained."""
    return cfg.k_L * modes.mode_matrix * np.sqrt(HBAR / (2 * cfg.mass * modes.frequencies))[None, :]


def default_resonance_guard(eta: np.ndarray, rabi: float, freqs: np.ndarray) -> float:
    # 100x the scale of a single second-order coupling without the resonant
    # denominator, (eta Omega)^2 / (8 nu)
    return 100.0 * float(np.max((eta * rabi) ** 2 / (8 * freqs[None, :])))


def coupling_matrix(eta: np.ndarray, rabi: float, detuning: float, modes: NormalModes | np.ndarray,
                    guard: float | None = None) -> CouplingMatrix:
    """Spin-spin couplings from virtual phonon exchange.

    J_ij = sum_n eta_in eta_jn / 2 * nu_n Omega^2 / (delta^2 - nu_n^2)
    J_res[j, n, m] = Omega^2 delta eta_jn eta_jm / 4
                     * (1/(delta^2 - nu_n^2) + 1/(delta^2 - nu_m^2))

    ``modes`` may be a :class:`NormalModes` or a plain array of mode
    frequencies.
    """
    eta = np.atleast_2d(np.asarray(eta, dtype=float))
    nu = np.asarray(modes.frequencies if isinstance(modes, NormalModes) else modes, dtype=float)
    if eta.shape[1] != nu.size:
        raise ValueError("eta must have one column per mode")
    if guard is None:
        guard = default_resonance_guard(eta, rabi, nu)
    close = np.abs(detuning - nu) < guard
    if np.any(close):
        n = int(np.flatnonzero(close)[0])
        raise ResonanceError(f"detuning within {guard:.3e} rad/s of mode {n} "
                             f"(|delta - nu| = {abs(detuning - nu[n]):.3e})")
    denom = 1.0 / (detuning**2 - nu**2)
    J_eff = 0.5 * rabi**2 * np.einsum("in,jn,n->ij", eta, eta, nu * denom)
    J_eff = 0.5 * (J_eff + J_eff.T)
    J_res = 0.25 * rabi**2 * detuning * np.einsum("jn,jm,nm->jnm", eta, eta,
                                                  denom[:, None] + denom[None, :])
    c = 0.5 * np.einsum("jnn->j", J_res)
    mean = c.mean()
    uniformity = float(np.max(np.abs(c - mean)) / abs(mean)) if mean != 0 else 0.0
    return CouplingMatrix(J_eff, J_res, uniformity)


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    residual: float
    used_magnitudes: bool


def fit_powerlaw(J: np.ndarray, positions: np.ndarray | None = None) -> PowerLawFit:
    """Least-squares fit of log|J_ij| against log|r_i - r_j| for i<j.

    Distances default to the ion index separation.  If any off-diagonal
    coupling is non-positive the fit uses magnitudes and sets
    ``used_magnitudes``.
    """
    J = np.asarray(J, dtype=float)
    n = J.shape[0]
    if n < 4:
        raise ValueError("power-law fit needs at least 4 ions")
    r = np.arange(n, dtype=float) if positions is None else np.asarray(positions, dtype=float)
    iu, ju = np.triu_indices(n, 1)
    vals = J[iu, ju]
    flagged = bool(np.any(vals <= 0))
    if flagged:
        warnings.warn("non-positive couplings present; fitting magnitudes")
    x = np.log(np.abs(r[iu] - r[ju]))
    y = np.log(np.abs(vals))
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ [slope, icpt] - y) ** 2)))
    return PowerLawFit(float(-slope), float(np.exp(icpt)), resid, flagged)
