"""Full spin-phonon simulation of the laser drives on tiny chains.

The joint Hilbert space is ``(C^3)^N x Fock^modes`` with the spins first.
Every drive is written as

    H(t) = H_static + sum_k (exp(i w_k t) O_k + h.c.)

(:class:`FourierOperator`), which makes Hermiticity structural and gives
the integrator the fastest rotation rate for step control.

Two effective-model checks live here: :func:`validate_effective`, which
propagates the full drive, removes the interaction frames and compares with
the effective spin Hamiltonian, and :func:`validate_hierarchy`, which turns
each "much less than" condition into a ratio.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import warnings

import numpy as np
import scipy.linalg as la

from .frames import FrameStack, to_lab_frame
from .integrators import propagate
from .ion_chain import coupling_matrix
from .spin_model import FP, ID3, SX, SZ, build_effective, product_state, rotation

DEFAULT_FACTOR = 10.0
TRUNCATION_LIMIT = 1e-3
LAMB_DICKE_LIMIT = 0.3
P0 = np.diag([0.0, 1.0, 0.0])


class TruncationError(RuntimeError):
    pass


class HierarchyWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# Hilbert space


@dataclass(frozen=True)
class PhononSpace:
    frequencies: np.ndarray
    fock_cutoff: int = 6

    def __post_init__(self):
        nu = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        object.__setattr__(self, "frequencies", nu)
        if self.fock_cutoff < 2:
            raise ValueError("fock_cutoff must be >= 2")
        if np.any(nu <= 0):
            raise ValueError("mode frequencies must be positive")

    @property
    def n_modes(self) -> int:
        return self.frequencies.size

    @property
    def dim(self) -> int:
        return self.fock_cutoff**self.n_modes

    def annihilation(self, mode: int) -> np.ndarray:
        a = np.diag(np.sqrt(np.arange(1, self.fock_cutoff)), 1)
        out = np.ones((1, 1))
        for n in range(self.n_modes):
            out = np.kron(out, a if n == mode else np.eye(self.fock_cutoff))
        return out

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def lamb_dicke_ok(self, eta, nbar: float = 0.0) -> bool:
        """True when max |eta| sqrt(nbar + 1) < 0.3."""
        return bool(np.max(np.abs(eta)) * np.sqrt(nbar + 1) < LAMB_DICKE_LIMIT)

    def top_level_population(self, psi: np.ndarray, spin_dim: int) -> float:
        """Largest population in the highest Fock level of any mode."""
        p = (np.abs(psi.reshape(spin_dim, *(self.fock_cutoff,) * self.n_modes)) ** 2).sum(axis=0)
        worst = 0.0
        for n in range(self.n_modes):
            worst = max(worst, float(np.take(p, -1, axis=n).sum()))
        return worst

    def mean_occupation(self, psi: np.ndarray, spin_dim: int) -> np.ndarray:
        p = (np.abs(psi.reshape(spin_dim, *(self.fock_cutoff,) * self.n_modes)) ** 2).sum(axis=0)
        k = np.arange(self.fock_cutoff)
        out = []
        for n in range(self.n_modes):
            axes = tuple(m for m in range(self.n_modes) if m != n)
            out.append(float(p.sum(axis=axes) @ k))
        return np.array(out)


def _site_op(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    out = np.ones((1, 1))
    for k in range(n_sites):
        out = np.kron(out, op if k == site else ID3)
    return out


def _global(op: np.ndarray, n_sites: int) -> np.ndarray:
    return sum(_site_op(op, k, n_sites) for k in range(n_sites))


@dataclass
class FourierOperator:
    """H(t) = static + sum_k (exp(i w_k t) O_k + h.c.) on a fixed space."""

    static: np.ndarray
    frequencies: np.ndarray = field(default_factory=lambda: np.zeros(0))
    operators: np.ndarray | None = None

    def __post_init__(self):
        self.static = np.asarray(self.static, dtype=complex)
        if not np.allclose(self.static, self.static.conj().T, atol=1e-9 * max(1.0, np.abs(self.static).max())):
            raise ValueError("static part must be Hermitian")
        d = self.static.shape[0]
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        if self.operators is None:
            self.operators = np.zeros((0, d, d), dtype=complex)
        self.operators = np.asarray(self.operators, dtype=complex)

    @property
    def dim(self) -> int:
        return self.static.shape[0]

    @property
    def max_frequency(self) -> float:
        return float(np.abs(self.frequencies).max()) if self.frequencies.size else 0.0

    def __call__(self, t: float) -> np.ndarray:
        if not self.frequencies.size:
            return self.static
        M = np.tensordot(np.exp(1j * self.frequencies * t), self.operators, axes=1)
        return self.static + M + M.conj().T

    def __add__(self, other: "FourierOperator") -> "FourierOperator":
        return FourierOperator(self.static + other.static,
                               np.concatenate([self.frequencies, other.frequencies]),
                               np.concatenate([self.operators, other.operators]))

    @classmethod
    def constant(cls, H: np.ndarray) -> "FourierOperator":
        return cls(np.asarray(H, dtype=complex))

    @classmethod
    def cosine(cls, amplitude: float, omega: float, op: np.ndarray) -> "FourierOperator":
        """amplitude cos(omega t) op for Hermitian ``op``."""
        d = op.shape[0]
        return cls(np.zeros((d, d), dtype=complex), np.array([omega]), (0.5 * amplitude * op)[None])


def _spin_phonon_ops(n_ions: int, phonons: PhononSpace):
    Iph = np.eye(phonons.dim)
    Is = np.eye(3**n_ions)
    a = [np.kron(Is, phonons.annihilation(n)) for n in range(phonons.n_modes)]
    return Iph, a


def _sideband_terms(eta, rabi, detuning, phonons: PhononSpace, spin_op_plus):
    """(frequencies, operators) of sum_{n,j} (i Omega eta_jn / 2 sqrt2)(X_j e^{i delta t} - h.c.)
    (b_n^dag e^{i nu_n t} + h.c.) with ``X_j = spin_op_plus(j)``."""
    eta = np.atleast_2d(np.asarray(eta, dtype=float))
    n_ions = eta.shape[0]
    Iph, a = _spin_phonon_ops(n_ions, phonons)
    freqs, ops = [], []
    for j in range(n_ions):
        Xj = np.kron(spin_op_plus(j), Iph)
        for n, nu in enumerate(phonons.frequencies):
            g = 1j * rabi * eta[j, n] / (2 * np.sqrt(2))
            ad = a[n].conj().T
            # (g X e^{i d t} + h.c.)(b^dag e^{i nu t} + b e^{-i nu t})
            freqs += [detuning + nu, detuning - nu]
            ops += [g * Xj @ ad, g * Xj @ a[n]]
    d = 3**n_ions * phonons.dim
    return np.array(freqs), (np.array(ops) if ops else np.zeros((0, d, d), dtype=complex))


def build_red_sideband(eta, rabi: float, detuning: float, phonons: PhononSpace) -> FourierOperator:
    """Two-tone red-sideband drive on every qutrit, before any RWA.

    ``eta`` has shape (n_ions, n_modes).  The pi phase between the two beat
    notes is absorbed into F_+, which then equals the spin-1 raising
    operator.
    """
    eta = np.atleast_2d(np.asarray(eta, dtype=float))
    if not phonons.lamb_dicke_ok(eta):
        warnings.warn("Lamb-Dicke parameter above 0.3; expansion not reliable", HierarchyWarning)
    n = eta.shape[0]
    d = 3**n * phonons.dim
    fr, ops = _sideband_terms(eta, rabi, detuning, phonons, lambda j: _site_op(FP, j, n))
    return FourierOperator(np.zeros((d, d), dtype=complex), fr, ops)


def build_dressed_ms(eta, rabi: float, detuning: float, omega_carrier: float, phonons: PhononSpace,
                     rwa: bool = False, factor: float = DEFAULT_FACTOR) -> FourierOperator:
    """Sideband drive dressed by the resonant carrier pair.

    ``rwa=False``: the exact sideband operator plus the static carrier
    ``(Omega_car / sqrt2) sum_j F_x^j``, in the bare-energy frame.
    ``rwa=True``: the same drive in the carrier frame with only the
    F_x-commuting part of F_+ kept, i.e. F_+ -> F_x (a Molmer-Sorensen
    coupling along the dressed quantization axis).
    """
    eta = np.atleast_2d(np.asarray(eta, dtype=float))
    n = eta.shape[0]
    gap = np.min(np.abs(detuning - phonons.frequencies))
    if omega_carrier == 0 or (omega_carrier / np.sqrt(2)) / gap < factor:
        warnings.warn("dressing hierarchy |delta - nu| << Omega_car/sqrt2 not met", HierarchyWarning)
    d = 3**n * phonons.dim
    if rwa:
        fr, ops = _sideband_terms(eta, rabi, detuning, phonons, lambda j: _site_op(SX, j, n))
        return FourierOperator(np.zeros((d, d), dtype=complex), fr, ops)
    H = build_red_sideband(eta, rabi, detuning, phonons)
    carrier = omega_carrier / np.sqrt(2) * np.kron(_global(SX, n), np.eye(phonons.dim))
    return FourierOperator(H.static + carrier, H.frequencies, H.operators)


# ---------------------------------------------------------------------------
# Stark shifts


def floquet_stark_shift(rabi: float, detuning: float) -> float:
    """Exact light shift of a level driven with Rabi ``rabi`` at detuning ``detuning``.

    Quasi-energy of the dressed state adiabatically connected to the driven
    level of ``[[0, Omega/2], [Omega/2, Delta]]``.
    """
    if detuning == 0:
        raise ValueError("resonant drive has no perturbative light shift")
    return 0.5 * (detuning - np.sign(detuning) * np.hypot(detuning, rabi))


def stark_shift_D(rabi_D: float, detuning_D: float, scheme: int, factor: float = DEFAULT_FACTOR) -> float:
    """Single-ion anisotropy from an off-resonant Stark tone.

    Scheme 1 shifts |+-1> by -Omega_D^2/(4 Delta_D), so D' = -Omega_D^2/(4 Delta_D).
    Scheme 2 shifts |0> through the auxiliary level; the anisotropy enters
    as 2 D' |0><0| with D' = Omega_D^2/(8 Delta_D).
    """
    if scheme not in (1, 2):
        raise ValueError("scheme must be 1 or 2")
    if rabi_D == 0:
        return 0.0
    if detuning_D == 0:
        raise ValueError("Stark tone must be detuned")
    if abs(detuning_D) / (abs(rabi_D) / 2) < factor:
        warnings.warn("Stark hierarchy |Omega_D/2| << |Delta_D| not met", HierarchyWarning)
    if scheme == 1:
        return -rabi_D**2 / (4 * detuning_D)
    return rabi_D**2 / (8 * detuning_D)


# ---------------------------------------------------------------------------
# schedules and hierarchy


@dataclass(frozen=True)
class Tone:
    target: str  # "minus" | "plus" | "aux" | "rf"
    rabi: float
    detuning: float = 0.0
    phase: float = 0.0
    order: str = "carrier"  # carrier | red | blue

    def __post_init__(self):
        if self.rabi < 0:
            raise ValueError("rabi must be non-negative")
        if self.target not in ("minus", "plus", "aux", "rf"):
            raise ValueError(f"unknown tone target {self.target!r}")
        if self.order not in ("carrier", "red", "blue"):
            raise ValueError(f"unknown sideband order {self.order!r}")


@dataclass(frozen=True)
class DriveParams:
    """Drive parameters in rad/s.  ``eta`` has shape (n_ions, n_modes)."""

    scheme: int
    nu: tuple
    delta: float
    rabi: float
    eta: np.ndarray
    omega_prime: float
    theta: float
    D_prime: float = 0.0
    omega_carrier: float = 0.0
    rabi_D: float = 0.0
    detuning_D: float = 0.0
    fock_cutoff: int = 6

    def __post_init__(self):
        object.__setattr__(self, "eta", np.atleast_2d(np.asarray(self.eta, dtype=float)))
        object.__setattr__(self, "nu", tuple(np.atleast_1d(np.asarray(self.nu, dtype=float))))
        if self.scheme not in (1, 2):
            raise ValueError("scheme must be 1 or 2")
        if self.eta.shape[1] != len(self.nu):
            raise ValueError("eta needs one column per mode")
        if self.scheme == 2 and self.omega_carrier <= 0:
            raise ValueError("scheme 2 requires a dressing carrier")

    @property
    def n_ions(self) -> int:
        return self.eta.shape[0]

    def replace(self, **kw) -> "DriveParams":
        return replace(self, **kw)

    def couplings(self):
        return coupling_matrix(self.eta, self.rabi, self.delta, np.array(self.nu), guard=0.0)

    def schedule(self) -> "DriveSchedule":
        tones = [Tone("minus", self.rabi, self.delta, 0.0, "red"),
                 Tone("plus", self.rabi, self.delta, np.pi, "red")]
        if self.scheme == 1:
            # field Omega'(cos th Fz + sin th Fx): detuning plus a carrier pair
            s = self.omega_prime * np.sin(self.theta)
            c = self.omega_prime * np.cos(self.theta)
            tones += [Tone("minus", s, c), Tone("plus", s, -c)]
        else:
            tones += [Tone("minus", self.omega_carrier, 0.0), Tone("plus", self.omega_carrier, 0.0, np.pi)]
            rate = self.omega_carrier / np.sqrt(2) - self.omega_prime * np.cos(self.theta)
            tones.append(Tone("rf", 2 * self.omega_prime * np.sin(self.theta), rate))
        if self.rabi_D:
            tones.append(Tone("aux", self.rabi_D, self.detuning_D))
        return DriveSchedule(tuple(tones), self.scheme, self)


@dataclass(frozen=True)
class DriveSchedule:
    tones: tuple
    scheme: int
    params: DriveParams | None = None

    def to_dict(self) -> dict:
        return {"scheme": self.scheme,
                "tones": [{"target": t.target, "rabi_hz": t.rabi / (2 * np.pi),
                           "detuning_hz": t.detuning / (2 * np.pi), "phase": t.phase, "order": t.order}
                          for t in self.tones]}


@dataclass(frozen=True)
class HierarchyEntry:
    name: str
    condition: str
    ratio: float
    passed: bool


@dataclass(frozen=True)
class HierarchyReport:
    factor: float
    entries: tuple

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def min_ratio(self) -> float:
        return min((e.ratio for e in self.entries), default=np.inf)

    def __getitem__(self, name: str) -> HierarchyEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def _ratio(big: float, small: float) -> float:
    if small == 0:
        return np.inf
    return abs(big) / abs(small)


def validate_hierarchy(schedule: DriveSchedule | DriveParams, factor: float = DEFAULT_FACTOR) -> HierarchyReport:
    """Each perturbative condition as a ratio big/small, passing at ``factor``.

    With every drive amplitude zero all conditions are vacuous and pass.
    """
    p = schedule.params if isinstance(schedule, DriveSchedule) else schedule
    nu = np.array(p.nu)
    gap = float(np.min(np.abs(p.delta - nu)))
    eta_max = float(np.max(np.abs(p.eta)))
    coupling = (p.rabi * eta_max) ** 2 / (8 * gap) if gap else np.inf
    rows = [
        ("sideband", "Omega eta / 2sqrt2 << |delta - nu|", _ratio(gap, p.rabi * eta_max / (2 * np.sqrt(2)))),
        ("coupling", "(Omega eta)^2 / 8|delta - nu| << Omega'", _ratio(p.omega_prime, coupling) if p.rabi else np.inf),
        ("field", "Omega' << |delta - nu|", _ratio(gap, p.omega_prime)),
    ]
    if p.scheme == 2:
        rows += [
            ("dressing", "|delta - nu| << Omega_car / sqrt2", _ratio(p.omega_carrier / np.sqrt(2), gap)),
            ("field_vs_carrier", "Omega' << sqrt2 Omega_car", _ratio(np.sqrt(2) * p.omega_carrier, p.omega_prime)),
        ]
    if p.rabi_D:
        if p.scheme == 1:
            rows.append(("stark", "|Omega_D / 2| << |Delta_D|", _ratio(p.detuning_D, p.rabi_D / 2)))
        else:
            rows.append(("stark", "Omega_D / 2sqrt2 << |Delta_D|",
                         _ratio(p.detuning_D, p.rabi_D / (2 * np.sqrt(2)))))
            rows.append(("stark_carrier", "Omega_car / sqrt2 << |Delta_D|",
                         _ratio(p.detuning_D, p.omega_carrier / np.sqrt(2))))
    drives = (p.rabi, p.omega_prime, p.omega_carrier, p.rabi_D)
    vacuous = all(d == 0 for d in drives)
    entries = tuple(HierarchyEntry(n, c, float(r), bool(vacuous or r >= factor * (1 - 1e-9))) for n, c, r in rows)
    return HierarchyReport(factor, entries)


# ---------------------------------------------------------------------------
# full drive and validation


def full_drive(p: DriveParams, phonons: PhononSpace | None = None) -> FourierOperator:
    """Complete Hamiltonian of scheme 1 or 2 in the bare-energy frame."""
    phonons = PhononSpace(np.array(p.nu), p.fock_cutoff) if phonons is None else phonons
    n = p.n_ions
    Iph = np.eye(phonons.dim)
    c, s = np.cos(p.theta), np.sin(p.theta)
    if p.scheme == 1:
        H = build_red_sideband(p.eta, p.rabi, p.delta, phonons)
        spin = p.D_prime * _global(SZ @ SZ, n) + p.omega_prime * _global(c * SZ + s * SX, n)
        return H + FourierOperator.constant(np.kron(spin, Iph))
    H = build_dressed_ms(p.eta, p.rabi, p.delta, p.omega_carrier, phonons)
    H = H + FourierOperator.constant(np.kron(2 * p.D_prime * _global(P0, n), Iph))
    rate = p.omega_carrier / np.sqrt(2) - p.omega_prime * c
    return H + FourierOperator.cosine(2 * p.omega_prime * s, rate, np.kron(_global(SZ, n), Iph))


def frame_stack(p: DriveParams) -> FrameStack:
    if p.scheme == 1:
        return FrameStack.scheme1(p.omega_prime, p.theta)
    return FrameStack.scheme2(p.omega_prime, p.theta, p.omega_carrier)


def barred_rotation(scheme: int, theta: float) -> np.ndarray:
    """Single-site R with R S_z R^dag along the frame field."""
    return rotation("y", theta if scheme == 1 else np.pi / 2 - theta)


def effective_hamiltonian(p: DriveParams, form: str = "secular") -> np.ndarray:
    """Effective spin Hamiltonian in the rotated (barred) basis."""
    J = p.couplings().J_eff
    return build_effective(p.scheme, p.theta, p.D_prime, J, form=form).toarray()


@dataclass(frozen=True)
class ValidationReport:
    scheme: int
    form: str
    t_final: float
    fidelity: float
    times: np.ndarray
    fidelities: np.ndarray
    phonon_occupation: float
    top_fock_population: float
    norm_drift: float
    J: float
    hierarchy: HierarchyReport
    n_steps: int


def _reduced_spin(psi: np.ndarray, spin_dim: int) -> np.ndarray:
    M = psi.reshape(spin_dim, -1)
    return M @ M.conj().T


def validate_effective(p: DriveParams, form: str = "secular", psi_local=(1, -1),
                       t_final: float | None = None, n_samples: int = 5,
                       resolution: float = 0.2, factor: float = DEFAULT_FACTOR,
                       check_truncation: bool = True) -> ValidationReport:
    """Compare the full driven evolution with the effective spin model.

    The initial state is the product of barred-basis levels ``psi_local``
    with the phonons in vacuum.  The full state is moved into the last
    interaction frame (frames 1..K of :func:`frame_stack`) and its reduced
    spin state overlapped with ``exp(-i H_eff t)`` applied to the same
    initial spins.  Default duration ``pi / (2 J_12)``.

    The step obeys both ``||H|| dt <= 0.05`` and
    ``w_max dt <= resolution`` so the fastest rotating term is resolved.
    """
    phonons = PhononSpace(np.array(p.nu), p.fock_cutoff)
    n = p.n_ions
    sd = 3**n
    hier = validate_hierarchy(p, factor)
    if not hier.passed:
        bad = ", ".join(e.name for e in hier.entries if not e.passed)
        warnings.warn(f"hierarchy not satisfied at factor {factor:g}: {bad}", HierarchyWarning)
    J = p.couplings().J_eff
    J12 = float(J[0, 1]) if n > 1 else float(J[0, 0])
    if t_final is None:
        if J12 == 0:
            raise ValueError("zero coupling: give t_final explicitly")
        t_final = np.pi / (2 * abs(J12))
    H = full_drive(p, phonons)
    R = barred_rotation(p.scheme, p.theta)
    R_all = np.ones((1, 1))
    for _ in range(n):
        R_all = np.kron(R_all, R)
    spins_bar = product_state(list(psi_local))
    spins0 = R_all @ spins_bar
    psi0 = np.kron(spins0, phonons.vacuum())
    Heff = effective_hamiltonian(p, form)
    w, V = np.linalg.eigh(Heff)
    stack = frame_stack(p)
    times = np.linspace(0, t_final, n_samples + 1)[1:]
    dt_max = resolution / H.max_frequency if H.max_frequency else None
    traj = propagate(H, psi0, t_final, sample_times=times, dt_max=dt_max)
    fids = []
    for t, psi in zip(traj.times, traj.states):
        psi_I = to_lab_frame(psi, stack, t, n_sites=n, start=1, extra_dim=phonons.dim, inverse=True)
        rho = _reduced_spin(psi_I, sd)
        phi = R_all @ (V @ (np.exp(-1j * w * t) * (V.conj().T @ spins_bar)))
        fids.append(float(np.vdot(phi, rho @ phi).real))
    final = traj.states[-1]
    top = phonons.top_level_population(final, sd)
    if check_truncation and top > TRUNCATION_LIMIT:
        raise TruncationError(f"top Fock level population {top:.2e} exceeds {TRUNCATION_LIMIT:g}; "
                              "raise fock_cutoff")
    return ValidationReport(
        scheme=p.scheme, form=form, t_final=float(t_final), fidelity=fids[-1],
        times=traj.times, fidelities=np.array(fids),
        phonon_occupation=float(phonons.mean_occupation(final, sd).sum()),
        top_fock_population=top, norm_drift=float(np.abs(traj.norms - 1).max()),
        J=J12, hierarchy=hier, n_steps=traj.n_steps,
    )


def numerical_effective_hamiltonian(p: DriveParams, periods: int = 1, resolution: float = 0.2,
                                    include_field: bool = False) -> np.ndarray:
    """Spin-only generator i log(<vac|U(T)|vac>) / T over whole beat periods.

    ``T = periods * 2 pi / |delta - nu_0|``; by default the Omega' field is
    switched off so the result isolates the phonon-mediated terms.  For
    scheme 2 the carrier rotation is removed, giving the generator in the
    carrier frame.  The result is defined up to a multiple of the identity.
    """
    q = p if include_field else p.replace(omega_prime=0.0)
    phonons = PhononSpace(np.array(q.nu), q.fock_cutoff)
    H = full_drive(q, phonons)
    T = periods * 2 * np.pi / abs(q.delta - q.nu[0])
    sd = 3**q.n_ions
    dt_max = resolution / H.max_frequency if H.max_frequency else None
    U = np.zeros((sd, sd), dtype=complex)
    for k in range(sd):
        e = np.zeros(sd)
        e[k] = 1.0
        traj = propagate(H, np.kron(e, phonons.vacuum()), T, dt_max=dt_max)
        U[:, k] = traj.final.reshape(sd, -1)[:, 0]
    if q.scheme == 2:
        u = rotation("x", -q.omega_carrier / np.sqrt(2) * T)
        Uc = np.ones((1, 1))
        for _ in range(q.n_ions):
            Uc = np.kron(Uc, u)
        U = Uc @ U
    Hs = 1j * la.logm(U) / T
    return 0.5 * (Hs + Hs.conj().T)


def default_validation_params(scheme: int = 1, theta: float | None = None, violate: bool = False,
                              J_target: float = 2 * np.pi * 1e3) -> DriveParams:
    """N=2 on one radial mode at 2 pi 5 MHz, every hierarchy ratio >= 10.

    Each ion carries eta = 0.14 / sqrt2 on the center-of-mass mode and the
    sideband Rabi frequency is set so that J_12 ~ ``J_target``.

    scheme 1: delta - nu = 2 pi 1 MHz, Omega' = 2 pi 50 kHz, theta = 1.0.
    scheme 2: delta - nu = 2 pi 300 kHz, Omega' = 2 pi 20 kHz,
    Omega_car = 2 pi 6 MHz, theta = 0.6.

    ``violate=True`` sets Omega' = delta - nu.
    """
    two_pi = 2 * np.pi
    nu = two_pi * 5e6
    if scheme == 1:
        gap, op, car, th = two_pi * 1e6, two_pi * 50e3, 0.0, 1.0
    else:
        gap, op, car, th = two_pi * 300e3, two_pi * 20e3, two_pi * 6e6, 0.6
    eta = np.full((2, 1), 0.14 / np.sqrt(2))
    # J_12 ~ (eta Omega)^2 / (4 (delta - nu)) close to resonance
    rabi = np.sqrt(4 * J_target * gap) / eta[0, 0]
    return DriveParams(scheme=scheme, nu=(nu,), delta=nu + gap, rabi=rabi, eta=eta,
                       omega_prime=gap if violate else op, theta=th if theta is None else theta,
                       D_prime=two_pi * 1.5e3, omega_carrier=car)
