"""Interaction-picture bookkeeping and pulse unwinding.

Every frame used here is global: the same 3x3 generator acts on each site,
so a frame unitary is a tensor power of one single-site unitary and never
entangles.  The composed frame is ``U_0(t) U_1(t) ... U_K(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np
import scipy.linalg as la
from scipy.optimize import least_squares

from .spin_model import SX, SY, SZ, spin_operator

COMMENSURATE_TOL = 1e-9
MAX_DENOMINATOR = 10**6
# a genuine rational p/q survives float noise with |x - p/q| q^2 << 1, while
# convergents of an irrational sit near |x - p/q| q^2 ~ 0.1-0.5
DIOPHANTINE_GUARD = 1e-3


class IncommensurateError(ValueError):
    pass


@dataclass(frozen=True)
class FrameGenerator:
    """One interaction-picture generator.

    Parameters
    ----------
    label : str
    generator : (3, 3) Hermitian array
        Single-site generator, rate included.  For piecewise-constant frames
        pass ``segments`` instead: a tuple of (duration, generator) pairs;
        the last segment extends indefinitely.
    """

    label: str
    generator: np.ndarray | None = None
    segments: tuple = ()

    def __post_init__(self):
        mats = [self.generator] if self.generator is not None else [g for _, g in self.segments]
        if not mats:
            raise ValueError("generator or segments required")
        for g in mats:
            g = np.asarray(g)
            if g.shape != (3, 3):
                raise ValueError("single-site generators are 3x3")
            if not np.allclose(g, g.conj().T, atol=1e-12):
                raise ValueError(f"generator {self.label!r} is not Hermitian")

    @property
    def constant(self) -> bool:
        return self.generator is not None

    def site_unitary(self, t: float) -> np.ndarray:
        if self.constant:
            return _expmh(np.asarray(self.generator), t)
        U = np.eye(3, dtype=complex)
        remaining = t
        for k, (dur, g) in enumerate(self.segments):
            last = k == len(self.segments) - 1
            step = remaining if last else min(dur, remaining)
            U = _expmh(np.asarray(g), step) @ U
            remaining -= step
            if remaining <= 0:
                break
        return U

    def spectrum(self) -> np.ndarray:
        if not self.constant:
            raise ValueError(f"generator {self.label!r} is piecewise; no single spectrum")
        return np.linalg.eigvalsh(np.asarray(self.generator))

    def period(self) -> float:
        """Smallest t > 0 with exp(-i G t) proportional to the identity."""
        return unwinding_period(self.spectrum(), self.label)


def _expmh(G: np.ndarray, t: float) -> np.ndarray:
    w, V = np.linalg.eigh(G)
    return (V * np.exp(-1j * t * w)) @ V.conj().T


def _rational(x: float, max_den: int, tol: float) -> Fraction | None:
    """First continued-fraction convergent of ``x`` within ``tol`` (relative)."""
    # walk best approximations in order of increasing denominator
    caps = [c for c in (2**k for k in range(0, 21)) if c < max_den] + [max_den]
    for cap in caps:
        best = Fraction(x).limit_denominator(cap)
        if abs(x - best.numerator / best.denominator) <= tol * max(abs(x), 1e-300):
            break
    else:
        return None
    err = abs(x - best.numerator / best.denominator)
    if err * best.denominator**2 > DIOPHANTINE_GUARD * max(abs(x), 1.0):
        return None
    return best


def unwinding_period(eigenvalues, label: str = "generator", tol: float = COMMENSURATE_TOL,
                     max_den: int = MAX_DENOMINATOR) -> float:
    """Period after which all eigenphases agree modulo 2 pi.

    Gaps relative to the lowest eigenvalue are rationalized against the
    smallest nonzero gap; the period is 2 pi L / (g_min gcd(n_i)) where the
    gaps are ``(g_min / L) n_i`` with integer ``n_i``.

    Returns ``0.0`` for a generator proportional to the identity.

    Raises
    ------
    IncommensurateError
        If some gap ratio has no rational approximation within tolerance.
    """
    e = np.sort(np.asarray(eigenvalues, dtype=float))
    scale = max(np.abs(e).max(), 1e-300)
    gaps = e - e[0]
    gaps = gaps[gaps > tol * scale]
    if gaps.size == 0:
        return 0.0
    gmin = gaps.min()
    fracs = []
    for g in gaps:
        f = _rational(g / gmin, max_den, tol)
        if f is None:
            raise IncommensurateError(f"no finite unwinding time for {label!r}: gap ratio "
                                      f"{g / gmin:.12g} is not rational within {tol:g}")
        fracs.append(f)
    L = 1
    for f in fracs:
        L = L * f.denominator // math.gcd(L, f.denominator)
    ints = [f.numerator * (L // f.denominator) for f in fracs]
    G = 0
    for n in ints:
        G = math.gcd(G, n)
    return 2 * np.pi * L / (gmin * G)


@dataclass(frozen=True)
class FrameStack:
    """Ordered frame generators ``H_0, ..., H_K`` (derivation order)."""

    generators: tuple
    scheme: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))

    def __len__(self) -> int:
        return len(self.generators)

    def site_unitary(self, t: float, start: int = 0, stop: int | None = None) -> np.ndarray:
        """U_start(t) ... U_{stop-1}(t) on one site."""
        U = np.eye(3, dtype=complex)
        for g in self.generators[start:stop]:
            U = U @ g.site_unitary(t)
        return U

    def unitary(self, t: float, n_sites: int, start: int = 0, stop: int | None = None) -> np.ndarray:
        u = self.site_unitary(t, start, stop)
        out = np.ones((1, 1), dtype=complex)
        for _ in range(n_sites):
            out = np.kron(out, u)
        return out

    @classmethod
    def scheme1(cls, omega_prime: float, theta: float, bare=None,
                axis: str = "x") -> "FrameStack":
        """U_0 (bare qutrit energies, diagonal) and U_1 = exp(-i Omega'(cos th Fz + sin th F_axis) t)."""
        H0 = np.zeros((3, 3)) if bare is None else np.diag(np.asarray(bare, dtype=float))
        H1 = omega_prime * (np.cos(theta) * SZ + np.sin(theta) * spin_operator(axis))
        return cls((FrameGenerator("U0", H0), FrameGenerator("U1", H1)), scheme=1)

    @classmethod
    def scheme2(cls, omega_prime: float, theta: float, omega_carrier: float,
                bare=None) -> "FrameStack":
        """U_0, carrier frame U_1 at rate Omega_car/sqrt2 - Omega' cos th, and U_2 at rate Omega'."""
        H0 = np.zeros((3, 3)) if bare is None else np.diag(np.asarray(bare, dtype=float))
        rate = omega_carrier / np.sqrt(2) - omega_prime * np.cos(theta)
        H1 = rate * SX
        H2 = omega_prime * (np.cos(theta) * SX + np.sin(theta) * SZ)
        return cls((FrameGenerator("U0", H0), FrameGenerator("U1", H1), FrameGenerator("U2", H2)),
                   scheme=2)


def to_lab_frame(psi_I: np.ndarray, stack: FrameStack, t: float, n_sites: int | None = None,
                 start: int = 0, stop: int | None = None, extra_dim: int = 1,
                 inverse: bool = False) -> np.ndarray:
    """Apply ``U_start(t) ... U_{stop-1}(t)`` (or its inverse) to a state.

    ``extra_dim`` is the size of a trailing tensor factor (e.g. phonons) on
    which the frames act trivially; the spin sites come first.
    """
    psi_I = np.asarray(psi_I)
    n_sites = n_sites if n_sites is not None else int(round(np.log(psi_I.size / extra_dim) / np.log(3)))
    u = stack.site_unitary(t, start, stop)
    if inverse:
        u = u.conj().T
    t_ = psi_I.reshape((3,) * n_sites + (extra_dim,))
    for k in range(n_sites):
        t_ = np.moveaxis(np.tensordot(u, t_, axes=([1], [k])), 0, k)
    return t_.reshape(-1)


def from_lab_frame(psi: np.ndarray, stack: FrameStack, t: float, **kw) -> np.ndarray:
    return to_lab_frame(psi, stack, t, inverse=True, **kw)


def phase_distance(U: np.ndarray, V: np.ndarray | None = None) -> float:
    """Operator distance of ``U`` from ``V`` (identity by default) modulo a global phase."""
    V = np.eye(U.shape[0]) if V is None else V
    ov = np.trace(V.conj().T @ U)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.abs(U - phase * V).max())


@dataclass(frozen=True)
class ShortcutRotation:
    """exp(-i a A) exp(-i b B) exp(-i c A) approximating a target rotation."""

    generators: tuple
    angles: np.ndarray
    residual: float

    def site_unitary(self) -> np.ndarray:
        A, B = self.generators
        a, b, c = self.angles
        return _expmh(A, a) @ _expmh(B, b) @ _expmh(A, c)


def single_rotation_shortcut(target: np.ndarray, A=SZ, B=SX, starts: int = 12,
                             rng: np.random.Generator | None = None) -> ShortcutRotation:
    """Fit three pulse areas about two orthogonal generators to ``target``.

    The target is a 3x3 single-site unitary; the fit is modulo global phase.
    For targets inside the spin-1 rotation group the residual reaches
    machine precision (Euler decomposition).
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if abs(np.trace(A @ B)) > 1e-12:
        raise ValueError("shortcut generators must be orthogonal")
    rng = np.random.default_rng(0) if rng is None else rng

    def resid(x):
        W = _expmh(A, x[0]) @ _expmh(B, x[1]) @ _expmh(A, x[2])
        ov = np.trace(W.conj().T @ target)
        ph = ov / abs(ov) if abs(ov) > 0 else 1.0
        d = W * ph - target
        return np.concatenate([d.real.ravel(), d.imag.ravel()])

    best = None
    for k in range(starts):
        x0 = rng.uniform(-np.pi, np.pi, 3) if k else np.zeros(3)
        sol = least_squares(resid, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        r = float(np.abs(resid(sol.x)).max())
        if best is None or r < best[1]:
            best = (sol.x, r)
        if r < 1e-12:
            break
    return ShortcutRotation((A, B), best[0], best[1])


@dataclass(frozen=True)
class UnwindSchedule:
    """Unwinding durations ``t_K ... t_start`` (listed from the innermost frame)."""

    tau: float
    labels: tuple
    durations: tuple
    periods: tuple
    residuals: tuple
    shortcut: ShortcutRotation | None = None

    @property
    def total(self) -> float:
        return self.tau + float(sum(self.durations))

    def as_dict(self) -> dict:
        return {"tau": self.tau,
                "stages": [{"frame": l, "duration": d, "period": p}
                           for l, d, p in zip(self.labels, self.durations, self.periods)]}


def unwind_schedule(stack: FrameStack, tau: float, start: int = 1, shortcut: bool = False,
                    tol: float = 1e-9) -> UnwindSchedule:
    """Durations that return frames ``start..K`` to the identity.

    Frame k keeps running through the stages of all frames above it, so
    ``t_k`` is the smallest non-negative time with
    ``U_k(tau + t_K + ... + t_k)`` proportional to the identity.

    Raises
    ------
    IncommensurateError
        If a generator has no finite unwinding period.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    labels, durs, periods, res = [], [], [], []
    elapsed = tau
    for g in reversed(stack.generators[start:]):
        P = g.period()
        if P == 0.0:
            t_k = 0.0
        else:
            t_k = (-elapsed) % P
            if t_k > P * (1 - 1e-12) or t_k < P * 1e-12:
                t_k = 0.0
        elapsed += t_k
        d = phase_distance(g.site_unitary(elapsed))
        if d > tol:
            raise IncommensurateError(f"frame {g.label!r} not restored (distance {d:.2e})")
        labels.append(g.label)
        durs.append(float(t_k))
        periods.append(float(P))
        res.append(d)
    sc = None
    if shortcut:
        target = stack.site_unitary(tau, start).conj().T
        sc = single_rotation_shortcut(target)
    return UnwindSchedule(float(tau), tuple(labels), tuple(durs), tuple(periods), tuple(res), sc)


@dataclass(frozen=True)
class Stage:
    label: str
    active: tuple
    duration: float


def scheme2_unwind(stack: FrameStack, tau: float, measurement_rotation: bool = False,
                   rotation_rate: float | None = None) -> list[Stage]:
    """Experiment-facing stage list for the dressed scheme.

    Stage 1 blocks the sideband and Stark drives and keeps the fields that
    generate ``U_2`` until ``U_2`` returns to the identity; stage 2 keeps the
    carrier alone (at the frame rate of ``U_1``) until ``U_1`` does.  ``U_0``
    is not compensated: it only contributes unmeasured phases.
    """
    if len(stack) != 3:
        raise ValueError("scheme-2 stack needs U0, U1, U2")
    sched = unwind_schedule(stack, tau, start=1)
    t2, t1 = sched.durations
    stages = [Stage("simulate", ("sideband", "carrier", "rf", "stark"), float(tau)),
              Stage("unwind U2", ("carrier", "rf"), t2),
              Stage("unwind U1", ("carrier",), t1)]
    if measurement_rotation:
        rate = rotation_rate
        if rate is None:
            rate = np.linalg.norm(np.linalg.eigvalsh(stack.generators[2].generator), np.inf)
        stages.append(Stage("measurement rotation", ("carrier-quadrature",), float(np.pi / 2 / rate)))
    return stages


def basis_rotation(beta, angle: float, alpha="x", n_sites: int = 1) -> np.ndarray:
    """Global rotation by ``angle`` about ``beta``, which must be perpendicular to ``alpha``."""
    def vec(a):
        if isinstance(a, str):
            return {"x": np.array([1.0, 0, 0]), "y": np.array([0, 1.0, 0]),
                    "z": np.array([0, 0, 1.0])}[a]
        v = np.asarray(a, dtype=float)
        return v / np.linalg.norm(v)

    b, a = vec(beta), vec(alpha)
    if abs(b @ a) > 1e-12:
        raise ValueError("rotation axis must be perpendicular to the lambda-trick axis")
    u = la.expm(-1j * angle * (b[0] * SX + b[1] * SY + b[2] * SZ))
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n_sites):
        out = np.kron(out, u)
    return out
