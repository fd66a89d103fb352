"""Time integrators for Schrodinger evolution.

``krylov_expm`` applies exp(-i t H) to a vector with an adaptive Lanczos
basis.  ``propagate`` integrates a time-dependent H(t) with the exponential
midpoint rule.  ``rk4_propagate`` is an independent classical fourth-order
scheme kept as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp


class KrylovError(RuntimeError):
    pass


class StepUnderflowError(RuntimeError):
    pass


def krylov_expm(H, v: np.ndarray, t: float, tol: float = 1e-10, m_max: int = 60):
    """exp(-i t H) v for Hermitian ``H`` via Lanczos.

    The basis grows until the standard a-posteriori error estimate
    ``beta_{m+1} |[exp(-i t T_m) e_1]_m| ||v||`` drops below ``tol``.

    Returns
    -------
    w : ndarray
        The propagated vector.
    m : int
        Krylov dimension used.
    err : float
        Final error estimate.

    Raises
    ------
    KrylovError
        If ``m_max`` is reached before the estimate converges.
    """
    nrm = np.linalg.norm(v)
    if nrm == 0:
        return np.zeros_like(v, dtype=complex), 0, 0.0
    n = v.size
    m_max = min(m_max, n)
    V = np.zeros((m_max + 1, n), dtype=complex)
    alpha = np.zeros(m_max)
    beta = np.zeros(m_max)
    V[0] = v / nrm
    err = np.inf
    for j in range(m_max):
        w = H @ V[j]
        alpha[j] = np.vdot(V[j], w).real
        w = w - alpha[j] * V[j] - (beta[j - 1] * V[j - 1] if j > 0 else 0)
        # full reorthogonalization keeps the basis clean at these sizes
        w -= V[: j + 1].T @ (V[: j + 1].conj() @ w)
        b = np.linalg.norm(w)
        lam, Q = la.eigh_tridiagonal(alpha[: j + 1], beta[:j])
        c = Q @ (np.exp(-1j * t * lam) * Q[0])
        err = b * abs(c[-1]) * nrm
        if b < 1e-14 * max(1.0, abs(alpha[: j + 1]).max()) or err < tol:
            return nrm * (V[: j + 1].T @ c), j + 1, float(err)
        beta[j] = b
        V[j + 1] = w / b
    raise KrylovError(f"Krylov did not converge within {m_max} vectors (estimate {err:.2e})")


def krylov_evolve(H, v: np.ndarray, t: float, tol: float = 1e-10, m_max: int = 60,
                  min_step: float | None = None):
    """exp(-i t H) v, halving the step whenever Lanczos fails to converge."""
    min_step = abs(t) * 2.0**-20 if min_step is None else min_step
    remaining, out, step = t, v, t
    while abs(remaining) > 0:
        step = step if abs(step) <= abs(remaining) else remaining
        try:
            out, _, _ = krylov_expm(H, out, step, tol, m_max)
        except KrylovError:
            step /= 2
            if abs(step) < min_step:
                raise
            continue
        remaining -= step
    return out


def _expm_dense(H: np.ndarray, dt: float) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * dt * w)) @ V.conj().T


def _taylor_expmv(H: np.ndarray, v: np.ndarray, dt: float, tol: float = 1e-16) -> np.ndarray:
    # only called with ||H|| dt <= 0.5, where the series converges in ~15 terms
    out = v.copy()
    term = v
    k = 1
    while True:
        term = (-1j * dt / k) * (H @ term)
        out = out + term
        if np.abs(term).max() < tol or k > 40:
            return out
        k += 1


def _norm_estimate(H) -> float:
    if sp.issparse(H):
        return float(abs(H).sum(axis=0).max())
    return float(np.abs(H).sum(axis=0).max())


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    norms: np.ndarray
    n_steps: int
    records: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def propagate(hamiltonian, psi0: np.ndarray, t_final: float, *, t0: float = 0.0,
              norm_step: float = 0.05, dt_max: float | None = None,
              sample_times=None, observables: dict | None = None,
              min_dt: float = 1e-18, krylov_tol: float = 1e-10) -> Trajectory:
    """Exponential-midpoint integration of i d/dt psi = H(t) psi.

    Each step uses exp(-i dt H(t + dt/2)) with ``dt`` the smaller of
    ``dt_max`` and ``norm_step / ||H||``.  Dense matrices are exponentiated
    exactly, sparse ones through :func:`krylov_expm`.

    Parameters
    ----------
    hamiltonian : callable or matrix
        ``H(t)`` returning a Hermitian matrix, or a constant matrix.
    sample_times : array_like, optional
        Times at which states are stored (the final time is always stored).
    observables : dict, optional
        ``name -> f(t, psi)`` evaluated at every sample time.
    """
    if not callable(hamiltonian):
        Hc = hamiltonian
        hamiltonian = lambda t: Hc  # noqa: E731
    psi = np.asarray(psi0, dtype=complex).copy()
    if abs(np.linalg.norm(psi) - 1) > 1e-9:
        raise ValueError("initial state must be normalized")
    samples = np.unique(np.append(np.asarray([] if sample_times is None else sample_times, float),
                                  t_final))
    samples = samples[(samples >= t0) & (samples <= t_final)]
    observables = observables or {}
    records = {k: [] for k in observables}
    times, states, norms = [], [], []
    t, steps = t0, 0
    for target in samples:
        while t < target - 1e-15 * max(1.0, abs(target)):
            dt = min(target - t, dt_max or np.inf)
            Hm = hamiltonian(t + 0.5 * dt)
            hn = _norm_estimate(Hm)
            if hn * dt > norm_step:
                dt = norm_step / hn
                Hm = hamiltonian(t + 0.5 * dt)
            if dt < min_dt:
                raise StepUnderflowError(f"step {dt:.3e} below minimum at t={t:.6e} (||H||={hn:.3e})")
            if sp.issparse(Hm):
                psi = krylov_evolve(Hm, psi, dt, krylov_tol)
            elif hn * dt <= 0.5:
                psi = _taylor_expmv(np.asarray(Hm), psi, dt)
            else:
                psi = _expm_dense(np.asarray(Hm), dt) @ psi
            t += dt
            steps += 1
        times.append(t)
        states.append(psi.copy())
        norms.append(np.linalg.norm(psi))
        for k, f in observables.items():
            records[k].append(f(t, psi))
    return Trajectory(np.array(times), states, np.array(norms), steps,
                      {k: np.array(v) for k, v in records.items()})


def rk4_propagate(hamiltonian, psi0: np.ndarray, t_final: float, n_steps: int,
                  t0: float = 0.0) -> np.ndarray:
    """Classical Runge-Kutta 4 for i d/dt psi = H(t) psi (cross-check only)."""
    f = lambda t, y: -1j * (hamiltonian(t) @ y)  # noqa: E731
    y = np.asarray(psi0, dtype=complex).copy()
    h = (t_final - t0) / n_steps
    t = t0
    for _ in range(n_steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y
