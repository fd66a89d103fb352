"""Spin-1 chain operators, the XXZ-D Hamiltonian and the two effective models.

Basis conventions
-----------------
Local states are ordered ``|+1>, |0>, |-1>`` (digit 0, 1, 2).  Many-body
states use a site-major tensor product with site 0 the slowest index, so the
basis index of a configuration ``(d_0, ..., d_{N-1})`` is
``sum_k d_k 3**(N-1-k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import warnings

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

MAX_SITES = 12
DENSE_FALLBACK_DIM = 2000

SZ = np.diag([1.0, 0.0, -1.0])
SP = np.sqrt(2.0) * np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
SM = SP.T.copy()
SX = 0.5 * (SP + SM)
SY = -0.5j * (SP - SM)
ID3 = np.eye(3)
# F_+ = sqrt(2)(|1><0| + |0><-1|) coincides with the spin-1 raising operator
FP = SP
FM = SM


@dataclass(frozen=True)
class Spin1Algebra:
    sx: np.ndarray = field(default_factory=lambda: SX.copy())
    sy: np.ndarray = field(default_factory=lambda: SY.copy())
    sz: np.ndarray = field(default_factory=lambda: SZ.copy())
    sp: np.ndarray = field(default_factory=lambda: SP.copy())
    sm: np.ndarray = field(default_factory=lambda: SM.copy())

    @property
    def fp(self) -> np.ndarray:
        return self.sp

    @property
    def fm(self) -> np.ndarray:
        return self.sm

    def axis(self, name: str) -> np.ndarray:
        return {"x": self.sx, "y": self.sy, "z": self.sz}[name]


SPIN1 = Spin1Algebra()


def spin_operator(axis) -> np.ndarray:
    """3x3 spin-1 operator along ``axis`` ('x', 'y', 'z' or a 3-vector)."""
    if isinstance(axis, str):
        return SPIN1.axis(axis)
    n = np.asarray(axis, dtype=float)
    return n[0] * SX + n[1] * SY + n[2] * SZ


def rotation(axis, angle: float) -> np.ndarray:
    """Single-site rotation ``exp(-i angle n.S)``."""
    n = np.asarray(spin_operator(axis))
    return la.expm(-1j * angle * n)


# ---------------------------------------------------------------------------
# basis bookkeeping


def check_size(n_sites: int, max_sites: int = MAX_SITES) -> None:
    if n_sites < 1:
        raise ValueError("need at least one site")
    if n_sites > max_sites:
        raise ValueError(f"{n_sites} sites exceeds the configured maximum {max_sites} "
                         f"(dimension 3**{n_sites})")


@lru_cache(maxsize=32)
def _magnetizations(n_sites: int) -> np.ndarray:
    dim = 3**n_sites
    idx = np.arange(dim)
    digits = np.empty((dim, n_sites), dtype=np.int8)
    for k in range(n_sites - 1, -1, -1):
        digits[:, k] = idx % 3
        idx //= 3
    mags = (1 - digits).astype(np.int8)
    mags.setflags(write=False)
    return mags


def site_magnetizations(n_sites: int) -> np.ndarray:
    """Array of shape (3**N, N) with the S_z eigenvalue of every site."""
    return _magnetizations(n_sites)


def total_magnetization(n_sites: int) -> np.ndarray:
    return site_magnetizations(n_sites).sum(axis=1)


def sector_indices(n_sites: int, m_total: int) -> np.ndarray:
    return np.flatnonzero(total_magnetization(n_sites) == m_total)


def product_state(local_m, dtype=complex) -> np.ndarray:
    """Product state from a list of local magnetizations (+1, 0, -1)."""
    local_m = list(local_m)
    n = len(local_m)
    idx = 0
    for k, m in enumerate(local_m):
        if m not in (-1, 0, 1):
            raise ValueError(f"invalid local magnetization {m}")
        idx += (1 - m) * 3 ** (n - 1 - k)
    psi = np.zeros(3**n, dtype=dtype)
    psi[idx] = 1.0
    return psi


def local_operator(op: np.ndarray, site: int, n_sites: int) -> sp.csr_matrix:
    """Embed a single-site 3x3 operator at ``site`` of an N-site chain."""
    left = sp.identity(3**site, format="csr")
    right = sp.identity(3 ** (n_sites - site - 1), format="csr")
    return sp.kron(sp.kron(left, sp.csr_matrix(op)), right, format="csr")


def global_operator(op: np.ndarray, n_sites: int) -> np.ndarray:
    """Dense product ``op x op x ... x op`` (a global, non-entangling map)."""
    out = np.ones((1, 1), dtype=np.result_type(op, float))
    for _ in range(n_sites):
        out = np.kron(out, op)
    return out


def total_sz(n_sites: int) -> sp.csr_matrix:
    return sp.diags(total_magnetization(n_sites).astype(float), format="csr")


# ---------------------------------------------------------------------------
# model


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the simulated XXZ-D chain with staggered field.

    ``D`` may be a scalar or one value per site (the effective models give a
    site-dependent anisotropy when the diagonal couplings J_ii differ).
    """

    J: np.ndarray
    lam: float = 1.0
    D: float | np.ndarray = 0.0
    h: float = 0.0
    boundary: str = "open"

    def __post_init__(self):
        J = np.atleast_2d(np.asarray(self.J, dtype=float))
        if J.shape[0] != J.shape[1]:
            raise ValueError("J must be square")
        if not np.allclose(J, J.T, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(J).max())):
            raise ValueError("J must be symmetric")
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if self.boundary != "open":
            raise ValueError("only open boundary conditions are supported")
        D = np.asarray(self.D, dtype=float)
        if D.ndim not in (0, 1) or (D.ndim == 1 and D.size != J.shape[0]):
            raise ValueError("D must be a scalar or one value per site")
        object.__setattr__(self, "J", J)

    @property
    def n_sites(self) -> int:
        return self.J.shape[0]

    @property
    def D_sites(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.D, dtype=float), (self.n_sites,)).copy()

    def replace(self, **changes) -> "ModelParams":
        kw = dict(J=self.J, lam=self.lam, D=self.D, h=self.h, boundary=self.boundary)
        kw.update(changes)
        return ModelParams(**kw)


def nearest_neighbor_couplings(n_sites: int, J: float = 1.0) -> np.ndarray:
    out = np.zeros((n_sites, n_sites))
    i = np.arange(n_sites - 1)
    out[i, i + 1] = J
    out[i + 1, i] = J
    return out


def staggered_signs(n_sites: int) -> np.ndarray:
    # site labels 0..N-1
    return (-1.0) ** np.arange(n_sites)


def _diagonal(p: ModelParams, mags: np.ndarray) -> np.ndarray:
    m = mags.astype(float)
    n = p.n_sites
    diag = (m**2) @ p.D_sites
    if p.h != 0.0:
        diag -= p.h * (m @ staggered_signs(n))
    if p.lam != 0.0:
        iu, ju = np.triu_indices(n, k=1)
        Jpairs = p.J[iu, ju]
        nz = Jpairs != 0.0
        for i, j, Jij in zip(iu[nz], ju[nz], Jpairs[nz]):
            diag += p.lam * Jij * m[:, i] * m[:, j]
    return diag


def _ladder_coeff(m: np.ndarray, raise_: bool) -> np.ndarray:
    # <m+1|S+|m> = sqrt(2 - m(m+1)), <m-1|S-|m> = sqrt(2 - m(m-1))
    return np.sqrt(2.0 - m * (m + 1)) if raise_ else np.sqrt(2.0 - m * (m - 1))


def build_hamiltonian(p: ModelParams, max_sites: int = MAX_SITES) -> sp.csr_matrix:
    """Sparse XXZ-D Hamiltonian with staggered field.

    H = sum_{i<j} J_ij (Sx Sx + Sy Sy + lam Sz Sz) + sum_i D_i (Sz_i)^2
        - h sum_i (-1)^i Sz_i

    The result is real symmetric and block diagonal in total S_z.  The
    diagonal of ``J`` is ignored here.
    """
    n = p.n_sites
    check_size(n, max_sites)
    mags = site_magnetizations(n)
    dim = 3**n
    rows = [np.arange(dim)]
    cols = [np.arange(dim)]
    vals = [_diagonal(p, mags)]
    iu, ju = np.triu_indices(n, k=1)
    for i, j in zip(iu, ju):
        Jij = p.J[i, j]
        if Jij == 0.0:
            continue
        mi = mags[:, i].astype(float)
        mj = mags[:, j].astype(float)
        # S+_i S-_j: i up, j down; index shift from digit changes
        ok = (mi < 1) & (mj > -1)
        src = np.flatnonzero(ok)
        dst = src - 3 ** (n - 1 - i) + 3 ** (n - 1 - j)
        amp = 0.5 * Jij * _ladder_coeff(mi[ok], True) * _ladder_coeff(mj[ok], False)
        rows += [dst, src]
        cols += [src, dst]
        vals += [amp, amp]
    H = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    H = H.tocsr()
    H.sum_duplicates()
    H.eliminate_zeros()
    return H


def staggered_field_operator(n_sites: int, h: float) -> sp.csr_matrix:
    """Diagonal operator ``-h sum_i (-1)^i Sz_i``."""
    m = site_magnetizations(n_sites).astype(float)
    return sp.diags(-h * (m @ staggered_signs(n_sites)), format="csr")


def anisotropy_operator(n_sites: int, D=1.0) -> sp.csr_matrix:
    m = site_magnetizations(n_sites).astype(float)
    D = np.broadcast_to(np.asarray(D, dtype=float), (n_sites,))
    return sp.diags((m**2) @ D, format="csr")


# ---------------------------------------------------------------------------
# effective models and parameter maps

FORMS = ("printed", "secular")


def _check_scheme(scheme, form):
    if scheme not in (1, 2):
        raise ValueError(f"scheme must be 1 or 2, got {scheme!r}")
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")


def effective_coefficients(scheme: int, theta: float, form: str = "printed"):
    """Return (xx, zz, single_site) coefficients of the effective model.

    ``form="printed"`` reproduces the closed forms used in the proposal.
    ``form="secular"`` is the rotating-wave (secular) reduction of the
    second-order spin Hamiltonian with respect to the theta-rotated field,
    which is what the driven dynamics actually converge to.
    """
    _check_scheme(scheme, form)
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    if form == "printed":
        xx = (1 + c2) / 2 if scheme == 1 else c2 / 2
        return xx, s2, c2 / 2 - s2
    if scheme == 1:
        return (1 + c2) / 2, s2, c2 - s2 / 2
    return s2 / 2, c2, c2 - s2 / 2


def _diag_sign(scheme: int, form: str) -> float:
    # second-order diagonal term: -J_ii/2 Fz^2 (red sideband) or +J_ii/2 Sz^2
    # (dressed MS); the printed closed form uses (D' - J_ii/2) for both
    return +1.0 if (scheme == 2 and form == "secular") else -1.0


@dataclass(frozen=True)
class EffectiveParams:
    scheme: int
    theta: float
    D_prime: float
    J_scale: float
    lam: float
    D: np.ndarray
    form: str = "printed"


def effective_params(scheme: int, theta: float, D_prime, J: np.ndarray,
                     form: str = "printed") -> EffectiveParams:
    J = np.asarray(J, dtype=float)
    xx, zz, ss = effective_coefficients(scheme, theta, form)
    if abs(xx) < 1e-14:
        raise ValueError("XX coefficient vanishes at this theta; lambda is undefined")
    D = (np.asarray(D_prime, dtype=float) + _diag_sign(scheme, form) * np.diag(J) / 2) * ss
    return EffectiveParams(scheme, float(theta), D_prime, xx, zz / xx, D, form)


def build_effective(scheme: int, theta: float, D_prime, J, form: str = "printed",
                    max_sites: int = MAX_SITES) -> sp.csr_matrix:
    """Effective Hamiltonian of scheme 1 (red sideband) or 2 (dressed MS).

    Expressed in the rotated basis, which is stored as the computational
    basis.  The exchange sum runs over i<j; the diagonal J_ii feeds the
    single-site term.

    Raises
    ------
    ValueError
        If the XX coefficient vanishes (scheme 2 at theta = pi/2 in the
        printed form), leaving lambda undefined.
    """
    ep = effective_params(scheme, theta, D_prime, J, form)
    J = np.asarray(J, dtype=float)
    off = J - np.diag(np.diag(J))
    return build_hamiltonian(ModelParams(ep.J_scale * off, ep.lam, ep.D, 0.0), max_sites)


def lambda_from_theta(scheme: int, theta: float, form: str = "printed") -> float:
    xx, zz, _ = effective_coefficients(scheme, theta, form)
    if abs(xx) < 1e-14:
        raise ValueError("lambda undefined: XX coefficient vanishes")
    return zz / xx


def theta_from_lambda(scheme: int, lam: float, form: str = "printed") -> float:
    """Inverse of :func:`lambda_from_theta` on theta in [0, pi/2]."""
    _check_scheme(scheme, form)
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if scheme == 1:
        if lam > 2 + 1e-12:
            raise ValueError(f"scheme 1 only reaches 0 <= lambda <= 2 (got {lam})")
        return float(np.arcsin(np.sqrt(min(2 * lam / (2 + lam), 1.0))))
    if form == "printed":
        return float(np.arctan(np.sqrt(lam / 2)))
    if lam == 0:
        return float(np.pi / 2)
    return float(np.arctan(np.sqrt(2 / lam)))


def dprime_for_target_D(scheme: int, theta: float, D_target: float, J_ii: float = 0.0,
                        form: str = "printed", atol: float = 1e-12) -> float:
    """Bare anisotropy D' that produces ``D_target`` in the effective model."""
    _, _, ss = effective_coefficients(scheme, theta, form)
    sign = _diag_sign(scheme, form)
    if abs(ss) < atol:
        if D_target != 0:
            raise ValueError("D unreachable at this theta: the single-site coefficient vanishes")
        return -sign * J_ii / 2
    return D_target / ss - sign * J_ii / 2


# ---------------------------------------------------------------------------
# eigensolvers


def _as_sparse(H):
    return H if sp.issparse(H) else sp.csr_matrix(H)


def _dense_lowest(Hd, k):
    w, v = la.eigh(Hd, subset_by_index=[0, min(k, Hd.shape[0]) - 1])
    return w, v


def solve_ground(H, k: int = 1, sector: int | None = None, n_sites: int | None = None,
                 tol: float = 1e-9):
    """Lowest ``k`` eigenpairs of a Hermitian operator.

    With ``sector`` set, only the total-S_z block with that magnetization is
    diagonalized and eigenvectors are embedded back into the full space.
    Lanczos (``eigsh``) is used for large blocks; below
    ``DENSE_FALLBACK_DIM`` a dense solve is used directly.
    """
    H = _as_sparse(H)
    dim = H.shape[0]
    if n_sites is None:
        n_sites = int(round(np.log(dim) / np.log(3)))
    if sector is not None:
        idx = sector_indices(n_sites, sector)
        block = H[idx][:, idx]
    else:
        idx = np.arange(dim)
        block = H
    bdim = block.shape[0]
    k = min(k, bdim)
    if bdim <= DENSE_FALLBACK_DIM:
        w, v = _dense_lowest(block.toarray(), k)
    else:
        try:
            w, v = spla.eigsh(block, k=k, which="SA", tol=1e-12, maxiter=20 * bdim)
        except spla.ArpackNoConvergence as exc:
            raise RuntimeError(f"Lanczos did not converge for dimension {bdim}") from exc
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    hnorm = max(spla.norm(block, ord=1), 1.0)
    res = np.linalg.norm(block @ v - v * w, axis=0)
    if np.any(res > tol * hnorm):
        if bdim <= DENSE_FALLBACK_DIM:
            raise RuntimeError(f"eigen-residual {res.max():.2e} above tolerance")
        warnings.warn(f"Lanczos residual {res.max():.2e}; retrying with a dense solve")
        if bdim > 20000:
            raise RuntimeError("Lanczos inaccurate and block too large for dense fallback")
        w, v = _dense_lowest(block.toarray(), k)
    if sector is None:
        return w, v
    full = np.zeros((dim, v.shape[1]), dtype=v.dtype)
    full[idx] = v
    return w, full


def lowest_levels(H, n_sites: int, k: int = 2, sectors=None):
    """Lowest levels over all total-S_z sectors, each tagged with its sector.

    Returns ``(energies, sectors)`` sorted by energy.
    """
    H = _as_sparse(H)
    if sectors is None:
        sectors = range(-n_sites, n_sites + 1)
    E, S = [], []
    for m in sectors:
        idx = sector_indices(n_sites, m)
        block = H[idx][:, idx]
        if block.shape[0] <= DENSE_FALLBACK_DIM:
            w = la.eigvalsh(block.toarray(), subset_by_index=[0, min(k, block.shape[0]) - 1])
        else:
            w = np.sort(spla.eigsh(block, k=k, which="SA", tol=1e-12,
                                   return_eigenvectors=False))
        E.extend(w)
        S.extend([m] * len(w))
    order = np.argsort(E, kind="stable")
    return np.asarray(E)[order], np.asarray(S)[order]


def spectral_gap(H, n_sites: int, sector: int | None = None) -> float:
    """E1 - E0 over all sectors, or within one sector if given."""
    if sector is None:
        E, _ = lowest_levels(H, n_sites, k=2)
    else:
        E, _ = solve_ground(H, k=2, sector=sector, n_sites=n_sites)
    return float(E[1] - E[0])
