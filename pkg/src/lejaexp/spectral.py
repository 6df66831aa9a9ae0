"""Cheap spectral enclosures: Gershgorin rectangle, shift, norms, d_p, kappa1.

The rectangle R = [alpha,nu] + i[eta,beta] encloses the field of values of A
through the Hermitian/skew-Hermitian split and Gershgorin's disk theorem. The
shift mu is the center of R.  The d_p = ||A^p||^{1/p} sequence estimates the
spectral radius for the hump test.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError


@dataclass(frozen=True)
class SpectralBox:
    """Rectangle [alpha,nu] + i[eta,beta] enclosing the field of values."""

    alpha: float
    nu: float
    eta: float
    beta: float

    @property
    def width(self) -> float:
        return self.nu - self.alpha

    @property
    def height(self) -> float:
        return self.beta - self.eta

    def shifted(self, mu: complex) -> "SpectralBox":
        return SpectralBox(self.alpha - mu.real, self.nu - mu.real,
                           self.eta - mu.imag, self.beta - mu.imag)


@dataclass
class SpectralInfo:
    """Box, shift, chosen norms, and optional d_p list for one operator."""

    box: SpectralBox
    shift: complex
    norms: dict = field(default_factory=dict)
    dps: list | None = None


def _as_matrix(A):
    if sp.issparse(A):
        return A.tocsr()
    M = np.asarray(A)
    if M.ndim != 2:
        raise ParameterError("operator must be a 2-D matrix")
    return M


def _check_square(A):
    if A.shape[0] != A.shape[1]:
        raise ParameterError(f"matrix must be square, got shape {A.shape}")


def _disk_bounds(H):
    """(min center-radius, max center+radius) over Gershgorin disks of Hermitian H."""
    if sp.issparse(H):
        centers = H.diagonal().real
        absH = abs(H)
        rows = np.asarray(absH.sum(axis=1)).ravel()
        radii = rows - np.abs(H.diagonal())
    else:
        centers = np.diag(H).real
        rows = np.abs(H).sum(axis=1)
        radii = rows - np.abs(np.diag(H))
    return float(np.min(centers - radii)), float(np.max(centers + radii))


def gershgorin_box(A) -> SpectralBox:
    """Gershgorin enclosure of the Hermitian and skew-Hermitian parts of A."""
    A = _as_matrix(A)
    _check_square(A)
    AH = A.conj().T if not sp.issparse(A) else A.getH().tocsr()
    H = (A + AH) * 0.5
    # skew part as i*B with B Hermitian: B = (A - A^H) / (2i)
    B = (A - AH) * (-0.5j)
    alpha, nu = _disk_bounds(H)
    eta, beta = _disk_bounds(B)
    is_real = not (np.iscomplexobj(A.data) if sp.issparse(A) else np.iscomplexobj(A))
    if is_real:
        m = max(-eta, beta)
        eta, beta = -m, m
    return SpectralBox(alpha=alpha, nu=nu, eta=eta, beta=beta)


def shift_of(box: SpectralBox) -> complex:
    """Center of the rectangle; real whenever eta = -beta (real matrices)."""
    mu = complex((box.alpha + box.nu) / 2.0, (box.eta + box.beta) / 2.0)
    if mu.imag == 0.0:
        return complex(mu.real, 0.0)
    return mu


def matrix_norm(A, which="1", seed=0, tol=1e-3, maxiter=50):
    """Matrix norm: '1' and 'inf' exact; '2' estimated by power iteration.

    The 2-norm value is an estimate (target ~1e-2 relative) from power
    iteration on A*A with a seeded start vector.
    """
    A = _as_matrix(A)
    _check_square(A)
    which = str(which)
    if which == "1":
        if sp.issparse(A):
            return float(np.max(np.asarray(abs(A).sum(axis=0)).ravel())) if A.shape[0] else 0.0
        return float(np.max(np.abs(A).sum(axis=0), initial=0.0))
    if which == "inf":
        if sp.issparse(A):
            return float(np.max(np.asarray(abs(A).sum(axis=1)).ravel())) if A.shape[0] else 0.0
        return float(np.max(np.abs(A).sum(axis=1), initial=0.0))
    if which != "2":
        raise ParameterError(f"unknown norm {which!r}")
    n = A.shape[0]
    if n == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    if np.iscomplexobj(A.data if sp.issparse(A) else A):
        v = v + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    AH = A.conj().T
    for _ in range(maxiter):
        w = A @ v
        v = AH @ w
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            return 0.0
        v /= nrm
        new = float(np.sqrt(nrm))
        if est > 0 and abs(new - est) <= tol * est:
            return new
        est = new
    return est


_EXACT_DP_LIMIT = 400


def d_p_sequence(A, pmax=5, which="1", seed=0, nprobe=4):
    """d_p = ||A^p||^{1/p} for p = 1..pmax, truncated at the first non-decrease.

    Exact (repeated multiplication) for n <= 400; for larger operators a
    randomized lower estimate from sign-probe vectors is used, so values are
    biased low and callers should shrink intervals conservatively.
    """
    A = _as_matrix(A)
    _check_square(A)
    if pmax < 1 or pmax > 5:
        raise ParameterError("pmax must be in 1..5")
    n = A.shape[0]
    out = []
    if n <= _EXACT_DP_LIMIT:
        dense = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=complex)
        P = dense.copy()
        for p in range(1, pmax + 1):
            d = matrix_norm(P, which=which, seed=seed) ** (1.0 / p)
            if out and d >= out[-1]:
                break
            out.append(float(d))
            if p < pmax:
                P = P @ dense
        return out
    rng = np.random.default_rng(seed)
    probes = rng.choice([-1.0, 1.0], size=(n, nprobe))
    if which == "1":
        vnorm = lambda X: np.abs(X).sum(axis=0)
    elif which == "inf":
        vnorm = lambda X: np.abs(X).max(axis=0)
    else:
        vnorm = lambda X: np.sqrt((np.abs(X) ** 2).sum(axis=0))
    base = vnorm(probes)
    X = probes
    for p in range(1, pmax + 1):
        X = A @ X
        est = float(np.max(vnorm(X) / base))
        d = est ** (1.0 / p)
        if out and d >= out[-1]:
            break
        out.append(d)
    return out


def kappa1(A) -> float:
    """Nonnormality indicator ||A A* - A* A||_1 / ||A||_1^2."""
    A = _as_matrix(A)
    _check_square(A)
    AH = A.conj().T
    C = A @ AH - AH @ A
    denom = matrix_norm(A, "1") ** 2
    if denom == 0.0:
        return 0.0
    return matrix_norm(C, "1") / denom


def spectral_info(A, norm="1", seed=0, with_dps=False, pmax=5) -> SpectralInfo:
    """Convenience wrapper: box, shift, norm of the shifted operator."""
    box = gershgorin_box(A)
    mu = shift_of(box)
    n = A.shape[0]
    ident = sp.identity(n, format="csr", dtype=complex) if sp.issparse(A) else np.eye(n)
    shifted = A - mu * ident if mu != 0 else A
    info = SpectralInfo(box=box, shift=mu)
    info.norms[str(norm)] = matrix_norm(shifted, which=norm, seed=seed)
    if with_dps:
        info.dps = d_p_sequence(shifted, pmax=pmax, which=norm, seed=seed)
    return info
