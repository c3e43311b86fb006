"""Tensor singular value decomposition and tubal-rank tools.

The t-SVD factors a real (m, n, k) tensor as U * Theta * V^dag with U, V
orthonormal under the t-product and Theta f-diagonal.  It is computed by an
SVD of every frequency slice; conjugate-symmetric slice pairs share one SVD
so the inverse DFT is exactly real.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import ifft_mode3, tprod, ttranspose, _check3
from .errors import RankOutOfRange

DEFAULT_RANK_TOL = 1e-8


@dataclass
class TsvdFactors:
    """Reduced t-SVD triple: u (m, q, k), theta (q, q, k), v (n, q, k)
    with q = min(m, n)."""

    u: np.ndarray
    theta: np.ndarray
    v: np.ndarray
    reduced: bool = True

    def eigentube_norms(self):
        q = self.theta.shape[0]
        return np.array(
            [np.linalg.norm(self.theta[s, s, :]) for s in range(q)]
        )


def _fix_phases(u, s, vh):
    # Make the largest-magnitude entry of each left singular vector real
    # positive so the factorization is deterministic.
    for col in range(u.shape[1]):
        idx = int(np.argmax(np.abs(u[:, col])))
        pivot = u[idx, col]
        mag = abs(pivot)
        if mag > 0:
            phase = pivot / mag
            u[:, col] *= np.conj(phase)
            vh[col, :] *= phase
    return u, s, vh


def tsvd(t):
    """Reduced t-SVD of a real tensor."""
    t = _check3(t)
    m, n, k = t.shape
    q = min(m, n)
    ft = np.fft.fft(t, axis=2)
    uf = np.zeros((m, q, k), dtype=complex)
    sf = np.zeros((q, k))
    vf = np.zeros((n, q, k), dtype=complex)
    for kappa in range(k // 2 + 1):
        sl = ft[:, :, kappa]
        mirror = (k - kappa) % k
        if mirror == kappa:
            # DC slice (and Nyquist slice for even k) is real.
            sl = sl.real
        u, s, vh = np.linalg.svd(sl, full_matrices=False)
        u, s, vh = _fix_phases(u, s, vh)
        uf[:, :, kappa] = u
        sf[:, kappa] = s
        vf[:, :, kappa] = vh.conj().T
        if mirror != kappa:
            uf[:, :, mirror] = u.conj()
            sf[:, mirror] = s
            vf[:, :, mirror] = vh.T
    u = ifft_mode3(uf)
    v = ifft_mode3(vf)
    theta_f = np.zeros((q, q, k), dtype=complex)
    rows = np.arange(q)
    theta_f[rows, rows, :] = sf
    theta = ifft_mode3(theta_f)
    return TsvdFactors(u=u, theta=theta, v=v)


def tubal_rank(t, tol=DEFAULT_RANK_TOL):
    """Number of eigentubes above `tol` relative to the leading one."""
    norms = tsvd(t).eigentube_norms()
    if norms.size == 0 or norms[0] == 0:
        return 0
    return int(np.count_nonzero(norms > tol * norms[0]))


def truncate_rank(t, r):
    """Best tubal-rank-r approximation (leading r t-SVD components)."""
    t = _check3(t)
    m, n, k = t.shape
    if not 1 <= r <= min(m, n):
        raise RankOutOfRange(f"rank {r} outside [1, {min(m, n)}]")
    f = tsvd(t)
    core = tprod(f.theta[:r, :r, :], ttranspose(f.v[:, :r, :]))
    return tprod(f.u[:, :r, :], core)


def top_r_eigenslices(t, r):
    """First r lateral slices of the left t-SVD factor (orthonormal)."""
    t = _check3(t)
    if not 1 <= r <= min(t.shape[0], t.shape[1]):
        raise RankOutOfRange(f"rank {r} outside [1, {min(t.shape[:2])}]")
    return tsvd(t).u[:, :r, :]
