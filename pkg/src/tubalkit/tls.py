"""Tensor least-squares inner solver, assembled in the frequency domain.

The update min_Y ||P_Omega(T - X * Y^dag)||_F^2 decouples over lateral
slices j.  Masking a tube in the time domain is a circular convolution of
spectra, so slice j yields one complex least-squares system whose design
matrix couples frequencies through the circulant of the mask tube's DFT.
Rows are indexed by (row index i, output frequency), columns by (factor
column s, input frequency).
"""

import math
from dataclasses import dataclass

import numpy as np

from .algebra import fft_mode3, ifft_mode3, tube_transpose, _check3
from .errors import DimensionMismatch, RankDeficientSystem
from .sampling import project, split


@dataclass
class LsOptions:
    """regularization: ridge weight added to the normal equations;
    solver: 'orthogonal-factorization' (lstsq) or 'normal-equations';
    minimum-norm solutions unless allow_rank_deficient is False."""

    regularization: float = 0.0
    solver: str = "orthogonal-factorization"
    allow_rank_deficient: bool = True

    def __post_init__(self):
        if self.regularization < 0:
            raise ValueError("regularization must be nonnegative")
        if self.solver not in ("orthogonal-factorization", "normal-equations"):
            raise ValueError(f"unknown solver {self.solver!r}")


@dataclass
class SliceSystem:
    """One lateral slice's stacked frequency-domain LS system."""

    j: int
    b: np.ndarray  # (m*k,) complex
    design: np.ndarray  # (m*k, r*k) complex


def build_slice_system(observed_freq, mask_freq, x_freq, j):
    """Assemble the design matrix and right-hand side for lateral slice j.

    design[(i, ko), (s, ki)] = (1/k) * circ(mask_freq[i, j, :])[ko, ki]
                                     * x_freq[i, s, ki]
    b[(i, ko)] = observed_freq[i, j, ko]
    """
    m, n, k = observed_freq.shape
    r = x_freq.shape[1]
    idx = (np.arange(k)[:, None] - np.arange(k)[None, :]) % k
    circs = mask_freq[:, j, :][:, idx]  # (m, k, k): [i, ko, ki]
    design = np.einsum("iab,isb->iasb", circs, x_freq) / k
    b = observed_freq[:, j, :].reshape(m * k)
    return SliceSystem(j=j, b=b, design=design.reshape(m * k, r * k))


def _solve_system(system, opts):
    a = system.design
    b = system.b
    cols = a.shape[1]
    if opts.solver == "normal-equations":
        gram = a.conj().T @ a
        if opts.regularization > 0:
            gram = gram + opts.regularization * np.eye(cols)
        rhs = a.conj().T @ b
        sol, _, rank, _ = np.linalg.lstsq(gram, rhs, rcond=None)
    else:
        if opts.regularization > 0:
            a = np.vstack([a, math.sqrt(opts.regularization) * np.eye(cols)])
            b = np.concatenate([b, np.zeros(cols)])
        sol, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if not opts.allow_rank_deficient and rank < cols:
        raise RankDeficientSystem(
            f"slice {system.j}: rank {rank} < {cols} unknowns"
        )
    return sol


def _solve_factor(observed_freq, mask_freq, factor_freq, opts):
    # Returns the (n, r, k) frequency-domain solution of the stacked
    # per-slice systems; each solution vector is laid out (s, kappa).
    m, n, k = observed_freq.shape
    r = factor_freq.shape[1]
    out = np.empty((n, r, k), dtype=complex)
    for j in range(n):
        system = build_slice_system(observed_freq, mask_freq, factor_freq, j)
        out[j] = _solve_system(system, opts).reshape(r, k)
    return out


def ls_solve_y(observed, omega, x, opts=None):
    """Minimize ||P_Omega(T - X * Y^dag)||_F^2 over Y (n, r, k).

    `observed` must already be masked (entries outside Omega are zero).
    """
    opts = opts or LsOptions()
    observed = _check3(observed)
    x = _check3(x)
    if observed.shape[:1] + observed.shape[2:] != x.shape[:1] + x.shape[2:]:
        raise DimensionMismatch(f"observed {observed.shape} vs x {x.shape}")
    if observed.shape != omega.dims:
        raise DimensionMismatch(f"observed {observed.shape} vs omega {omega.dims}")
    of = fft_mode3(observed)
    mf = fft_mode3(omega.mask_tensor())
    xf = fft_mode3(x)
    # The unknown in each slice system is the spectrum of Y^dag's tube,
    # i.e. the conjugate of Y's own spectrum.
    yf = np.conj(_solve_factor(of, mf, xf, opts))
    return ifft_mode3(yf)


def ls_solve_x(observed, omega, y, opts=None):
    """Minimize ||P_Omega(T - X * Y^dag)||_F^2 over X (m, r, k).

    Solved as the tube-wise transposed twin of ls_solve_y: rows of T become
    lateral slices and the known factor enters conjugated.
    """
    opts = opts or LsOptions()
    observed = _check3(observed)
    y = _check3(y)
    if observed.shape[1] != y.shape[0] or observed.shape[2] != y.shape[2]:
        raise DimensionMismatch(f"observed {observed.shape} vs y {y.shape}")
    if observed.shape != omega.dims:
        raise DimensionMismatch(f"observed {observed.shape} vs omega {omega.dims}")
    of = fft_mode3(tube_transpose(observed))
    mf = fft_mode3(tube_transpose(omega.mask_tensor()))
    yf = np.conj(fft_mode3(y))
    xf = _solve_factor(of, mf, yf, opts)
    return ifft_mode3(xf)


def median_count(n):
    """Subset count for the median wrapper: 3*log2(n) rounded, at least 1."""
    return max(1, round(3 * math.log2(n))) if n > 1 else 1


def median_ls(observed, omega, x, seed, t=None, opts=None):
    """Element-wise median of per-subset Y solutions over a split of Omega."""
    t = t if t is not None else median_count(observed.shape[1])
    subsets = split(omega, t, seed)
    sols = [
        ls_solve_y(project(observed, sub), sub, x, opts) for sub in subsets
    ]
    return np.median(np.stack(sols), axis=0)


def median_ls_x(observed, omega, y, seed, t=None, opts=None):
    """Median wrapper for the transposed X update."""
    t = t if t is not None else median_count(observed.shape[0])
    subsets = split(omega, t, seed)
    sols = [
        ls_solve_x(project(observed, sub), sub, y, opts) for sub in subsets
    ]
    return np.median(np.stack(sols), axis=0)
