"""Core t-product linear algebra for dense third-order tensors.

Tensors are plain numpy arrays of shape (m, n, k): entry (i, j, kappa) is
element i of lateral slice j in frontal slice kappa.  The third mode is the
"tube" direction; the t-product multiplies tensors like matrices whose
scalars are length-k tubes under circular convolution, which the mode-3 DFT
diagonalizes.  Forward DFT is unnormalized, the inverse carries the 1/k
factor (numpy's fft/ifft convention).
"""

import numpy as np

from .errors import (
    DimensionMismatch,
    ImaginaryResidualTooLarge,
    IndexOutOfRange,
    NotOrthonormal,
    SingularFrequencySlice,
)

IMAG_RESIDUAL_TOL = 1e-6


def _check3(t, name="tensor"):
    t = np.asarray(t)
    if t.ndim != 3:
        raise DimensionMismatch(f"{name} must be 3-way, got shape {t.shape}")
    return t


def fft_mode3(t):
    """DFT of every tube, i.e. along the third mode."""
    return np.fft.fft(_check3(t), axis=2)


def ifft_mode3(f, tol=IMAG_RESIDUAL_TOL):
    """Inverse mode-3 DFT back to a real tensor.

    Raises ImaginaryResidualTooLarge when the input is not the frequency
    image of a real tensor (relative imaginary residual above `tol`).
    """
    f = _check3(f)
    x = np.fft.ifft(f, axis=2)
    scale = np.linalg.norm(x)
    if scale > 0:
        rel = np.linalg.norm(x.imag) / scale
        if rel > tol:
            raise ImaginaryResidualTooLarge(
                f"imaginary residual {rel:.3e} exceeds {tol:.1e}"
            )
    return np.ascontiguousarray(x.real)


def tprod(a, b):
    """t-product of an (n1, n2, k) and an (n2, n3, k) tensor.

    Computed slice-wise in the frequency domain: each frequency slice of the
    result is the matrix product of the corresponding input slices.
    """
    a = _check3(a)
    b = _check3(b)
    if a.shape[1] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise DimensionMismatch(f"cannot t-multiply {a.shape} by {b.shape}")
    fa = np.fft.fft(a, axis=2)
    fb = np.fft.fft(b, axis=2)
    fc = np.einsum("isk,sjk->ijk", fa, fb)
    return ifft_mode3(fc)


def ttranspose(t):
    """Tensor (conjugate) transpose: transpose each frontal slice and
    reverse the order of slices 2..k."""
    t = _check3(t)
    rev = t[:, :, ::-1]
    rolled = np.roll(rev, 1, axis=2)
    return np.ascontiguousarray(rolled.transpose(1, 0, 2))


def tube_transpose(t):
    """Tube-wise transpose: swap the first two indices, keep tubes intact."""
    return np.ascontiguousarray(_check3(t).transpose(1, 0, 2))


def identity_tensor(n, k):
    """Identity for the t-product: I_n in slice 1, zeros elsewhere."""
    out = np.zeros((n, n, k))
    out[:, :, 0] = np.eye(n)
    return out


def tinv(t, cond_limit=1e12):
    """t-product inverse of a square tensor via frequency-slice inversion."""
    t = _check3(t)
    n, n2, k = t.shape
    if n != n2:
        raise DimensionMismatch(f"tinv needs a square tensor, got {t.shape}")
    ft = np.fft.fft(t, axis=2)
    out = np.empty_like(ft)
    for kappa in range(k):
        sl = ft[:, :, kappa]
        sv = np.linalg.svd(sl, compute_uv=False)
        if sv[-1] == 0 or sv[0] / sv[-1] > cond_limit:
            raise SingularFrequencySlice(kappa)
        out[:, :, kappa] = np.linalg.inv(sl)
    return ifft_mode3(out)


def elementwise_prod(a, b):
    """Entry-by-entry product of two same-shaped tensors."""
    a = _check3(a)
    b = _check3(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return a * b


def tubewise_conv(a, b):
    """Circular convolution of matching tubes of two same-shaped tensors."""
    a = _check3(a)
    b = _check3(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    fc = np.fft.fft(a, axis=2) * np.fft.fft(b, axis=2)
    if np.isrealobj(a) and np.isrealobj(b):
        return ifft_mode3(fc)
    return np.fft.ifft(fc, axis=2)


def slicewise_prod(a, b):
    """Matrix product of matching frontal slices."""
    a = _check3(a)
    b = _check3(b)
    if a.shape[1] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise DimensionMismatch(f"cannot slice-multiply {a.shape} by {b.shape}")
    return np.einsum("isk,sjk->ijk", a, b)


def circ_expand(t):
    """Expand a tensor to its (mk x nk) circular-matrix image.

    Block (i, j) is the k x k circulant whose first column is tube (i, j, :).
    Test oracle only: the t-product becomes ordinary matrix product here.
    """
    t = _check3(t)
    m, n, k = t.shape
    idx = (np.arange(k)[:, None] - np.arange(k)[None, :]) % k
    blocks = t[:, :, idx]  # (m, n, k, k)
    return blocks.transpose(0, 2, 1, 3).reshape(m * k, n * k)


def frobenius_norm(t):
    return float(np.linalg.norm(_check3(t)))


def spectral_norm(t):
    """Largest singular value over all frequency slices."""
    ft = np.fft.fft(_check3(t), axis=2)
    m, n, k = ft.shape
    top = 0.0
    for kappa in range(k):
        sv = np.linalg.svd(ft[:, :, kappa], compute_uv=False)
        if sv.size and sv[0] > top:
            top = float(sv[0])
    return top


def infinity_norm(t):
    return float(np.max(np.abs(_check3(t))))


def col_2star_norms(t):
    """Frobenius norm of each lateral slice, as a length-n vector."""
    t = _check3(t)
    return np.sqrt(np.sum(t * t, axis=(0, 2)))


def inf_2star_norm(t):
    return float(np.max(col_2star_norms(t)))


def orthonormality_error(u):
    """Frobenius distance of U^dag * U from the identity tensor."""
    u = _check3(u)
    r = u.shape[1]
    gram = tprod(ttranspose(u), u)
    return float(np.linalg.norm(gram - identity_tensor(r, u.shape[2])))


def coherence(u, orth_tol=1e-8):
    """Coherence of an orthonormal tensor-column subspace.

    Equals (n/r) * max_i ||U(i, :, :)||_F^2 and lies in [1, n/r].
    """
    u = _check3(u)
    n, r, k = u.shape
    if orthonormality_error(u) > orth_tol * np.sqrt(max(r * k, 1)):
        raise NotOrthonormal("input lateral slices are not orthonormal")
    row_sq = np.sum(u * u, axis=(1, 2))
    return float(n / r * np.max(row_sq))


def column_basis(i, m, k):
    """(m, 1, k) basis tensor with a single 1 at row i of slice 1 (0-based)."""
    if not 0 <= i < m:
        raise IndexOutOfRange(f"column index {i} outside [0, {m})")
    out = np.zeros((m, 1, k))
    out[i, 0, 0] = 1.0
    return out


def tubal_basis(j, k):
    """Length-k tube with a single 1 at position j (0-based)."""
    if not 0 <= j < k:
        raise IndexOutOfRange(f"tube index {j} outside [0, {k})")
    out = np.zeros(k)
    out[j] = 1.0
    return out
