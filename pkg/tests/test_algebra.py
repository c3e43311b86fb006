import numpy as np
import pytest

from tubalkit.algebra import (
    circ_expand,
    coherence,
    col_2star_norms,
    column_basis,
    elementwise_prod,
    fft_mode3,
    frobenius_norm,
    identity_tensor,
    ifft_mode3,
    inf_2star_norm,
    infinity_norm,
    slicewise_prod,
    spectral_norm,
    tinv,
    tprod,
    ttranspose,
    tubal_basis,
    tube_transpose,
    tubewise_conv,
)
from tubalkit.altmin import qr_tensor
from tubalkit.errors import (
    DimensionMismatch,
    ImaginaryResidualTooLarge,
    IndexOutOfRange,
    NotOrthonormal,
    SingularFrequencySlice,
)


def naive_dft_tube(tube):
    # O(k^2) DFT sum, used as an oracle for fft_mode3.
    k = len(tube)
    out = np.zeros(k, dtype=complex)
    for freq in range(k):
        for t in range(k):
            out[freq] += tube[t] * np.exp(-2j * np.pi * freq * t / k)
    return out


def test_fft_k1_is_identity():
    t = np.random.default_rng(0).standard_normal((3, 4, 1))
    f = fft_mode3(t)
    assert np.allclose(f, t)
    assert np.iscomplexobj(f)


def test_fft_impulse_tube():
    t = np.zeros((1, 1, 4))
    t[0, 0, 0] = 1.0
    assert np.allclose(fft_mode3(t)[0, 0, :], np.ones(4))


def test_fft_matches_naive_dft_oracle():
    rng = np.random.default_rng(1)
    t = rng.standard_normal((3, 2, 5))
    f = fft_mode3(t)
    for i in range(3):
        for j in range(2):
            oracle = naive_dft_tube(t[i, j, :])
            assert np.max(np.abs(f[i, j, :] - oracle)) < 1e-12


def test_ifft_round_trip():
    rng = np.random.default_rng(2)
    t = rng.standard_normal((4, 4, 8))
    back = ifft_mode3(fft_mode3(t))
    assert np.linalg.norm(back - t) < 1e-12 * np.linalg.norm(t)


def test_ifft_all_ones_frequency_tube():
    f = np.ones((1, 1, 4), dtype=complex)
    expected = np.zeros(4)
    expected[0] = 1.0
    assert np.allclose(ifft_mode3(f)[0, 0, :], expected)


def test_ifft_rejects_conjugate_symmetry_violation():
    f = np.zeros((1, 1, 4), dtype=complex)
    f[0, 0, 1] = 1.0 + 2.0j  # no conjugate partner at frequency 3
    with pytest.raises(ImaginaryResidualTooLarge):
        ifft_mode3(f)


def test_tprod_identity():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((4, 3, 5))
    assert np.allclose(tprod(identity_tensor(4, 5), a), a, atol=1e-12)
    assert np.allclose(tprod(a, identity_tensor(3, 5)), a, atol=1e-12)


def test_tprod_hand_circular_convolution():
    a = np.array([[[1.0, 2.0]]])
    b = np.array([[[3.0, 5.0]]])
    out = tprod(a, b)
    # [a1*b1 + a2*b2, a1*b2 + a2*b1]
    assert np.allclose(out[0, 0, :], [1 * 3 + 2 * 5, 1 * 5 + 2 * 3])


def test_tprod_matches_circ_oracle():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((4, 3, 5))
    b = rng.standard_normal((3, 2, 5))
    c = tprod(a, b)
    prod = circ_expand(a) @ circ_expand(b)
    assert np.allclose(circ_expand(c), prod, atol=1e-10)
    # first block column of the circ product folds back to the tensor
    k = 5
    folded = np.stack(
        [prod[i * k : (i + 1) * k, 0:k][:, 0] for i in range(4)]
    )
    for j in range(2):
        col = np.stack(
            [prod[i * k : (i + 1) * k, j * k] for i in range(4)]
        )
        assert np.allclose(col, c[:, j, :], atol=1e-10)
    del folded


def test_tprod_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        tprod(np.zeros((2, 3, 4)), np.zeros((2, 3, 4)))
    with pytest.raises(DimensionMismatch):
        tprod(np.zeros((2, 3, 4)), np.zeros((3, 2, 5)))


def test_ttranspose_k1_is_matrix_transpose():
    t = np.random.default_rng(5).standard_normal((3, 5, 1))
    assert np.allclose(ttranspose(t)[:, :, 0], t[:, :, 0].T)


def test_ttranspose_involution():
    t = np.random.default_rng(6).standard_normal((3, 4, 6))
    assert np.allclose(ttranspose(ttranspose(t)), t)


def test_ttranspose_reverses_product():
    rng = np.random.default_rng(7)
    for _ in range(5):
        a = rng.standard_normal((3, 3, 4))
        b = rng.standard_normal((3, 3, 4))
        lhs = ttranspose(tprod(a, b))
        rhs = tprod(ttranspose(b), ttranspose(a))
        assert np.allclose(lhs, rhs, atol=1e-10)


def test_ttranspose_slice_layout():
    t = np.random.default_rng(8).standard_normal((2, 3, 5))
    out = ttranspose(t)
    assert np.allclose(out[:, :, 0], t[:, :, 0].T)
    for kappa in range(1, 5):
        # slice kappa (0-based) is the transpose of input slice k - kappa
        assert np.allclose(out[:, :, kappa], t[:, :, 5 - kappa].T)


def test_tube_transpose_basics():
    t = np.random.default_rng(9).standard_normal((3, 4, 5))
    out = tube_transpose(t)
    assert out.shape == (4, 3, 5)
    assert np.allclose(tube_transpose(out), t)
    for i in range(3):
        for j in range(4):
            assert np.allclose(out[j, i, :], t[i, j, :])
    # differs from the t-transpose once k >= 2
    assert not np.allclose(out, ttranspose(t))


def test_identity_tensor_shape():
    one = identity_tensor(1, 1)
    assert one.shape == (1, 1, 1) and one[0, 0, 0] == 1.0
    eye = identity_tensor(3, 4)
    f = fft_mode3(eye)
    for kappa in range(4):
        assert np.allclose(f[:, :, kappa], np.eye(3))


def test_tinv_identity_and_round_trip():
    eye = identity_tensor(4, 3)
    assert np.allclose(tinv(eye), eye, atol=1e-12)
    # build a well-conditioned tensor from random orthogonal frequency slices
    rng = np.random.default_rng(10)
    f = np.zeros((4, 4, 3), dtype=complex)
    q0 = np.linalg.qr(rng.standard_normal((4, 4)))[0]
    q1 = np.linalg.qr(
        rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    )[0]
    f[:, :, 0] = q0
    f[:, :, 1] = q1
    f[:, :, 2] = q1.conj()
    t = ifft_mode3(f)
    back = tprod(tinv(t), t)
    assert np.linalg.norm(back - identity_tensor(4, 3)) < 1e-8


def test_tinv_singular_slice():
    t = np.zeros((2, 2, 3))
    t[:, :, 0] = np.eye(2)
    t[:, :, 1] = -0.5 * np.eye(2)
    t[:, :, 2] = -0.5 * np.eye(2)
    # frequency slice 0 is eye + (-0.5) + (-0.5) = 0
    with pytest.raises(SingularFrequencySlice):
        tinv(t)


def test_elementwise_prod_with_ones():
    t = np.random.default_rng(11).standard_normal((3, 3, 4))
    assert np.allclose(elementwise_prod(t, np.ones_like(t)), t)
    with pytest.raises(DimensionMismatch):
        elementwise_prod(t, np.zeros((3, 3, 5)))


def test_tubewise_conv_impulse_identity():
    t = np.random.default_rng(12).standard_normal((3, 3, 4))
    impulse = np.zeros_like(t)
    impulse[:, :, 0] = 1.0
    assert np.allclose(tubewise_conv(t, impulse), t, atol=1e-12)


def test_convolution_theorem():
    rng = np.random.default_rng(13)
    a = rng.standard_normal((3, 3, 4))
    b = rng.standard_normal((3, 3, 4))
    lhs = fft_mode3(tubewise_conv(a, b))
    rhs = fft_mode3(a) * fft_mode3(b)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_slicewise_prod():
    rng = np.random.default_rng(14)
    a = rng.standard_normal((3, 4, 2))
    b = rng.standard_normal((4, 5, 2))
    out = slicewise_prod(a, b)
    for kappa in range(2):
        assert np.allclose(out[:, :, kappa], a[:, :, kappa] @ b[:, :, kappa])


def test_circ_expand_1x1x2_layout():
    t = np.array([[[2.0, 7.0]]])
    assert np.allclose(circ_expand(t), [[2.0, 7.0], [7.0, 2.0]])


def test_circ_expand_identity():
    assert np.allclose(circ_expand(identity_tensor(3, 4)), np.eye(12))


def test_circ_frobenius_identity():
    rng = np.random.default_rng(15)
    for _ in range(5):
        t = rng.standard_normal((4, 3, 5))
        assert np.isclose(
            frobenius_norm(t),
            np.linalg.norm(circ_expand(t)) / np.sqrt(5),
            rtol=1e-12,
        )


def test_circ_transpose_compatibility():
    t = np.random.default_rng(16).standard_normal((3, 4, 5))
    assert np.allclose(circ_expand(ttranspose(t)), circ_expand(t).T, atol=1e-12)


def test_norms_zero_and_identity():
    z = np.zeros((3, 3, 2))
    assert frobenius_norm(z) == 0
    assert spectral_norm(z) == 0
    assert infinity_norm(z) == 0
    assert inf_2star_norm(z) == 0
    eye = identity_tensor(5, 3)
    assert np.isclose(spectral_norm(eye), 1.0)
    assert np.isclose(frobenius_norm(eye), np.sqrt(5))


def test_spectral_norm_matches_circ_svd():
    rng = np.random.default_rng(17)
    for _ in range(5):
        t = rng.standard_normal((5, 4, 3))
        top = np.linalg.svd(circ_expand(t), compute_uv=False)[0]
        assert abs(spectral_norm(t) - top) < 1e-9


def test_col_2star_norms():
    t = np.random.default_rng(18).standard_normal((4, 3, 5))
    norms = col_2star_norms(t)
    for j in range(3):
        assert np.isclose(norms[j], np.linalg.norm(t[:, j, :]))
    assert np.isclose(inf_2star_norm(t), norms.max())


def test_coherence_extremes():
    eye = identity_tensor(6, 3)
    u = eye[:, :2, :]
    assert np.isclose(coherence(u), 3.0)  # n/r = 6/2
    # minimum coherence: rows are cyclic shifts of a scaled impulse, which
    # is orthonormal and spreads mass evenly across rows
    n = k = 4
    spread = np.zeros((n, 1, k))
    for i in range(n):
        spread[i, 0, i] = 1.0 / np.sqrt(n)
    assert np.isclose(coherence(spread), 1.0)


def test_coherence_bounds_random():
    rng = np.random.default_rng(19)
    for _ in range(10):
        u, _ = qr_tensor(rng.standard_normal((8, 3, 4)))
        mu = coherence(u)
        assert 1 - 1e-9 <= mu <= 8 / 3 + 1e-9


def test_coherence_rejects_non_orthonormal():
    with pytest.raises(NotOrthonormal):
        coherence(np.random.default_rng(20).standard_normal((6, 2, 3)))


def test_column_basis():
    e = column_basis(0, 2, 2)
    assert e.shape == (2, 1, 2)
    assert e[0, 0, 0] == 1.0 and np.count_nonzero(e) == 1
    with pytest.raises(IndexOutOfRange):
        column_basis(2, 2, 2)
    with pytest.raises(IndexOutOfRange):
        tubal_basis(5, 3)


def test_basis_decomposition_reconstructs():
    rng = np.random.default_rng(21)
    t = rng.standard_normal((2, 2, 2))
    k = 2
    acc = np.zeros_like(t)
    for i in range(2):
        for j in range(2):
            for kappa in range(k):
                tube = tubal_basis(kappa, k).reshape(1, 1, k)
                piece = tprod(
                    tprod(column_basis(i, 2, k), tube),
                    ttranspose(column_basis(j, 2, k)),
                )
                acc += t[i, j, kappa] * piece
    assert np.allclose(acc, t, atol=1e-12)


def test_basis_extracts_horizontal_slice():
    rng = np.random.default_rng(22)
    t = rng.standard_normal((4, 3, 5))
    for i in range(4):
        row = tprod(ttranspose(column_basis(i, 4, 5)), t)
        assert np.isclose(
            frobenius_norm(row), np.linalg.norm(t[i, :, :]), rtol=1e-10
        )


def test_circ_homomorphism_random_dims():
    rng = np.random.default_rng(23)
    for _ in range(20):
        m, s, n = rng.integers(1, 7, size=3)
        k = int(rng.integers(1, 6))
        a = rng.standard_normal((m, s, k))
        b = rng.standard_normal((s, n, k))
        lhs = circ_expand(tprod(a, b))
        rhs = circ_expand(a) @ circ_expand(b)
        scale = max(np.linalg.norm(rhs), 1.0)
        assert np.linalg.norm(lhs - rhs) < 1e-9 * scale


def test_product_norm_circ_identity():
    rng = np.random.default_rng(24)
    for _ in range(10):
        a = rng.standard_normal((4, 3, 4))
        b = rng.standard_normal((3, 5, 4))
        lhs = frobenius_norm(tprod(a, b))
        rhs = np.linalg.norm(circ_expand(a) @ circ_expand(b)) / 2.0
        assert abs(lhs - rhs) < 1e-9 * max(rhs, 1.0)
