"""Compressed mask codec and target construction."""

import numpy as np
import pytest

from ffsn_trainer.cirm import K, compress, compute_cirm, decompress


def test_compress_identity_mask():
    # 10 * tanh(0.05) evaluated independently
    assert compress(np.float32(1.0)) == pytest.approx(0.4995837495788001, abs=1e-6)
    assert compress(np.float32(0.0)) == 0.0


def test_compress_is_odd_and_bounded():
    v = np.linspace(-40.0, 40.0, 81, dtype=np.float32)
    out = compress(v)
    np.testing.assert_allclose(out, -compress(-v), atol=1e-6)
    assert np.all(np.abs(out) < K)


def test_roundtrip_on_grid():
    v = np.linspace(-30.0, 30.0, 121, dtype=np.float32)
    np.testing.assert_allclose(decompress(compress(v)), v, atol=1e-3, rtol=1e-5)


def test_decompress_clamps_at_asymptotes():
    out = decompress(np.array([K, -K, K + 5.0], np.float32))
    assert np.all(np.isfinite(out))


def test_targets_identity_rotation_and_zero():
    t_total, bins = 6, 5
    rng = np.random.default_rng(0)
    x = (rng.standard_normal((t_total, bins))
         + 1j * rng.standard_normal((t_total, bins))).astype(np.complex64)

    same = compute_cirm(x, x, lookahead=0)
    np.testing.assert_allclose(same[:, 0::2], 0.4995837, atol=1e-6)
    np.testing.assert_allclose(same[:, 1::2], 0.0, atol=1e-6)

    silent = compute_cirm(np.zeros_like(x), x, lookahead=0)
    np.testing.assert_allclose(silent, 0.0, atol=1e-7)

    # X = i*S means M = S/X = -i
    rotated = compute_cirm(x, 1j * x, lookahead=0)
    np.testing.assert_allclose(rotated[:, 0::2], 0.0, atol=1e-6)
    np.testing.assert_allclose(rotated[:, 1::2], -0.4995837, atol=1e-6)


def test_targets_are_lookahead_shifted():
    t_total, bins, tau = 7, 4, 2
    rng = np.random.default_rng(1)
    clean = (rng.standard_normal((t_total, bins))
             + 1j * rng.standard_normal((t_total, bins))).astype(np.complex64)
    noisy = (rng.standard_normal((t_total, bins))
             + 1j * rng.standard_normal((t_total, bins))).astype(np.complex64)

    plain = compute_cirm(clean, noisy, lookahead=0)
    shifted = compute_cirm(clean, noisy, lookahead=tau)
    np.testing.assert_array_equal(shifted[:tau], 0.0)
    np.testing.assert_array_equal(shifted[tau:], plain[: t_total - tau])


def test_shape_mismatch_rejected():
    a = np.zeros((4, 3), np.complex64)
    b = np.zeros((4, 5), np.complex64)
    with pytest.raises(ValueError):
        compute_cirm(a, b)
    with pytest.raises(ValueError):
        compute_cirm(np.zeros(4, np.complex64), np.zeros(4, np.complex64))
