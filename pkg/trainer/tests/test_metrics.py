"""Scale-invariant SDR metric."""

import numpy as np
import pytest

from ffsn_trainer import si_sdr


def test_perfect_and_scaled_estimates_are_infinite():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(512)
    assert si_sdr(x, x) == np.inf
    # power-of-two scaling keeps every float operation exact
    assert si_sdr(2.0 * x, x) == np.inf


def test_orthogonal_distortion_hand_value():
    # r and n zero-mean, orthogonal, equal energy: adding 0.5*n costs
    # 10*log10(1/0.25) = 6.0206 dB
    r = np.tile([1.0, -1.0], 128)
    n = np.tile([1.0, 1.0, -1.0, -1.0], 64)
    assert np.dot(r, n) == 0.0
    assert si_sdr(r + 0.5 * n, r) == pytest.approx(10.0 * np.log10(4.0), abs=1e-9)


def test_known_snr_recovered():
    rng = np.random.default_rng(7)
    r = rng.standard_normal(4096)
    r -= r.mean()
    n = rng.standard_normal(4096)
    n -= n.mean()
    n -= (np.dot(n, r) / np.dot(r, r)) * r  # exactly orthogonal residue
    n *= np.sqrt(np.dot(r, r) / np.dot(n, n)) * 10 ** (-20 / 20.0)  # -20 dB
    assert si_sdr(r + n, r) == pytest.approx(20.0, abs=1e-6)


def test_degenerate_inputs_rejected():
    with pytest.raises(ValueError):
        si_sdr(np.zeros(8), np.zeros(8))  # zero-energy reference
    with pytest.raises(ValueError):
        si_sdr(np.zeros(8), np.zeros(9))
