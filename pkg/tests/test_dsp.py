"""Forward/inverse transform tests with independently derived values.

Expected numbers below were computed by direct windowed-DFT summation
(sum over n of w[n] x[n] exp(-2j pi k n / N)), not by the code under test.
"""

import numpy as np
import pytest

from ffsn.dsp import (
    AnalysisConfig,
    AudioClip,
    hann_periodic,
    istft,
    num_frames,
    stft,
)
from ffsn.errors import ConfigError, DataError, ShapeError


def test_window_is_periodic_hann():
    w = hann_periodic(512)
    assert w.dtype == np.float32
    assert w[0] == 0.0
    assert w[256] == 1.0
    # periodic form: w[n] = w[512 - n] for n >= 1
    assert np.allclose(w[1:], w[:0:-1], atol=1e-7)
    assert abs(float(w.sum()) - 256.0) < 1e-4


def test_frame_count_is_ceil_len_over_hop():
    cfg = AnalysisConfig()
    assert num_frames(256, cfg) == 1
    assert num_frames(257, cfg) == 2
    assert num_frames(512, cfg) == 2
    assert num_frames(16000, cfg) == 63  # ceil(16000/256)


def test_stft_shape_and_dtype():
    rng = np.random.default_rng(0)
    clip = AudioClip(rng.standard_normal(16000).astype(np.float32))
    spec = stft(clip)
    assert spec.shape == (63, 257)
    assert spec.dtype == np.complex64


def test_constant_signal_interior_frame_oracle():
    # x[n] = 1: a fully populated frame has bin0 = sum(w) = 256,
    # bin1 = -128 (periodic Hann), and bin2 upward ~ 0.
    clip = AudioClip(np.ones(4096, np.float32))
    spec = stft(clip)
    interior = spec[4]
    assert abs(interior[0] - 256.0) < 1e-3
    assert abs(interior[1] - (-128.0)) < 1e-3
    assert abs(interior[2]) < 1e-3
    assert abs(interior[32]) < 1e-3


def test_first_frame_sees_only_hop_real_samples():
    # Left padding is window_len - hop zeros, so frame 0 of a constant
    # signal integrates only the second window half: sum(w[256:]) = 128.5.
    clip = AudioClip(np.ones(4096, np.float32))
    spec = stft(clip)
    assert abs(spec[0, 0] - 128.5) < 1e-3


def test_on_bin_cosine_oracle():
    # 1000 Hz = bin 32 at 16 kHz / 512. Segment alignment puts an integer
    # number of cycles before frame 4, so the windowed DFT is exactly
    # 128 at bin 32 and -64 at bins 31/33 (values derived by direct sum).
    sr = 16000
    x = np.cos(2 * np.pi * 1000.0 * np.arange(sr) / sr).astype(np.float32)
    spec = stft(AudioClip(x))
    f4 = spec[4]
    assert abs(f4[32] - 128.0) < 2e-3
    assert abs(f4[31] - (-64.0)) < 2e-3
    assert abs(f4[33] - (-64.0)) < 2e-3
    # off-bin leakage is tiny at distance >= 2
    assert abs(f4[30]) < 2e-3
    assert abs(f4[35]) < 2e-3


def test_stft_linearity():
    rng = np.random.default_rng(7)
    a = rng.standard_normal(8000).astype(np.float32)
    b = rng.standard_normal(8000).astype(np.float32)
    sa = stft(AudioClip(a))
    sb = stft(AudioClip(b))
    sab = stft(AudioClip(a + 0.5 * b))
    assert np.allclose(sab, sa + 0.5 * sb, atol=1e-3)


def test_stft_causality():
    # Changing samples at/after index p must not alter frames that end
    # before p. Frame t covers real samples [t*hop - 256, t*hop + 256).
    rng = np.random.default_rng(3)
    x = rng.standard_normal(16000).astype(np.float32)
    y = x.copy()
    p = 8000
    y[p:] += 1.0
    sx = stft(AudioClip(x))
    sy = stft(AudioClip(y))
    # frames strictly before (p - 256)/hop + 1 see only samples < p
    safe = (p - 256) // 256  # last frame index whose coverage ends at p
    assert np.array_equal(sx[: safe + 1], sy[: safe + 1])
    # and at least one later frame differs
    assert not np.allclose(sx[safe + 2], sy[safe + 2])


@pytest.mark.parametrize("n_samples", [2048, 16000, 16001, 15999, 300])
def test_round_trip_interior(n_samples):
    rng = np.random.default_rng(n_samples)
    x = (0.5 * rng.standard_normal(n_samples)).astype(np.float32)
    clip = AudioClip(x)
    y = istft(stft(clip), out_len=n_samples).samples
    assert y.shape == x.shape
    # interior samples (away from the final partial frame) reconstruct
    # to float32 round-off
    interior = slice(0, max(0, (n_samples // 256 - 1) * 256))
    if interior.stop > 0:
        assert np.max(np.abs(y[interior] - x[interior])) <= 1e-6
    # tail samples either divide by an adequate window-power sum and
    # reconstruct, or fall below the coverage floor and are muted
    w_sq = hann_periodic(512).astype(np.float64) ** 2
    t_total = num_frames(n_samples, AnalysisConfig())
    den = np.zeros((t_total - 1) * 256 + 512)
    for t in range(t_total):
        den[t * 256 : t * 256 + 512] += w_sq
    den = den[256:][:n_samples]
    covered = den[: len(y)] > 1e-2
    assert np.max(np.abs(y[covered] - x[: len(y)][covered])) <= 1e-4
    assert np.all(y[~covered] == 0.0)


def test_round_trip_default_length_pads_to_frame_grid():
    x = np.ones(300, np.float32)
    y = istft(stft(AudioClip(x)))
    assert len(y) == 512  # ceil(300/256) * 256


def test_istft_rejects_wrong_width():
    with pytest.raises(ShapeError):
        istft(np.zeros((4, 100), np.complex64))


def test_stft_rejects_bad_input():
    with pytest.raises(ConfigError):
        stft(AudioClip(np.zeros(100, np.float32), sample_rate=8000))
    with pytest.raises(DataError):
        stft(AudioClip(np.zeros(0, np.float32)))
    bad = np.zeros(100, np.float32)
    bad[3] = np.nan
    with pytest.raises(DataError):
        stft(AudioClip(bad))


def test_config_validation():
    with pytest.raises(ConfigError):
        AnalysisConfig(window_len=512, hop=500)
    with pytest.raises(ConfigError):
        AnalysisConfig(window_len=0)
    with pytest.raises(ConfigError):
        AnalysisConfig(window=np.ones(100, np.float32))
