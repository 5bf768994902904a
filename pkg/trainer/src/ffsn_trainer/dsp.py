"""STFT framing identical to the engine's conventions.

Periodic Hann window ``w[n] = 0.5*(1 - cos(2*pi*n/len))``; the signal is
left-padded with ``window_len - hop`` zeros so frame t ends at input
sample ``t*hop + hop - 1`` (causal); ``T = ceil(len/hop)`` frames with
the final partial frame zero-padded; synthesis applies the same window
and divides by the pointwise sum of squared windows wherever that sum
reaches the coverage floor, muting the remaining samples (dividing a
modified spectrum by a near-zero window power amplifies leakage there).
"""

from __future__ import annotations

import numpy as np

SAMPLE_RATE = 16000
WINDOW_LEN = 512
HOP = 256
NUM_BINS = WINDOW_LEN // 2 + 1
OLA_COVERAGE_FLOOR = np.float32(1e-2)


def hann_periodic(length: int) -> np.ndarray:
    n = np.arange(length, dtype=np.float64)
    return (0.5 * (1.0 - np.cos(2.0 * np.pi * n / length))).astype(np.float32)


_WINDOW = hann_periodic(WINDOW_LEN)


def num_frames(num_samples: int) -> int:
    return -(-num_samples // HOP)


def stft(samples: np.ndarray) -> np.ndarray:
    """(n,) float32 waveform -> (T, F) complex64 spectrogram."""
    x = np.asarray(samples, dtype=np.float32).reshape(-1)
    if x.shape[0] == 0:
        raise ValueError("empty signal")
    t_total = num_frames(x.shape[0])
    left = WINDOW_LEN - HOP
    right = t_total * HOP - x.shape[0]
    padded = np.concatenate(
        [np.zeros(left, np.float32), x, np.zeros(right, np.float32)]
    )
    strides = (padded.strides[0] * HOP, padded.strides[0])
    frames = np.lib.stride_tricks.as_strided(
        padded, shape=(t_total, WINDOW_LEN), strides=strides
    )
    return np.fft.rfft(frames * _WINDOW, axis=1).astype(np.complex64)


def istft(spec: np.ndarray, out_len: int | None = None) -> np.ndarray:
    """(T, F) complex spectrogram -> (out_len,) float32 waveform."""
    spec = np.asarray(spec)
    if spec.ndim != 2 or spec.shape[1] != NUM_BINS:
        raise ValueError(f"expected (T, {NUM_BINS}) spectrogram, got {spec.shape}")
    t_total = spec.shape[0]
    if out_len is None:
        out_len = t_total * HOP

    frames = np.fft.irfft(spec, n=WINDOW_LEN, axis=1).astype(np.float32)
    frames *= _WINDOW

    padded_len = (t_total - 1) * HOP + WINDOW_LEN if t_total else WINDOW_LEN
    num = np.zeros(padded_len, np.float32)
    den = np.zeros(padded_len, np.float32)
    w_sq = (_WINDOW * _WINDOW).astype(np.float32)
    for t in range(t_total):
        num[t * HOP : t * HOP + WINDOW_LEN] += frames[t]
        den[t * HOP : t * HOP + WINDOW_LEN] += w_sq
    out = np.where(
        den > OLA_COVERAGE_FLOOR,
        num / np.maximum(den, OLA_COVERAGE_FLOOR),
        np.float32(0.0),
    ).astype(np.float32)

    out = out[WINDOW_LEN - HOP :]
    if out.shape[0] < out_len:
        out = np.concatenate([out, np.zeros(out_len - out.shape[0], np.float32)])
    return out[:out_len]
