"""Compressed complex-ratio-mask targets.

The mask M = S/X (clean over noisy, complex division, denominator
regularized by 1e-10) is compressed componentwise with K*tanh(C*v/2),
K = 10, C = 0.1, and laid out as the interleaved 2F vector
[Re(0), Im(0), Re(1), Im(1), ...]. The training target sequence is
delayed by the model's lookahead: the target at output step t is the
mask for input frame t - lookahead, with the first lookahead steps
zero-filled (they are excluded from the loss).
"""

from __future__ import annotations

import numpy as np

K = 10.0
C = 0.1
EPSILON = 1e-10


def compress(values: np.ndarray) -> np.ndarray:
    """Map unbounded mask values into (-K, K); odd, saturating."""
    v = np.asarray(values, dtype=np.float32)
    return (K * np.tanh(np.float32(C / 2.0) * v)).astype(np.float32)


def decompress(values: np.ndarray) -> np.ndarray:
    """Inverse of :func:`compress`, clamped near the +-K asymptotes."""
    o = np.clip(np.asarray(values, dtype=np.float32), -(K - 1e-4), K - 1e-4)
    return (-(1.0 / C) * np.log((K - o) / (K + o))).astype(np.float32)


def compute_cirm(
    clean_spec: np.ndarray, noisy_spec: np.ndarray, lookahead: int = 2
) -> np.ndarray:
    """Step-aligned compressed mask targets.

    clean_spec and noisy_spec are (T, F) complex. Returns (T, 2F)
    float32 where row t holds the interleaved compressed mask of frame
    t - lookahead; the first lookahead rows are zero.
    """
    clean_spec = np.asarray(clean_spec)
    noisy_spec = np.asarray(noisy_spec)
    if clean_spec.shape != noisy_spec.shape or clean_spec.ndim != 2:
        raise ValueError(
            f"spectrogram shape mismatch: {clean_spec.shape} vs {noisy_spec.shape}"
        )
    xr, xi = noisy_spec.real.astype(np.float64), noisy_spec.imag.astype(np.float64)
    sr, si = clean_spec.real.astype(np.float64), clean_spec.imag.astype(np.float64)
    denom = xr * xr + xi * xi + EPSILON
    m_real = (xr * sr + xi * si) / denom
    m_imag = (xr * si - xi * sr) / denom

    t_total, num_bins = clean_spec.shape
    target = np.empty((t_total, 2 * num_bins), np.float32)
    target[:, 0::2] = compress(m_real)
    target[:, 1::2] = compress(m_imag)
    if lookahead:
        shifted = np.zeros_like(target)
        shifted[lookahead:] = target[: t_total - lookahead]
        target = shifted
    return target
