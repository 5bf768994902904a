"""Compressed complex ratio mask codec and mask application.

The mask M = S/X (clean over noisy, complex division) is predicted in a
compressed domain: o = K * (1 - exp(-C v)) / (1 + exp(-C v)), equivalently
K * tanh(C v / 2), with K = 10 and C = 0.1. Decompression inverts the
closed form after clamping |o| to K - 1e-4 to keep the log finite.

Frame layout: a mask frame is the 2F-vector
[Re(0), Im(0), Re(1), Im(1), ..., Re(F-1), Im(F-1)] in compressed domain.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError

K = 10.0
C = 0.1
CLAMP = K - 1e-4


def compress(values: np.ndarray) -> np.ndarray:
    """Map unbounded mask values into (-K, K); odd, saturating."""
    v = np.asarray(values, dtype=np.float32)
    return (K * np.tanh(np.float32(C / 2.0) * v)).astype(np.float32)


def decompress(values: np.ndarray) -> np.ndarray:
    """Inverse of :func:`compress` with clamping near the +-K asymptotes."""
    o = np.clip(np.asarray(values, dtype=np.float32), -CLAMP, CLAMP)
    return (-(1.0 / C) * np.log((K - o) / (K + o))).astype(np.float32)


def mask_frame_to_complex(mask_frame: np.ndarray, num_bins: int) -> np.ndarray:
    """Decompress an interleaved 2F mask frame into F complex gains."""
    mask_frame = np.asarray(mask_frame, dtype=np.float32)
    if mask_frame.shape[-1] != 2 * num_bins:
        raise ShapeError(
            f"mask frame width {mask_frame.shape[-1]} != 2*{num_bins}"
        )
    v = decompress(mask_frame)
    real = v[..., 0::2]
    imag = v[..., 1::2]
    return (real + 1j * imag).astype(np.complex64)


def apply_mask(mask_frame: np.ndarray, noisy_frame: np.ndarray) -> np.ndarray:
    """Enhanced(f) = decompress(mask)(f) * noisy(f), complex multiplication.

    mask_frame: (..., 2F) compressed interleaved; noisy_frame: (..., F)
    complex. Returns (..., F) complex64.
    """
    noisy_frame = np.asarray(noisy_frame)
    gain = mask_frame_to_complex(mask_frame, noisy_frame.shape[-1])
    if gain.shape != noisy_frame.shape:
        raise ShapeError(
            f"mask/noisy shape mismatch: {gain.shape} vs {noisy_frame.shape}"
        )
    return (gain * noisy_frame).astype(np.complex64)


def complex_to_mask_frame(mask: np.ndarray) -> np.ndarray:
    """Compress F complex mask values into the interleaved 2F layout."""
    mask = np.asarray(mask)
    out = np.empty(mask.shape[:-1] + (2 * mask.shape[-1],), np.float32)
    out[..., 0::2] = compress(mask.real)
    out[..., 1::2] = compress(mask.imag)
    return out
