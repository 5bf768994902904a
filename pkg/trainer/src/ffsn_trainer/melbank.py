"""Peak-1 triangular mel filterbank, same construction as the engine.

The matrix is exported inside the weight file, so the engine applies
exactly these values; building it here only has to be self-consistent.
"""

from __future__ import annotations

import numpy as np


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def build_filterbank(
    num_bins: int,
    num_mel: int,
    sample_rate: int = 16000,
    f_min: float = 0.0,
    f_max: float = 8000.0,
) -> np.ndarray:
    """(F_mel, F) float32 matrix of peak-1 triangles on the mel axis."""
    corners_hz = mel_to_hz(
        np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), num_mel + 2)
    )
    bin_hz = np.arange(num_bins, dtype=np.float64) * (sample_rate / 2.0) / (num_bins - 1)

    weights = np.zeros((num_mel, num_bins), dtype=np.float64)
    for k in range(num_mel):
        left, center, right = corners_hz[k], corners_hz[k + 1], corners_hz[k + 2]
        rising = (bin_hz - left) / (center - left)
        falling = (right - bin_hz) / (right - center)
        weights[k] = np.clip(np.minimum(rising, falling), 0.0, None)
    return weights.astype(np.float32)
