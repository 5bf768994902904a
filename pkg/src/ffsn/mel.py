"""Linear-frequency to mel-frequency magnitude projection.

Triangular peak-1 filters on the HTK mel scale, evaluated at exact bin
center frequencies. The matrix is built once and treated as data from
then on; it also travels inside the weight file so every consumer shares
the identical projection without re-deriving it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, ShapeError


def hz_to_mel(f):
    """HTK mel scale: 2595 * log10(1 + f/700)."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MelFilterbank:
    """Immutable (F_mel, F) non-negative projection matrix plus its band edges."""

    weights: np.ndarray
    f_min: float
    f_max: float
    sample_rate: int

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float32)
        if w.ndim != 2:
            raise ShapeError(f"filterbank must be 2-d, got shape {w.shape}")
        if not np.isfinite(w).all():
            raise DataError("filterbank contains non-finite entries")
        if w.min() < 0.0:
            raise DataError("filterbank entries must be non-negative")
        if not (w.sum(axis=1) > 0).all():
            raise DataError("every filterbank row needs a positive entry")
        object.__setattr__(self, "weights", np.ascontiguousarray(w))

    @property
    def num_mel(self) -> int:
        return self.weights.shape[0]

    @property
    def num_bins(self) -> int:
        return self.weights.shape[1]


def build_filterbank(
    num_bins: int = 257,
    num_mel: int = 64,
    sample_rate: int = 16000,
    f_min: float = 0.0,
    f_max: float = 8000.0,
) -> MelFilterbank:
    """Construct peak-1 triangular mel filters.

    Corner points are num_mel + 2 equally spaced values on the mel axis
    between f_min and f_max; filter k rises from corner k to corner k+1
    and falls to corner k+2, evaluated at bin centers
    f = j * (sample_rate/2) / (num_bins - 1).
    """
    if num_mel < 2:
        raise ConfigError("need at least 2 mel bands")
    if num_bins < 3:
        raise ConfigError("need at least 3 frequency bins")
    if not (0.0 <= f_min < f_max <= sample_rate / 2):
        raise ConfigError(
            f"invalid band [{f_min}, {f_max}] for sample rate {sample_rate}"
        )

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
    return MelFilterbank(
        weights.astype(np.float32), float(f_min), float(f_max), int(sample_rate)
    )


def apply_filterbank(fb: MelFilterbank, frames: np.ndarray) -> np.ndarray:
    """Project magnitude frames onto the mel bands.

    Accepts a single (F,) frame or a (T, F) batch; returns (F_mel,) or
    (T, F_mel) float32.
    """
    frames = np.asarray(frames, dtype=np.float32)
    single = frames.ndim == 1
    if single:
        frames = frames[None, :]
    if frames.ndim != 2 or frames.shape[1] != fb.num_bins:
        raise ShapeError(
            f"expected frames of width {fb.num_bins}, got {frames.shape}"
        )
    if frames.size and frames.min() < 0.0:
        raise DataError("magnitude frames must be non-negative")
    out = frames @ fb.weights.T
    return out[0] if single else out
