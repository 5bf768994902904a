"""Time/frequency conversion: framing, windowing, forward and inverse STFT.

Conventions (fixed for the whole engine):

* periodic Hann analysis window, ``w[n] = 0.5 * (1 - cos(2*pi*n/len))``;
* the signal is left-padded with ``window_len - hop`` zeros so that frame
  ``t`` never looks past input sample ``t*hop + window_len - 1`` (causal,
  streaming-compatible indexing; the first frame sees only ``hop`` real
  samples);
* ``T = ceil(len / hop)`` frames, the final partial frame zero-padded;
* synthesis applies the same window again and normalises by the pointwise
  sum of squared overlapped windows; samples whose summed window power
  falls below ``OLA_COVERAGE_FLOOR`` are muted instead of divided, since
  dividing a modified spectrum there amplifies spectral leakage by the
  reciprocal of a near-zero window value (the last few samples of a clip
  are covered only by the decaying edge of the final window).

All arithmetic is 32-bit; FFT internals may accumulate wider but results
are rounded back to float32/complex64.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, ShapeError

ENGINE_SAMPLE_RATE = 16000

# Minimum summed squared-window power for OLA division. Below this the
# sample has almost no analysis coverage: round-trip still divides out
# exactly, but any spectral modification leaks energy that the division
# would blow up by 1/power (1e9x at the floor the window decays to), so
# such samples are muted.
OLA_COVERAGE_FLOOR = np.float32(1e-2)


def hann_periodic(length: int) -> np.ndarray:
    """Periodic (DFT-even) Hann window of the given length, float32."""
    n = np.arange(length, dtype=np.float64)
    w = 0.5 * (1.0 - np.cos(2.0 * np.pi * n / length))
    return w.astype(np.float32)


@dataclass(frozen=True)
class AudioClip:
    """Mono waveform with its sample rate; values nominally in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int = ENGINE_SAMPLE_RATE

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float32).reshape(-1)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class AnalysisConfig:
    """STFT framing parameters. Defaults: 512-sample window, 256-sample hop."""

    window_len: int = 512
    hop: int = 256
    window: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.window_len <= 0 or self.hop <= 0:
            raise ConfigError("window_len and hop must be positive")
        if self.window_len % self.hop != 0:
            raise ConfigError(
                f"hop ({self.hop}) must divide window_len ({self.window_len})"
            )
        if self.window is None:
            object.__setattr__(self, "window", hann_periodic(self.window_len))
        else:
            w = np.asarray(self.window, dtype=np.float32).reshape(-1)
            if w.shape[0] != self.window_len:
                raise ConfigError("window length does not match window_len")
            if w.min() < 0.0 or w.max() > 1.0:
                raise ConfigError("window values must lie in [0, 1]")
            object.__setattr__(self, "window", w)

    @property
    def num_bins(self) -> int:
        return self.window_len // 2 + 1

    @property
    def frame_rate(self) -> float:
        return ENGINE_SAMPLE_RATE / self.hop


def num_frames(num_samples: int, config: AnalysisConfig) -> int:
    """Frame count contract: ceil(len / hop)."""
    return -(-num_samples // config.hop)


def stft(clip: AudioClip, config: AnalysisConfig | None = None) -> np.ndarray:
    """Forward STFT of a 16 kHz clip.

    Returns a (T, F) complex64 array with T = ceil(len/hop) and
    F = window_len/2 + 1.  Frame ``t`` covers padded samples
    ``[t*hop, t*hop + window_len)`` where the padding prepends
    ``window_len - hop`` zeros.
    """
    config = config or AnalysisConfig()
    if clip.sample_rate != ENGINE_SAMPLE_RATE:
        raise ConfigError(
            f"engine requires {ENGINE_SAMPLE_RATE} Hz input, got {clip.sample_rate}"
        )
    x = clip.samples
    if x.shape[0] == 0:
        raise DataError("empty clip")
    if not np.isfinite(x).all():
        raise DataError("clip contains non-finite samples")

    win, hop = config.window_len, config.hop
    t_total = num_frames(x.shape[0], config)
    left = win - hop
    right = t_total * hop - x.shape[0]
    padded = np.concatenate(
        [np.zeros(left, np.float32), x, np.zeros(right, np.float32)]
    )
    strides = (padded.strides[0] * hop, padded.strides[0])
    frames = np.lib.stride_tricks.as_strided(
        padded, shape=(t_total, win), strides=strides
    )
    return np.fft.rfft(frames * config.window, axis=1).astype(np.complex64)


def istft(
    spec: np.ndarray, config: AnalysisConfig | None = None, out_len: int | None = None
) -> AudioClip:
    """Weighted overlap-add inverse of :func:`stft`.

    The synthesis window equals the analysis window; the overlap-added
    signal is divided by the pointwise sum of squared windows wherever
    that sum reaches OLA_COVERAGE_FLOOR (samples below it are muted),
    the left padding removed, and the result truncated or zero-padded to
    ``out_len`` (default ``T * hop``).
    """
    config = config or AnalysisConfig()
    spec = np.asarray(spec)
    win, hop = config.window_len, config.hop
    if spec.ndim != 2 or spec.shape[1] != config.num_bins:
        raise ShapeError(
            f"expected (T, {config.num_bins}) spectrogram, got {spec.shape}"
        )
    t_total = spec.shape[0]
    if out_len is None:
        out_len = t_total * hop

    frames = np.fft.irfft(spec, n=win, axis=1).astype(np.float32)
    frames *= config.window

    padded_len = (t_total - 1) * hop + win if t_total else win
    num = np.zeros(padded_len, np.float32)
    den = np.zeros(padded_len, np.float32)
    w_sq = (config.window * config.window).astype(np.float32)
    for t in range(t_total):
        num[t * hop : t * hop + win] += frames[t]
        den[t * hop : t * hop + win] += w_sq
    out = np.where(
        den > OLA_COVERAGE_FLOOR,
        num / np.maximum(den, OLA_COVERAGE_FLOOR),
        np.float32(0.0),
    ).astype(np.float32)

    out = out[win - hop :]
    if out.shape[0] < out_len:
        out = np.concatenate([out, np.zeros(out_len - out.shape[0], np.float32)])
    return AudioClip(out[:out_len])
