"""Synthetic noisy/clean pairs: harmonic tones in low-pass noise.

Each mixture is a random multi-partial harmonic tone with a slow
amplitude envelope, plus steeply low-pass-filtered noise (a cascade of
three one-pole stages) scaled to an SNR drawn uniformly from [-5, 20]
dB. The tone fundamentals sit well above the noise corner and the
cascade rolls the noise off at 18 dB per octave, so the time-frequency
fields of the two sources are mostly disjoint: the ideal mask is then
close to a deterministic function of the magnitudes, which keeps the
toy task learnable at desk scale instead of being dominated by
irreducible per-bin phase noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .dsp import HOP, SAMPLE_RATE


@dataclass(frozen=True)
class DatasetParams:
    """Mixture count, sequence length in frames, and the seed."""

    count: int = 200
    num_frames: int = 192
    seed: int = 0

    @property
    def num_samples(self) -> int:
        return self.num_frames * HOP


def make_mixture(
    rng: np.random.Generator, num_samples: int
) -> tuple[np.ndarray, np.ndarray]:
    """One (noisy, clean) float32 pair of the given length."""
    t = np.arange(num_samples, dtype=np.float64) / SAMPLE_RATE
    f0 = rng.uniform(160.0, 280.0)
    partials = int(rng.integers(4, 10))
    clean = np.zeros(num_samples, np.float64)
    for k in range(1, partials + 1):
        if k * f0 >= SAMPLE_RATE / 2:
            break
        amp = rng.uniform(0.5, 1.0) / k
        clean += amp * np.sin(2.0 * np.pi * k * f0 * t + rng.uniform(0, 2 * np.pi))
    envelope_rate = rng.uniform(0.8, 3.0)
    envelope = 0.3 + 0.7 * (
        0.5 + 0.5 * np.sin(2.0 * np.pi * envelope_rate * t + rng.uniform(0, 2 * np.pi))
    )
    clean *= envelope
    clean *= 0.08 / (np.sqrt(np.mean(clean**2)) + 1e-12)

    pole = rng.uniform(0.96, 0.985)
    noise = rng.standard_normal(num_samples)
    for _ in range(3):
        noise = lfilter([1.0 - pole], [1.0, -pole], noise)
    snr_db = rng.uniform(-5.0, 20.0)
    clean_power = np.mean(clean**2)
    noise_power = np.mean(noise**2) + 1e-12
    noise *= np.sqrt(clean_power / (noise_power * 10.0 ** (snr_db / 10.0)))

    noisy = clean + noise
    return noisy.astype(np.float32), clean.astype(np.float32)


def make_dataset(params: DatasetParams) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic list of (noisy, clean) pairs."""
    rng = np.random.default_rng(params.seed)
    return [make_mixture(rng, params.num_samples) for _ in range(params.count)]
