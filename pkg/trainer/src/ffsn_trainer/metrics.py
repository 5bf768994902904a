"""Scale-invariant signal-to-distortion ratio."""

from __future__ import annotations

import numpy as np


def si_sdr(estimate: np.ndarray, reference: np.ndarray) -> float:
    """SI-SDR in dB between two equal-length 1-d signals."""
    e = np.asarray(estimate, dtype=np.float64).reshape(-1)
    r = np.asarray(reference, dtype=np.float64).reshape(-1)
    if e.shape != r.shape or e.size == 0:
        raise ValueError(f"signal shape mismatch: {e.shape} vs {r.shape}")
    e = e - e.mean()
    r = r - r.mean()
    ref_energy = np.dot(r, r)
    if ref_energy == 0.0:
        raise ValueError("reference has zero energy")
    target = (np.dot(e, r) / ref_energy) * r
    residual = e - target
    num = np.dot(target, target)
    den = np.dot(residual, residual)
    if den == 0.0:
        return float("inf")
    if num == 0.0:
        return float("-inf")
    return float(10.0 * np.log10(num / den))
