"""Scale-invariant signal quality metric for enhancement evaluation."""

import numpy as np

from ffsn.errors import MetricError, ShapeError

__all__ = ["si_sdr"]


def si_sdr(estimate: np.ndarray, reference: np.ndarray) -> float:
    """Scale-invariant signal-to-distortion ratio in dB.

    Both signals are mean-removed, the estimate is decomposed into its
    projection onto the reference plus a residual, and the energy ratio
    of the two parts is reported in dB.  The result is invariant to
    rescaling of the estimate.

    Args:
        estimate: 1-d signal under test.
        reference: 1-d ground-truth signal of the same length.

    Returns:
        SI-SDR in dB as a float; ``inf`` when the residual is exactly zero.

    Raises:
        ShapeError: on non-1-d or mismatched inputs.
        MetricError: when the reference has zero energy after mean removal.
    """
    est = np.asarray(estimate, dtype=np.float64)
    ref = np.asarray(reference, dtype=np.float64)
    if est.ndim != 1 or ref.ndim != 1:
        raise ShapeError("si_sdr expects 1-d signals")
    if est.shape != ref.shape:
        raise ShapeError(f"length mismatch: {est.shape[0]} vs {ref.shape[0]}")
    if est.size == 0:
        raise MetricError("si_sdr is undefined for empty signals")
    if not (np.isfinite(est).all() and np.isfinite(ref).all()):
        raise MetricError("si_sdr requires finite signals")

    est = est - est.mean()
    ref = ref - ref.mean()
    ref_energy = float(np.dot(ref, ref))
    if ref_energy == 0.0:
        raise MetricError("reference has zero energy")

    scale = float(np.dot(est, ref)) / ref_energy
    target = scale * ref
    residual = est - target
    target_energy = float(np.dot(target, target))
    residual_energy = float(np.dot(residual, residual))
    if residual_energy == 0.0:
        return float("inf")
    if target_energy == 0.0:
        return float("-inf")
    return float(10.0 * np.log10(target_energy / residual_energy))
