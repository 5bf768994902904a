"""SI-SDR oracle and invariance tests."""

import numpy as np
import pytest

from ffsn.errors import MetricError, ShapeError
from ffsn.metrics import si_sdr


def test_orthogonal_noise_at_minus_20db_energy():
    # residual orthogonal to the reference with 1% of its energy:
    # ratio 100 -> exactly 20 dB
    t = np.arange(8000) / 16000.0
    ref = np.sin(2 * np.pi * 440 * t)
    noise = np.cos(2 * np.pi * 440 * t)  # orthogonal over whole periods
    ref -= ref.mean()
    noise -= noise.mean()
    noise *= 0.1 * np.sqrt(np.dot(ref, ref) / np.dot(noise, noise))
    assert si_sdr(ref + noise, ref) == pytest.approx(20.0, abs=0.01)


def test_scale_invariance():
    rng = np.random.default_rng(0)
    ref = rng.standard_normal(1000)
    est = ref + 0.05 * rng.standard_normal(1000)
    base = si_sdr(est, ref)
    assert si_sdr(3.7 * est, ref) == pytest.approx(base, abs=1e-9)
    assert si_sdr(-0.2 * est, ref) == pytest.approx(base, abs=1e-9)


def test_perfect_reconstruction_is_infinite():
    ref = np.sin(np.linspace(0, 10, 500))
    assert si_sdr(ref.copy(), ref) == float("inf")
    assert si_sdr(2.0 * ref, ref) == float("inf")


def test_mean_offset_is_ignored():
    rng = np.random.default_rng(1)
    ref = rng.standard_normal(400)
    est = ref + 0.1 * rng.standard_normal(400)
    assert si_sdr(est + 5.0, ref - 3.0) == pytest.approx(si_sdr(est, ref), abs=1e-9)


def test_worse_estimate_scores_lower():
    rng = np.random.default_rng(2)
    ref = rng.standard_normal(2000)
    noise = rng.standard_normal(2000)
    assert si_sdr(ref + 0.01 * noise, ref) > si_sdr(ref + 0.5 * noise, ref)


def test_errors():
    ref = np.ones(10)
    with pytest.raises(MetricError):
        si_sdr(np.zeros(10), ref)  # constant reference: zero energy after centering
    with pytest.raises(ShapeError):
        si_sdr(np.zeros((2, 5)), np.zeros(10))
    with pytest.raises(ShapeError):
        si_sdr(np.zeros(5), np.zeros(10))
    with pytest.raises(MetricError):
        si_sdr(np.zeros(0), np.zeros(0))
    bad = np.ones(10)
    bad[3] = np.nan
    with pytest.raises(MetricError):
        si_sdr(bad, np.arange(10.0))
