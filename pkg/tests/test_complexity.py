"""Analytic cost model tests.

Reference integers were derived by independent closed-form summation
(worked through by hand):
  fast preset      6,833,163
  m=inf preset     4,910,730
  fullsubnet       5,630,467
  fullband         8,138,242
and the published complexity column values they approximate:
  7.79 / 4.12 / 2.29 / 1.39 / 0.32 / 30.73 / 0.53 G MACs/s.
"""

from fractions import Fraction

import numpy as np
import pytest

from ffsn.complexity import (
    CostReport,
    LayerDescriptor,
    compare,
    count_macs,
    count_params,
)
from ffsn.errors import ConfigError
from ffsn.model import INFINITY, ModelConfig, ModelWeights


def test_exact_param_counts():
    assert count_params("fast_fullsubnet") == 6_833_163
    assert count_params("fast_fullsubnet_minf") == 4_910_730
    assert count_params("fullsubnet") == 5_630_467
    assert count_params("fullband") == 8_138_242


def test_params_round_to_published_two_decimals():
    assert round(count_params("fast_fullsubnet") / 1e6, 2) == 6.83
    assert round(count_params("fast_fullsubnet_minf") / 1e6, 2) == 4.91
    assert round(count_params("fullsubnet") / 1e6, 2) == 5.63


def test_params_independent_of_finite_m():
    base = count_params("fast_fullsubnet", m=1)
    for m in (2, 4, 8, 64):
        assert count_params("fast_fullsubnet", m=m) == base


def test_cross_module_param_identity():
    cfg = ModelConfig()
    w = ModelWeights.random(cfg, seed=0)
    assert w.num_params() == count_params("fast_fullsubnet")
    w_inf = ModelWeights.random(cfg.with_downsample(INFINITY), seed=0)
    assert w_inf.num_params() == count_params("fast_fullsubnet_minf")


@pytest.mark.parametrize(
    "preset,m,published",
    [
        ("fast_fullsubnet", 1, 7.79e9),
        ("fast_fullsubnet", 2, 4.12e9),
        ("fast_fullsubnet", 4, 2.29e9),
        ("fast_fullsubnet", 8, 1.39e9),
        ("fast_fullsubnet", INFINITY, 0.32e9),
        ("fullsubnet", None, 30.73e9),
        ("fullband", None, 0.53e9),
    ],
)
def test_macs_within_15_percent_of_published(preset, m, published):
    got = count_macs(preset, m).macs_per_second
    assert abs(got - published) / published <= 0.15


def test_macs_known_values():
    # spot values from the closed-form summation
    assert count_macs("fast_fullsubnet", 1).macs_per_frame == 119_840_715
    assert count_macs("fast_fullsubnet", 2).macs_per_frame == Fraction(
        5_046_219 + 114_794_496, 1
    ) - Fraction(114_794_496, 2)
    assert count_macs("fast_fullsubnet_minf").macs_per_frame == 4_915_147
    assert count_macs("fullsubnet").macs_per_frame == 472_776_192
    assert count_macs("fullband").macs_per_frame == 8_143_872
    assert count_macs("fast_fullsubnet", 1).macs_per_second == pytest.approx(
        7.4900447e9, rel=1e-6
    )


def test_headline_ratios():
    ref = count_macs("fullsubnet").macs_per_second
    r1 = count_macs("fast_fullsubnet", 1).macs_per_second / ref
    r2 = count_macs("fast_fullsubnet", 2).macs_per_second / ref
    assert 0.20 <= r1 <= 0.30
    assert 0.10 <= r2 <= 0.16


def test_macs_strictly_decreasing_in_m():
    values = [count_macs("fast_fullsubnet", m).macs_per_second for m in (1, 2, 4, 8, 16)]
    assert all(a > b for a, b in zip(values, values[1:]))
    inf = count_macs("fast_fullsubnet", INFINITY).macs_per_second
    assert inf < values[-1]


def test_totals_equal_sum_of_parts():
    for preset, m in [("fast_fullsubnet", 2), ("fullsubnet", None), ("fullband", None)]:
        report = count_macs(preset, m)
        assert report.params == sum(row[1] for row in report.breakdown)
        assert report.macs_per_second == pytest.approx(
            sum(row[2] for row in report.breakdown), rel=1e-12
        )


def test_fractional_m_macs_are_exact():
    # m=3 does not divide 64 bands; the per-frame count stays rational
    report = count_macs("fast_fullsubnet", 3)
    assert report.macs_per_frame == 5_046_219 + Fraction(114_794_496, 3)


def test_layer_descriptor_validation():
    with pytest.raises(ConfigError):
        LayerDescriptor("conv", 3, 4)
    with pytest.raises(ConfigError):
        LayerDescriptor("affine", 0, 4)
    with pytest.raises(ConfigError):
        count_macs("nonsense")
    with pytest.raises(ConfigError):
        count_macs("fullsubnet", m=2)
    with pytest.raises(ConfigError):
        count_macs("fast_fullsubnet", m=0)


def test_compare_table_contents():
    table = compare()
    lines = table.strip().splitlines()
    assert lines[0].startswith("model")
    assert len(lines) == 2 + 7  # header + rule + seven rows
    assert "fast_fullsubnet(m=1)" in table
    assert "fullsubnet" in table
    # deterministic
    assert compare() == table


def test_compare_csv_and_ratios():
    csv = compare(fmt="csv")
    rows = [line.split(",") for line in csv.strip().splitlines()]
    assert rows[0] == ["model", "params_m", "macs_gs", "ratio_vs_fullsubnet"]
    values = {row[0]: [float(v) for v in row[1:]] for row in rows[1:]}
    assert values["fast_fullsubnet(m=1)"][2] == pytest.approx(0.2535, abs=0.01)
    assert values["fast_fullsubnet(m=2)"][2] == pytest.approx(0.1321, abs=0.01)
    assert values["fullsubnet"][2] == pytest.approx(1.0, abs=1e-9)


def test_compare_empty_is_header_only():
    assert len(compare([]).strip().splitlines()) == 2
    assert len(compare([], fmt="csv").strip().splitlines()) == 1
