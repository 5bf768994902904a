"""Analytic parameter and MACs accounting for the architecture presets.

Counting conventions (fixed so the numbers are reproducible):

* recurrent layer parameters: 4 * (d_in*d_h + d_h*d_h + d_h) - the four
  gate blocks of input weights, recurrent weights, and one bias set
  (the two stored bias vectors are degenerate and count once);
* affine parameters: d_in*d_out + d_out;
* recurrent MACs per step: 4 * (d_in*d_h + d_h*d_h + d_h) + 3*d_h
  (gate matmuls and biases, plus the elementwise cell/output updates);
* affine MACs per step: d_in*d_out; activations are free;
* the per-band stack multiplies by bands/m executions per frame
  (exactly 0 when m is infinite).

MACs per frame are kept as exact rationals; per-second values multiply
by the 62.5 frames/s rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError
from .model import INFINITY, ModelConfig

PRESET_NAMES = ("fast_fullsubnet", "fast_fullsubnet_minf", "fullsubnet", "fullband")

DEFAULT_FRAME_RATE = 62.5


@dataclass(frozen=True)
class LayerDescriptor:
    """One layer's dims and how often it runs per input frame."""

    kind: str  # "recurrent" or "affine"
    input_dim: int
    output_dim: int
    executions_per_frame: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind not in ("recurrent", "affine"):
            raise ConfigError(f"unknown layer kind {self.kind!r}")
        if self.input_dim < 1 or self.output_dim < 1:
            raise ConfigError("layer dims must be positive")
        if self.executions_per_frame < 0:
            raise ConfigError("executions_per_frame must be >= 0")

    def params(self, stored_bias: bool = False) -> int:
        # stored_bias counts the two per-gate bias vectors kept in the
        # weight file separately; the default folds them into one.
        i, h = self.input_dim, self.output_dim
        if self.kind == "recurrent":
            return 4 * (i * h + h * h + (2 * h if stored_bias else h))
        return i * h + h

    def macs_per_step(self) -> int:
        i, h = self.input_dim, self.output_dim
        if self.kind == "recurrent":
            return 4 * (i * h + h * h + h) + 3 * h
        return i * h

    def macs_per_frame(self) -> Fraction:
        return self.executions_per_frame * self.macs_per_step()


@dataclass(frozen=True)
class CostReport:
    """Total and per-stack accounting for one preset instance."""

    preset: str
    params: int
    macs_per_frame: Fraction
    macs_per_second: float
    breakdown: tuple  # ((stack, params, macs_per_second), ...)

    def __post_init__(self):
        assert self.params == sum(row[1] for row in self.breakdown)


def _per_band_fraction(bands: int, m) -> Fraction:
    if m == INFINITY:
        return Fraction(0)
    return Fraction(bands, m)


def _fast_stacks(m, config: ModelConfig | None = None):
    cfg = config or ModelConfig()
    fm = cfg.num_mel
    l2m0, l2m1 = cfg.l2m_hidden
    sub0, sub1 = cfg.sub_hidden
    m2l0, m2l1 = cfg.m2l_hidden
    m2l_in = 2 * fm if m != INFINITY else fm
    stacks = [
        (
            "l2m",
            [
                LayerDescriptor("recurrent", fm, l2m0),
                LayerDescriptor("recurrent", l2m0, l2m1),
                LayerDescriptor("affine", l2m1, fm),
            ],
        )
    ]
    if m != INFINITY:
        per = _per_band_fraction(fm, m)
        stacks.append(
            (
                "sub",
                [
                    LayerDescriptor("recurrent", cfg.sub_input_dim, sub0, per),
                    LayerDescriptor("recurrent", sub0, sub1, per),
                    LayerDescriptor("affine", sub1, 1, per),
                ],
            )
        )
    stacks.append(
        (
            "m2l",
            [
                LayerDescriptor("recurrent", m2l_in, m2l0),
                LayerDescriptor("recurrent", m2l0, m2l1),
                LayerDescriptor("affine", m2l1, 2 * cfg.num_bins),
            ],
        )
    )
    return stacks


def _fullsubnet_stacks():
    # the predecessor system: linear-frequency full-band stack plus a
    # per-linear-frequency sub-band stack, no mel projection
    per = Fraction(257)
    return [
        (
            "fullband",
            [
                LayerDescriptor("recurrent", 257, 512),
                LayerDescriptor("recurrent", 512, 512),
                LayerDescriptor("affine", 512, 257),
            ],
        ),
        (
            "sub",
            [
                LayerDescriptor("recurrent", 32, 384, per),
                LayerDescriptor("recurrent", 384, 384, per),
                LayerDescriptor("affine", 384, 2, per),
            ],
        ),
    ]


def _fullband_stacks():
    # plain four-layer 512-unit recurrent baseline with a mask head
    return [
        (
            "fullband",
            [
                LayerDescriptor("recurrent", 257, 512),
                LayerDescriptor("recurrent", 512, 512),
                LayerDescriptor("recurrent", 512, 512),
                LayerDescriptor("recurrent", 512, 512),
                LayerDescriptor("affine", 512, 514),
            ],
        )
    ]


def _resolve(preset: str, m):
    if preset == "fast_fullsubnet":
        m = 1 if m is None else m
        if m != INFINITY and (m != int(m) or m < 1):
            raise ConfigError("m must be a positive integer or INFINITY")
        label = "fast_fullsubnet(m=inf)" if m == INFINITY else f"fast_fullsubnet(m={int(m)})"
        return label, _fast_stacks(m)
    if m is not None:
        raise ConfigError(f"preset {preset!r} takes no m")
    if preset == "fast_fullsubnet_minf":
        return "fast_fullsubnet(m=inf)", _fast_stacks(INFINITY)
    if preset == "fullsubnet":
        return "fullsubnet", _fullsubnet_stacks()
    if preset == "fullband":
        return "fullband", _fullband_stacks()
    raise ConfigError(f"unknown preset {preset!r}; choose from {PRESET_NAMES}")


def count_params(preset: str, m=None, stored_bias: bool = False) -> int:
    """Exact learned-parameter count for a preset.

    With stored_bias=True the count matches the physical weight-file
    layout (two bias vectors per recurrent layer) instead of the unique
    logical parameters.
    """
    _, stacks = _resolve(preset, m)
    return sum(
        layer.params(stored_bias) for _, layers in stacks for layer in layers
    )


def count_macs(preset: str, m=None, frame_rate: float = DEFAULT_FRAME_RATE) -> CostReport:
    """Analytic multiply-accumulate cost for a preset at rate frame_rate."""
    label, stacks = _resolve(preset, m)
    breakdown = []
    total_frame = Fraction(0)
    for stack_name, layers in stacks:
        stack_params = sum(layer.params() for layer in layers)
        stack_frame = sum((layer.macs_per_frame() for layer in layers), Fraction(0))
        total_frame += stack_frame
        breakdown.append((stack_name, stack_params, float(stack_frame) * frame_rate))
    return CostReport(
        preset=label,
        params=sum(row[1] for row in breakdown),
        macs_per_frame=total_frame,
        macs_per_second=float(total_frame) * frame_rate,
        breakdown=tuple(breakdown),
    )


DEFAULT_COMPARISON = (
    ("fast_fullsubnet", 1),
    ("fast_fullsubnet", 2),
    ("fast_fullsubnet", 4),
    ("fast_fullsubnet", 8),
    ("fast_fullsubnet", INFINITY),
    ("fullsubnet", None),
    ("fullband", None),
)


def compare(items=DEFAULT_COMPARISON, fmt: str = "text") -> str:
    """Render a deterministic comparison table.

    items is a sequence of (preset, m) pairs; ratios are taken against
    the fullsubnet preset's MACs. fmt is "text" or "csv".
    """
    if fmt not in ("text", "csv"):
        raise ConfigError(f"unknown format {fmt!r}")
    reference = count_macs("fullsubnet").macs_per_second
    rows = []
    for preset, m in items:
        report = count_macs(preset, m)
        rows.append(
            (
                report.preset,
                report.params / 1e6,
                report.macs_per_second / 1e9,
                report.macs_per_second / reference,
            )
        )
    header = ("model", "params_m", "macs_gs", "ratio_vs_fullsubnet")
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [f"{name},{p:.6f},{g:.6f},{r:.6f}" for name, p, g, r in rows]
        return "\n".join(lines) + "\n"
    widths = (24, 10, 10, 8)
    titles = ("model", "param (M)", "MACs(G/s)", "ratio")
    lines = ["  ".join(t.ljust(w) for t, w in zip(titles, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for name, p, g, r in rows:
        lines.append(
            f"{name.ljust(widths[0])}  {p:>10.2f}  {g:>10.4f}  {r:>8.4f}"
        )
    return "\n".join(lines) + "\n"
