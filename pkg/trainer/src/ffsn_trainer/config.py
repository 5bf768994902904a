"""Architecture hyper-parameters mirrored from the inference engine."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

INFINITY = math.inf


@dataclass(frozen=True)
class TrainerConfig:
    """Shapes of the mask-estimation graph.

    downsample is a positive integer m (the sub-band stack runs once per
    m frames on the causal block average) or INFINITY (no sub-band
    stack). lookahead is the output delay in frames.
    """

    num_bins: int = 257
    num_mel: int = 64
    neighbors: int = 5
    downsample: float = 2
    lookahead: int = 2
    l2m_hidden: tuple = (384, 257)
    sub_hidden: tuple = (384, 384)
    m2l_hidden: tuple = (512, 512)

    def __post_init__(self):
        if self.num_bins < 3 or self.num_mel < 2:
            raise ValueError("num_bins >= 3 and num_mel >= 2 required")
        if not (0 < self.neighbors < self.num_mel):
            raise ValueError("neighbors must be in (0, num_mel)")
        if self.lookahead < 0:
            raise ValueError("lookahead must be >= 0")
        m = self.downsample
        if m != INFINITY:
            if m != int(m) or m < 1:
                raise ValueError("downsample must be a positive integer or INFINITY")
            object.__setattr__(self, "downsample", int(m))
        for name in ("l2m_hidden", "sub_hidden", "m2l_hidden"):
            pair = tuple(getattr(self, name))
            if len(pair) != 2 or min(pair) < 1:
                raise ValueError(f"{name} must be two positive sizes")
            object.__setattr__(self, name, pair)

    @property
    def sub_band_present(self) -> bool:
        return self.downsample != INFINITY

    @property
    def sub_input_dim(self) -> int:
        return 2 * self.neighbors + 2

    @property
    def m2l_input_dim(self) -> int:
        return 2 * self.num_mel if self.sub_band_present else self.num_mel

    @property
    def mask_dim(self) -> int:
        return 2 * self.num_bins

    def with_downsample(self, m) -> "TrainerConfig":
        return replace(self, downsample=m)
