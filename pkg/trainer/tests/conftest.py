"""Shared configs and deterministic model builders for the trainer tests."""

import numpy as np
import pytest
import torch

from ffsn_trainer import TrainerConfig
from ffsn_trainer.graph import ReferenceModel

# small enough for oracle loops and finite differences, large enough to
# exercise every shape rule (2N+1 < num_mel, distinct hidden sizes)
SMALL = TrainerConfig(
    num_bins=17,
    num_mel=8,
    neighbors=2,
    downsample=2,
    lookahead=2,
    l2m_hidden=(12, 10),
    sub_hidden=(9, 8),
    m2l_hidden=(14, 11),
)


def build_model(config: TrainerConfig, seed: int = 0) -> ReferenceModel:
    torch.manual_seed(seed)
    model = ReferenceModel(config)
    model.eval()
    return model


@pytest.fixture
def small_model() -> ReferenceModel:
    return build_model(SMALL)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
