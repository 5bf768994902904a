"""Reference-graph semantics: normalization, block schedule, causality,
and analytic gradients."""

import numpy as np
import pytest
import torch

from conftest import SMALL, build_model
from ffsn_trainer import TrainerConfig
from ffsn_trainer.config import INFINITY
from ffsn_trainer.graph import ReferenceModel, enhance_spectrogram


def test_normalize_matches_hand_computed_cumulative_means(small_model):
    mel = torch.tensor([[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]])
    out = small_model.normalize(mel)
    means = [1.5, 2.5, 3.5]  # cumulative over all values seen so far
    want = torch.tensor([[[v / m for v in row] for row, m in
                          zip([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], means)]])
    torch.testing.assert_close(out, want, atol=1e-6, rtol=0)


def test_reflected_neighbor_indices():
    model = build_model(TrainerConfig(
        num_bins=17, num_mel=5, neighbors=2, downsample=2, lookahead=2,
        l2m_hidden=(4, 4), sub_hidden=(4, 4), m2l_hidden=(4, 4)))
    assert model.reflect_idx.tolist() == [2, 1, 0, 1, 2, 3, 4, 3, 2]


class _StackStepper:
    """Drive a stack one frame at a time with explicit recurrent state."""

    def __init__(self, stack):
        self.stack = stack
        self.s0 = None
        self.s1 = None

    def step(self, x: torch.Tensor) -> torch.Tensor:
        h0, self.s0 = self.stack.lstm0(x.unsqueeze(1), self.s0)
        h1, self.s1 = self.stack.lstm1(h0, self.s1)
        return self.stack.out(h1).squeeze(1)


def _naive_masks(model: ReferenceModel, norm: torch.Tensor) -> torch.Tensor:
    """Per-frame loop with the inference-time block schedule: blocks end
    at steps with (t+1) % m == 0, the sub output is held in between and
    zero before the first complete block."""
    config = model.config
    m = config.downsample
    l2m = _StackStepper(model.l2m)
    m2l = _StackStepper(model.m2l)
    sub = _StackStepper(model.sub) if model.sub is not None else None
    held = norm.new_zeros(config.num_mel)
    buffered = []
    masks = []
    for t in range(norm.shape[0]):
        frame = norm[t]
        emb = l2m.step(frame.unsqueeze(0))[0]
        if sub is None:
            masks.append(m2l.step(emb.unsqueeze(0))[0])
            continue
        neighbors = frame[model.reflect_idx]
        windows = neighbors.unfold(0, 2 * config.neighbors + 1, 1)
        feats = torch.cat([windows, emb.unsqueeze(1)], dim=1)
        buffered.append(feats)
        if (t + 1) % m == 0:
            block = torch.stack(buffered).mean(dim=0)
            held = sub.step(block)[:, 0]
            buffered = []
        masks.append(m2l.step(torch.cat([emb, held]).unsqueeze(0))[0])
    return torch.stack(masks)


@pytest.mark.parametrize("m", [1, 2, 3, INFINITY])
def test_batched_masks_match_per_frame_loop(m):
    config = TrainerConfig(
        num_bins=17, num_mel=8, neighbors=2, downsample=m, lookahead=2,
        l2m_hidden=(12, 10), sub_hidden=(9, 8), m2l_hidden=(14, 11))
    model = build_model(config, seed=3)
    torch.manual_seed(11)
    norm = torch.rand(7, config.num_mel) * 2.0
    with torch.no_grad():
        batched = model.masks_from_norm(norm.unsqueeze(0))[0]
        looped = _naive_masks(model, norm)
    torch.testing.assert_close(batched, looped, atol=1e-6, rtol=0)


@pytest.mark.parametrize("m", [1, 2, 4, INFINITY])
def test_causality_later_frames_cannot_move_earlier_masks(m):
    config = TrainerConfig(
        num_bins=17, num_mel=8, neighbors=2, downsample=m, lookahead=2,
        l2m_hidden=(12, 10), sub_hidden=(9, 8), m2l_hidden=(14, 11))
    model = build_model(config, seed=5)
    torch.manual_seed(13)
    mag = torch.rand(1, 12, config.num_bins) + 0.05
    perturbed = mag.clone()
    cut = 7
    perturbed[0, cut:] += torch.rand(12 - cut, config.num_bins)
    with torch.no_grad():
        base = model(mag)
        moved = model(perturbed)
    torch.testing.assert_close(base[0, :cut], moved[0, :cut], atol=0.0, rtol=0.0)
    assert not torch.allclose(base[0, cut:], moved[0, cut:])


def test_short_sequences_produce_zero_held_blocks():
    model = build_model(SMALL, seed=9)
    torch.manual_seed(17)
    norm = torch.rand(1, SMALL.num_mel)  # one frame, m=2: no block ends
    with torch.no_grad():
        emb = model.l2m(norm.unsqueeze(0))
        neigh = norm.unsqueeze(0)[:, :, model.reflect_idx]
        windows = neigh.unfold(2, 2 * SMALL.neighbors + 1, 1)
        feats = torch.cat([windows, emb.unsqueeze(3)], dim=3)
        held = model._held_sub(feats)
    torch.testing.assert_close(held, torch.zeros_like(held))


def test_analytic_gradients_match_finite_differences():
    config = TrainerConfig(
        num_bins=9, num_mel=6, neighbors=1, downsample=2, lookahead=2,
        l2m_hidden=(7, 6), sub_hidden=(5, 5), m2l_hidden=(8, 7))
    model = build_model(config, seed=21).double()
    model.train()
    torch.manual_seed(23)
    mag = torch.rand(1, 9, config.num_bins, dtype=torch.float64) + 0.1
    target = torch.randn(1, 9, config.mask_dim, dtype=torch.float64) * 0.2
    tau = config.lookahead

    def loss_value():
        out = model(mag)
        return torch.mean((out[:, tau:] - target[:, tau:]) ** 2)

    loss = loss_value()
    loss.backward()
    params = [p for p in model.parameters() if p.grad is not None]

    picker = np.random.default_rng(29)
    eps = 1e-6
    checked = 0
    while checked < 20:
        param = params[int(picker.integers(len(params)))]
        flat = param.data.view(-1)
        idx = int(picker.integers(flat.numel()))
        analytic = float(param.grad.view(-1)[idx])
        original = float(flat[idx])
        with torch.no_grad():
            flat[idx] = original + eps
            plus = float(loss_value())
            flat[idx] = original - eps
            minus = float(loss_value())
            flat[idx] = original
        numeric = (plus - minus) / (2.0 * eps)
        scale = max(abs(analytic), abs(numeric), 1e-8)
        assert abs(analytic - numeric) / scale < 1e-3, (
            f"gradient mismatch at param index {idx}: "
            f"analytic {analytic:.3e} numeric {numeric:.3e}")
        checked += 1


def test_enhance_rejects_wrong_bin_count(small_model):
    with pytest.raises(ValueError):
        enhance_spectrogram(small_model, np.zeros((4, 99), np.complex64))


def test_enhance_preserves_shape_and_restores_training_flag(small_model):
    small_model.train()
    spec = (np.random.default_rng(31).standard_normal((6, SMALL.num_bins))
            * 0.1).astype(np.complex64)
    out = enhance_spectrogram(small_model, spec)
    assert out.shape == spec.shape and out.dtype == np.complex64
    assert small_model.training
