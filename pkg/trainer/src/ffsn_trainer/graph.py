"""Differentiable reference graph of the mask-estimation model.

Mirrors the engine's per-frame data flow while batching over whole
sequences for training speed:

  magnitude -> mel projection -> cumulative-mean normalization
    -> full-band stack -> per-band embedding
    -> per-band features (2N+1 reflected mel neighbors + embedding)
    -> causal block average, sub-band stack once per m frames,
       output held for the following frames (zero before the first
       complete block)
    -> [embedding ; held sub output] -> output stack -> compressed
       interleaved mask, one per step

Blocks end at steps t with (t+1) % m == 0, identical to inference, so
a model trained here sees exactly the features the engine computes. The
mask emitted at step t belongs to input frame t - lookahead; callers
align (training masks the first lookahead steps out of the loss,
enhancement feeds lookahead trailing zero frames and drops the first
lookahead masks).
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from .cirm import decompress
from .config import TrainerConfig
from .melbank import build_filterbank

NORM_EPSILON = 1e-10


class _Stack(nn.Module):
    """Two unidirectional recurrent layers and an affine output layer."""

    def __init__(self, in_dim: int, hidden: tuple, out_dim: int):
        super().__init__()
        self.lstm0 = nn.LSTM(in_dim, hidden[0], batch_first=True)
        self.lstm1 = nn.LSTM(hidden[0], hidden[1], batch_first=True)
        self.out = nn.Linear(hidden[1], out_dim)

    def forward(self, xs: torch.Tensor) -> torch.Tensor:
        h0, _ = self.lstm0(xs)
        h1, _ = self.lstm1(h0)
        return self.out(h1)


class ReferenceModel(nn.Module):
    """Trainable graph over (batch, frames, bins) magnitude input."""

    def __init__(self, config: TrainerConfig, mel_weights: np.ndarray | None = None):
        super().__init__()
        self.config = config
        if mel_weights is None:
            mel_weights = build_filterbank(config.num_bins, config.num_mel)
        mel = torch.as_tensor(np.asarray(mel_weights, dtype=np.float32))
        if mel.shape != (config.num_mel, config.num_bins):
            raise ValueError(
                f"mel matrix {tuple(mel.shape)} != "
                f"{(config.num_mel, config.num_bins)}"
            )
        self.register_buffer("mel", mel)
        # reflected neighbor indices: band 0 sees [N, ..., 1, 0, 1, ..., N]
        idx = np.pad(
            np.arange(config.num_mel), (config.neighbors, config.neighbors),
            mode="reflect",
        )
        self.register_buffer("reflect_idx", torch.as_tensor(idx, dtype=torch.long))

        self.l2m = _Stack(config.num_mel, config.l2m_hidden, config.num_mel)
        self.sub = (
            _Stack(config.sub_input_dim, config.sub_hidden, 1)
            if config.sub_band_present
            else None
        )
        self.m2l = _Stack(config.m2l_input_dim, config.m2l_hidden, config.mask_dim)

    def project_mel(self, mag: torch.Tensor) -> torch.Tensor:
        """(B, T, F) magnitudes -> (B, T, F_mel) mel magnitudes."""
        return mag @ self.mel.T

    def normalize(self, mel: torch.Tensor) -> torch.Tensor:
        """Divide each frame by the cumulative mean of all values so far.

        The running sum is accumulated in float64 and the mean rounded
        to the working dtype before the division, matching the engine.
        """
        batch, t_total, num_mel = mel.shape
        sums = mel.double().sum(dim=2).cumsum(dim=1)
        counts = (
            torch.arange(1, t_total + 1, dtype=torch.float64, device=mel.device)
            * num_mel
        )
        mean = (sums / counts).to(mel.dtype)
        eps = torch.tensor(NORM_EPSILON, dtype=mel.dtype, device=mel.device)
        return mel / (mean + eps).unsqueeze(2)

    def _held_sub(self, feats: torch.Tensor) -> torch.Tensor:
        """(B, T, F_mel, D) per-frame features -> (B, T, F_mel) held sub
        outputs under the causal block schedule."""
        batch, t_total, num_mel, feat_dim = feats.shape
        m = int(self.config.downsample)
        complete = t_total // m
        if complete == 0:
            return feats.new_zeros(batch, t_total, num_mel)
        blocks = feats[:, : complete * m].reshape(
            batch, complete, m, num_mel, feat_dim
        )
        block_mean = blocks.mean(dim=2)
        sub_in = (
            block_mean.permute(0, 2, 1, 3).reshape(batch * num_mel, complete, feat_dim)
        )
        sub_out = self.sub(sub_in).reshape(batch, num_mel, complete)
        sub_out = sub_out.permute(0, 2, 1)
        # block s finishes at step s*m + m-1 and serves the next m steps
        held = torch.repeat_interleave(sub_out, m, dim=1)
        if m > 1:
            held = torch.cat(
                [held.new_zeros(batch, m - 1, num_mel), held], dim=1
            )
        return held[:, :t_total]

    def masks_from_norm(self, norm_mel: torch.Tensor) -> torch.Tensor:
        """(B, T, F_mel) normalized mel -> (B, T, 2F) compressed masks."""
        emb = self.l2m(norm_mel)
        if self.sub is None:
            return self.m2l(emb)
        neigh = norm_mel[:, :, self.reflect_idx]
        windows = neigh.unfold(2, 2 * self.config.neighbors + 1, 1)
        feats = torch.cat([windows, emb.unsqueeze(3)], dim=3)
        held = self._held_sub(feats)
        return self.m2l(torch.cat([emb, held], dim=2))

    def forward(self, mag: torch.Tensor) -> torch.Tensor:
        """(B, T, F) magnitudes -> (B, T, 2F) step-aligned masks."""
        return self.masks_from_norm(self.normalize(self.project_mel(mag)))


def enhance_spectrogram(
    model: ReferenceModel, noisy_spec: np.ndarray
) -> np.ndarray:
    """Enhance a (T, F) complex spectrogram with the reference graph.

    Runs the lookahead flush (zero normalized-mel frames appended after
    the real ones, exactly like the engine's stream flush), drops the
    first lookahead masks, decompresses, and multiplies into the noisy
    spectrogram.
    """
    config = model.config
    noisy_spec = np.asarray(noisy_spec)
    if noisy_spec.ndim != 2 or noisy_spec.shape[1] != config.num_bins:
        raise ValueError(
            f"expected (T, {config.num_bins}) spectrogram, got {noisy_spec.shape}"
        )
    tau = config.lookahead
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            mag = torch.as_tensor(
                np.abs(noisy_spec).astype(np.float32)
            ).unsqueeze(0)
            norm = model.normalize(model.project_mel(mag))
            if tau:
                norm = torch.cat(
                    [norm, norm.new_zeros(1, tau, config.num_mel)], dim=1
                )
            masks = model.masks_from_norm(norm)[0, tau:].numpy()
    finally:
        if was_training:
            model.train()
    gains = decompress(masks)
    complex_gain = (gains[:, 0::2] + 1j * gains[:, 1::2]).astype(np.complex64)
    return (complex_gain * noisy_spec).astype(np.complex64)
