"""Toy training loop: Adam on MSE over compressed mask targets."""

from __future__ import annotations

import numpy as np
import torch

from .cirm import compute_cirm
from .config import TrainerConfig
from .data import DatasetParams, make_dataset
from .dsp import stft
from .graph import ReferenceModel


class TrainingError(Exception):
    """Raised when the loss leaves the finite range."""


def prepare_tensors(
    dataset: list[tuple[np.ndarray, np.ndarray]], config: TrainerConfig
) -> tuple[torch.Tensor, torch.Tensor]:
    """Dataset -> (magnitudes (N, T, F), step-aligned targets (N, T, 2F))."""
    mags, targets = [], []
    for noisy, clean in dataset:
        noisy_spec = stft(noisy)
        clean_spec = stft(clean)
        mags.append(np.abs(noisy_spec).astype(np.float32))
        targets.append(compute_cirm(clean_spec, noisy_spec, config.lookahead))
    return (
        torch.as_tensor(np.stack(mags)),
        torch.as_tensor(np.stack(targets)),
    )


def train_toy(
    config: TrainerConfig,
    dataset_params: DatasetParams,
    epochs: int = 10,
    learning_rate: float = 1e-3,
    batch_size: int = 8,
    seed: int = 0,
    model: ReferenceModel | None = None,
) -> tuple[ReferenceModel, list[float]]:
    """Train a reference model on synthetic mixtures.

    Returns the model and the loss curve: the first entry is the loss
    of the untrained model over the whole dataset, followed by one mean
    training loss per epoch. The loss is the MSE between predicted and
    target compressed masks over every output step from lookahead
    onward (the first lookahead steps have no defined target).
    """
    torch.manual_seed(seed)
    if model is None:
        model = ReferenceModel(config)
    dataset = make_dataset(dataset_params)
    mags, targets = prepare_tensors(dataset, config)
    tau = config.lookahead
    if mags.shape[1] <= tau:
        raise TrainingError("sequences shorter than the lookahead")

    optimizer = torch.optim.Adam(model.parameters(), lr=learning_rate)
    shuffler = torch.Generator().manual_seed(seed)
    count = mags.shape[0]

    sq_sum, n_items = 0.0, 0
    with torch.no_grad():
        for start in range(0, count, batch_size):
            out = model(mags[start : start + batch_size])
            target = targets[start : start + batch_size]
            diff = (out[:, tau:] - target[:, tau:]) ** 2
            sq_sum += float(diff.sum())
            n_items += diff.numel()
    loss_curve = [sq_sum / n_items]
    model.train()
    for _ in range(epochs):
        order = torch.randperm(count, generator=shuffler)
        epoch_losses = []
        for start in range(0, count, batch_size):
            sel = order[start : start + batch_size]
            optimizer.zero_grad()
            out = model(mags[sel])
            loss = torch.mean((out[:, tau:] - targets[sel][:, tau:]) ** 2)
            if not torch.isfinite(loss):
                raise TrainingError(f"non-finite loss {loss.item()}")
            loss.backward()
            optimizer.step()
            epoch_losses.append(float(loss.detach()))
        loss_curve.append(float(np.mean(epoch_losses)))
    return model, loss_curve
