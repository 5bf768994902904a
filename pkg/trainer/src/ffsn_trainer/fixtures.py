"""Stage-by-stage parity fixtures for the inference engine.

emit_fixtures writes a small-model weight file plus a tensor bundle of
recorded inputs and expected outputs for every pipeline stage: a bare
recurrent layer (one step and a sequence), the full-band stack, the
sub-band stack under block factors 1 and 2, the output stack, a whole
offline spectrogram pass, and an end-to-end waveform pass. The engine's
test suite replays the bundle against its own implementations.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from .config import TrainerConfig
from .data import make_mixture
from .dsp import istft, stft
from .export import export_weights, save_bundle
from .graph import ReferenceModel, enhance_spectrogram

FIXTURE_CONFIG = TrainerConfig(
    num_bins=257,
    num_mel=24,
    neighbors=5,
    downsample=2,
    lookahead=2,
    l2m_hidden=(32, 28),
    sub_hidden=(24, 24),
    m2l_hidden=(40, 36),
)

FRAMES = 10
AUDIO_SAMPLES = 4096


def _lstm_reference(wi, wr, bi, br, xs, h0, c0):
    """Explicit cell math, gate order [input, forget, cell, output]."""
    h, c = h0, c0
    ys = []
    for x in xs:
        pre = wi @ x + wr @ h + bi + br
        gate_i, gate_f, gate_g, gate_o = pre.chunk(4)
        gate_i = torch.sigmoid(gate_i)
        gate_f = torch.sigmoid(gate_f)
        gate_g = torch.tanh(gate_g)
        gate_o = torch.sigmoid(gate_o)
        c = gate_f * c + gate_i * gate_g
        h = gate_o * torch.tanh(c)
        ys.append(h)
    return torch.stack(ys), h, c


def _run_stack(stack, xs: torch.Tensor) -> torch.Tensor:
    """(S, B, in) -> (S, B, out) with fresh zero states, batch on bands."""
    out = stack(xs.permute(1, 0, 2))
    return out.permute(1, 0, 2)


def emit_fixtures(out_dir, seed: int = 0) -> dict:
    """Write weights.ffsn and stages.fftb under out_dir; returns paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = FIXTURE_CONFIG
    torch.manual_seed(seed)
    model = ReferenceModel(config)
    model.eval()
    with torch.no_grad():
        # keep decompressed gains order-one: saturated random masks would
        # turn waveform parity into a comparison of huge amplified noise
        model.m2l.out.weight.mul_(0.05)
        model.m2l.out.bias.mul_(0.05)
    weights_path = out_dir / "weights.ffsn"
    export_weights(model, weights_path)

    rng = np.random.default_rng(seed)
    bundle: dict = {}
    tau = config.lookahead

    # bare recurrent layer, one step and a split-free sequence
    in_dim, hidden = 7, 9
    scale = 1.0 / np.sqrt(hidden)
    wi = torch.as_tensor(
        rng.uniform(-scale, scale, (4 * hidden, in_dim)).astype(np.float32)
    )
    wr = torch.as_tensor(
        rng.uniform(-scale, scale, (4 * hidden, hidden)).astype(np.float32)
    )
    bi = torch.as_tensor(rng.uniform(-scale, scale, 4 * hidden).astype(np.float32))
    br = torch.as_tensor(rng.uniform(-scale, scale, 4 * hidden).astype(np.float32))
    xs = torch.as_tensor(rng.standard_normal((FRAMES, in_dim)).astype(np.float32))
    zeros = torch.zeros(hidden)
    with torch.no_grad():
        ys, h, c = _lstm_reference(wi, wr, bi, br, xs, zeros, zeros)
    bundle["lstm.w_input"] = wi.numpy()
    bundle["lstm.w_recurrent"] = wr.numpy()
    bundle["lstm.bias_input"] = bi.numpy()
    bundle["lstm.bias_recurrent"] = br.numpy()
    bundle["lstm.step_x"] = xs[0].numpy()
    bundle["lstm.step_y"] = ys[0].numpy()
    bundle["lstm.seq_xs"] = xs.numpy()
    bundle["lstm.seq_ys"] = ys.numpy()
    bundle["lstm.seq_h"] = h.numpy().reshape(1, hidden)
    bundle["lstm.seq_c"] = c.numpy().reshape(1, hidden)

    with torch.no_grad():
        # full-band stack on normalized-mel-like positive inputs
        l2m_xs = torch.as_tensor(
            rng.uniform(0.0, 2.0, (FRAMES, config.num_mel)).astype(np.float32)
        )
        bundle["l2m.xs"] = l2m_xs.numpy()
        bundle["l2m.ys"] = model.l2m(l2m_xs.unsqueeze(0))[0].numpy()

        # realistic per-band features out of the front half of the graph
        mag = torch.as_tensor(
            np.abs(rng.standard_normal((1, FRAMES, config.num_bins)))
            .astype(np.float32)
        )
        norm = model.normalize(model.project_mel(mag))
        emb = model.l2m(norm)
        neigh = norm[:, :, model.reflect_idx]
        windows = neigh.unfold(2, 2 * config.neighbors + 1, 1)
        feats = torch.cat([windows, emb.unsqueeze(3)], dim=3)[0]

        bundle["sub_m1.xs"] = feats.numpy()
        bundle["sub_m1.ys"] = _run_stack(model.sub, feats)[:, :, 0].numpy()

        blocks = feats.reshape(FRAMES // 2, 2, config.num_mel, -1).mean(dim=1)
        sub_m2 = _run_stack(model.sub, blocks)[:, :, 0]
        bundle["sub_m2.xs"] = blocks.numpy()
        bundle["sub_m2.ys"] = sub_m2.numpy()

        # output stack fed with the embedding and the held sub outputs
        held = torch.repeat_interleave(sub_m2, 2, dim=0)
        held = torch.cat([torch.zeros(1, config.num_mel), held], dim=0)[:FRAMES]
        m2l_in = torch.cat([emb[0], held], dim=1)
        bundle["m2l.emb"] = emb[0].numpy()
        bundle["m2l.sub"] = held.numpy()
        bundle["m2l.ys"] = model.m2l(m2l_in.unsqueeze(0))[0].numpy()

    # a whole spectrogram pass, flush included
    spec = (
        rng.standard_normal((FRAMES + 2, config.num_bins))
        + 1j * rng.standard_normal((FRAMES + 2, config.num_bins))
    ).astype(np.complex64) * np.float32(0.1)
    enhanced = enhance_spectrogram(model, spec)
    bundle["offline.noisy_re"] = spec.real
    bundle["offline.noisy_im"] = spec.imag
    bundle["offline.enhanced_re"] = enhanced.real
    bundle["offline.enhanced_im"] = enhanced.imag

    # end to end: waveform in, enhanced waveform out
    noisy, _ = make_mixture(rng, AUDIO_SAMPLES)
    audio_spec = stft(noisy)
    audio_out = istft(enhance_spectrogram(model, audio_spec), out_len=AUDIO_SAMPLES)
    bundle["audio.noisy"] = noisy
    bundle["audio.enhanced"] = audio_out

    bundle["meta.downsample"] = np.array([config.downsample], np.float32)
    bundle["meta.lookahead"] = np.array([tau], np.float32)
    bundle["meta.frames"] = np.array([FRAMES], np.float32)

    stages_path = out_dir / "stages.fftb"
    save_bundle(stages_path, bundle)
    return {"weights": weights_path, "stages": stages_path, "config": config}
