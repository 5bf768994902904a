"""Model graph: cascaded full-band / sub-band / mel-to-linear stacks.

Data flow per frame (t is the global step index):

  magnitude -> mel projection -> cumulative-mean normalization
    -> l2m stack -> spectral embedding (one unit per mel band)
    -> per-band feature assembly (2N+1 mel neighbors + embedding)
    -> causal block average over m steps -> shared sub-band stack
    -> [embedding ; held sub output] -> m2l stack -> compressed mask

The mask emitted at step t applies to input frame t - tau; the stream is
flushed with tau zero-input steps at the end and the first tau masks are
dropped. Down-sampling blocks end at steps t with (t+1) % m == 0; the
sub-band output computed at a block end serves steps t .. t+m-1, and the
sub contribution is zero before the first block completes. With m
infinite the sub-band stack is absent and the m2l input is the embedding
alone.

Offline and streaming evaluation share the single :func:`graph_step`
path, so both produce bit-identical masks. Keep per-frame call shapes
identical between any two paths that must agree: BLAS results are not
bit-stable across batch shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .cirm import apply_mask
from .errors import ConfigError, DataError, ShapeError, ValidationError
from .mel import MelFilterbank, apply_filterbank, build_filterbank
from .ops import (
    AffineParams,
    LstmLayerParams,
    RecurrentState,
    affine,
    lstm_sequence,
)

INFINITY = math.inf

NORM_EPSILON = np.float32(1e-10)


def _is_finite_factor(m) -> bool:
    return m != INFINITY


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyper-parameters; defaults follow the reference system."""

    num_bins: int = 257
    num_mel: int = 64
    neighbors: int = 5
    downsample: float = 2
    lookahead: int = 2
    l2m_hidden: tuple = (384, 257)
    sub_hidden: tuple = (384, 384)
    m2l_hidden: tuple = (512, 512)
    frame_rate: float = 62.5

    def __post_init__(self):
        if self.num_bins < 3 or self.num_mel < 2:
            raise ConfigError("num_bins >= 3 and num_mel >= 2 required")
        if not (0 < self.neighbors < self.num_mel):
            raise ConfigError("neighbors must be in (0, num_mel)")
        if self.lookahead < 0:
            raise ConfigError("lookahead must be >= 0")
        m = self.downsample
        if m != INFINITY:
            if m != int(m) or m < 1:
                raise ConfigError(
                    "downsample must be a positive integer or INFINITY"
                )
            object.__setattr__(self, "downsample", int(m))
        for name in ("l2m_hidden", "sub_hidden", "m2l_hidden"):
            pair = tuple(getattr(self, name))
            if len(pair) != 2 or min(pair) < 1:
                raise ConfigError(f"{name} must be two positive sizes")
            object.__setattr__(self, name, pair)
        if self.frame_rate <= 0:
            raise ConfigError("frame_rate must be positive")

    @property
    def sub_band_present(self) -> bool:
        return _is_finite_factor(self.downsample)

    @property
    def sub_input_dim(self) -> int:
        return 2 * self.neighbors + 2

    @property
    def m2l_input_dim(self) -> int:
        return 2 * self.num_mel if self.sub_band_present else self.num_mel

    @property
    def mask_dim(self) -> int:
        return 2 * self.num_bins

    def with_downsample(self, m) -> "ModelConfig":
        return replace(self, downsample=m)


@dataclass(frozen=True)
class StackWeights:
    """Two recurrent layers followed by one affine output layer."""

    lstm0: LstmLayerParams
    lstm1: LstmLayerParams
    out: AffineParams

    def __post_init__(self):
        if self.lstm1.input_dim != self.lstm0.hidden_dim:
            raise ShapeError("lstm1 input must equal lstm0 hidden size")
        if self.out.input_dim != self.lstm1.hidden_dim:
            raise ShapeError("affine input must equal lstm1 hidden size")

    def num_params(self, unique_bias: bool = False) -> int:
        total = 0
        for layer in (self.lstm0, self.lstm1):
            total += layer.num_params()
            if unique_bias:
                total -= layer.bias_recurrent.size
        return total + self.out.num_params()


def _random_lstm(rng, in_dim, hidden):
    k = 1.0 / math.sqrt(hidden)
    u = lambda *shape: rng.uniform(-k, k, size=shape).astype(np.float32)
    return LstmLayerParams(
        u(4 * hidden, in_dim), u(4 * hidden, hidden), u(4 * hidden), u(4 * hidden)
    )


def _random_stack(rng, in_dim, hidden, out_dim):
    h0, h1 = hidden
    k = 1.0 / math.sqrt(h1)
    return StackWeights(
        _random_lstm(rng, in_dim, h0),
        _random_lstm(rng, h0, h1),
        AffineParams(
            rng.uniform(-k, k, size=(out_dim, h1)).astype(np.float32),
            rng.uniform(-k, k, size=out_dim).astype(np.float32),
        ),
    )


def _zero_lstm(in_dim, hidden):
    return LstmLayerParams(
        np.zeros((4 * hidden, in_dim), np.float32),
        np.zeros((4 * hidden, hidden), np.float32),
        np.zeros(4 * hidden, np.float32),
        np.zeros(4 * hidden, np.float32),
    )


def _zero_stack(in_dim, hidden, out_dim):
    h0, h1 = hidden
    return StackWeights(
        _zero_lstm(in_dim, h0),
        _zero_lstm(h0, h1),
        AffineParams(np.zeros((out_dim, h1), np.float32), np.zeros(out_dim, np.float32)),
    )


@dataclass(frozen=True)
class ModelWeights:
    """All learned tensors plus the (fixed) mel projection matrix."""

    l2m: StackWeights
    sub: Optional[StackWeights]
    m2l: StackWeights
    mel: MelFilterbank

    def validate(self, config: ModelConfig) -> None:
        """Raise ValidationError when shapes disagree with the config."""
        checks = [
            ("l2m.lstm0.input", self.l2m.lstm0.input_dim, config.num_mel),
            ("l2m.lstm0.hidden", self.l2m.lstm0.hidden_dim, config.l2m_hidden[0]),
            ("l2m.lstm1.hidden", self.l2m.lstm1.hidden_dim, config.l2m_hidden[1]),
            ("l2m.affine.out", self.l2m.out.output_dim, config.num_mel),
            ("m2l.lstm0.input", self.m2l.lstm0.input_dim, config.m2l_input_dim),
            ("m2l.lstm0.hidden", self.m2l.lstm0.hidden_dim, config.m2l_hidden[0]),
            ("m2l.lstm1.hidden", self.m2l.lstm1.hidden_dim, config.m2l_hidden[1]),
            ("m2l.affine.out", self.m2l.out.output_dim, config.mask_dim),
        ]
        if config.sub_band_present:
            if self.sub is None:
                raise ValidationError("config requires a sub-band stack")
            checks += [
                ("sub.lstm0.input", self.sub.lstm0.input_dim, config.sub_input_dim),
                ("sub.lstm0.hidden", self.sub.lstm0.hidden_dim, config.sub_hidden[0]),
                ("sub.lstm1.hidden", self.sub.lstm1.hidden_dim, config.sub_hidden[1]),
                ("sub.affine.out", self.sub.out.output_dim, 1),
            ]
        elif self.sub is not None:
            raise ValidationError("config has no sub-band stack but weights do")
        for name, got, want in checks:
            if got != want:
                raise ValidationError(f"{name}: expected {want}, got {got}")
        if self.mel.weights.shape != (config.num_mel, config.num_bins):
            raise ValidationError(
                f"mel.filterbank: expected {(config.num_mel, config.num_bins)},"
                f" got {self.mel.weights.shape}"
            )

    def num_params(self) -> int:
        """Unique learned parameters (each layer's two bias vectors share
        one set of degrees of freedom and are counted once)."""
        total = self.l2m.num_params(unique_bias=True)
        total += self.m2l.num_params(unique_bias=True)
        if self.sub is not None:
            total += self.sub.num_params(unique_bias=True)
        return total

    @classmethod
    def random(cls, config: ModelConfig, seed: int = 0) -> "ModelWeights":
        rng = np.random.default_rng(seed)
        l2m = _random_stack(rng, config.num_mel, config.l2m_hidden, config.num_mel)
        sub = (
            _random_stack(rng, config.sub_input_dim, config.sub_hidden, 1)
            if config.sub_band_present
            else None
        )
        m2l = _random_stack(rng, config.m2l_input_dim, config.m2l_hidden, config.mask_dim)
        mel = build_filterbank(config.num_bins, config.num_mel)
        return cls(l2m, sub, m2l, mel)

    @classmethod
    def zeros(cls, config: ModelConfig) -> "ModelWeights":
        l2m = _zero_stack(config.num_mel, config.l2m_hidden, config.num_mel)
        sub = (
            _zero_stack(config.sub_input_dim, config.sub_hidden, 1)
            if config.sub_band_present
            else None
        )
        m2l = _zero_stack(config.m2l_input_dim, config.m2l_hidden, config.mask_dim)
        mel = build_filterbank(config.num_bins, config.num_mel)
        return cls(l2m, sub, m2l, mel)


@dataclass
class StackState:
    lstm0: RecurrentState
    lstm1: RecurrentState

    @classmethod
    def zeros(cls, stack: StackWeights, batch: int = 1) -> "StackState":
        return cls(
            RecurrentState.zeros(stack.lstm0, batch),
            RecurrentState.zeros(stack.lstm1, batch),
        )


def run_stack(
    stack: StackWeights, state: StackState, xs: np.ndarray
) -> tuple[np.ndarray, StackState]:
    """Fold both recurrent layers then the affine over xs (T, B, in)."""
    h0, s0 = lstm_sequence(stack.lstm0, state.lstm0, xs)
    h1, s1 = lstm_sequence(stack.lstm1, state.lstm1, h0)
    return affine(stack.out, h1), StackState(s0, s1)


@dataclass
class NormState:
    """Cumulative mean over every mel value seen so far.

    The accumulator is float64 so long streams do not drift; the mean is
    rounded to float32 before the division so offline and streaming
    paths perform the identical float32 arithmetic.
    """

    running_sum: float = 0.0
    running_count: int = 0

    def normalize(self, mel_frame: np.ndarray) -> np.ndarray:
        self.running_sum += float(np.sum(mel_frame, dtype=np.float64))
        self.running_count += int(mel_frame.shape[-1])
        mean = np.float32(self.running_sum / self.running_count)
        return mel_frame / (mean + NORM_EPSILON)


def l2m_forward(
    weights: ModelWeights, norm_mel: np.ndarray, state: StackState | None = None
) -> tuple[np.ndarray, StackState]:
    """Full-band stack: normalized mel frame(s) -> spectral embedding(s).

    Accepts one (F_mel,) frame or a (T, F_mel) sequence.
    """
    norm_mel = np.asarray(norm_mel, dtype=np.float32)
    if state is None:
        state = StackState.zeros(weights.l2m)
    single = norm_mel.ndim == 1
    xs = norm_mel[None, None, :] if single else norm_mel[:, None, :]
    ys, state = run_stack(weights.l2m, state, xs)
    out = ys[:, 0, :]
    return (out[0] if single else out), state


def assemble_subband_inputs(
    mel_frame: np.ndarray, embedding: np.ndarray, neighbors: int
) -> np.ndarray:
    """Per-band feature vectors: 2N+1 reflected mel neighbors + embedding.

    mel_frame and embedding are (F_mel,) or (T, F_mel); the result is
    (F_mel, 2N+2) or (T, F_mel, 2N+2). Edges reflect without repeating
    the edge band: band 0 sees [mel[N], ..., mel[1], mel[0], mel[1], ...].
    """
    mel_frame = np.asarray(mel_frame, dtype=np.float32)
    embedding = np.asarray(embedding, dtype=np.float32)
    if mel_frame.shape != embedding.shape:
        raise ShapeError(
            f"mel/embedding shape mismatch: {mel_frame.shape} vs {embedding.shape}"
        )
    num_mel = mel_frame.shape[-1]
    if neighbors >= num_mel:
        raise ConfigError(f"neighbors {neighbors} must be < num_mel {num_mel}")
    single = mel_frame.ndim == 1
    frames = mel_frame[None, :] if single else mel_frame
    emb = embedding[None, :] if single else embedding

    padded = np.pad(frames, [(0, 0), (neighbors, neighbors)], mode="reflect")
    windows = np.lib.stride_tricks.sliding_window_view(
        padded, 2 * neighbors + 1, axis=1
    )
    out = np.concatenate([windows, emb[:, :, None]], axis=2).astype(np.float32)
    return out[0] if single else out


def downsample_block(frames: np.ndarray) -> np.ndarray:
    """Elementwise mean of a block of per-band feature sets.

    frames is (k, F_mel, 2N+2) with 1 <= k <= m; the final partial block
    of a sequence may carry fewer than m frames.
    """
    frames = np.asarray(frames, dtype=np.float32)
    if frames.ndim != 3 or frames.shape[0] == 0:
        raise ValidationError("downsample block must contain >= 1 feature set")
    if frames.shape[0] == 1:
        return frames[0].copy()
    return frames.mean(axis=0, dtype=np.float32)


def sub_forward(
    weights: ModelWeights, features: np.ndarray, states: StackState | None = None
) -> tuple[np.ndarray, StackState]:
    """Shared sub-band stack over all bands at once.

    features is (F_mel, 2N+2) for one down-sampled step or
    (S, F_mel, 2N+2) for a sequence of steps; every band runs the same
    parameters against its own recurrent state. Returns per-band scalars
    (F_mel,) or (S, F_mel).
    """
    if weights.sub is None:
        raise ValidationError("weights carry no sub-band stack")
    features = np.asarray(features, dtype=np.float32)
    single = features.ndim == 2
    xs = features[None, :, :] if single else features
    if xs.ndim != 3:
        raise ShapeError(f"expected (S, F_mel, 2N+2) features, got {features.shape}")
    if states is None:
        states = StackState.zeros(weights.sub, batch=xs.shape[1])
    if states.lstm0.batch != xs.shape[1]:
        raise ValidationError(
            f"state count {states.lstm0.batch} != band count {xs.shape[1]}"
        )
    ys, states = run_stack(weights.sub, states, xs)
    out = ys[:, :, 0]
    return (out[0] if single else out), states


def m2l_forward(
    weights: ModelWeights,
    embedding: np.ndarray,
    sub_out: np.ndarray | None = None,
    state: StackState | None = None,
) -> tuple[np.ndarray, StackState]:
    """Mel-to-linear stack: [embedding ; sub output] -> compressed mask.

    sub_out must be None exactly when the weights carry no sub-band
    stack. Accepts (F_mel,) frames or (T, F_mel) sequences; returns the
    (2F,) mask frame or the (T, 2F) sequence.
    """
    embedding = np.asarray(embedding, dtype=np.float32)
    if (sub_out is None) != (weights.sub is None):
        raise ValidationError(
            "sub_out must be provided iff the weights have a sub-band stack"
        )
    if sub_out is not None:
        sub_out = np.asarray(sub_out, dtype=np.float32)
        if sub_out.shape != embedding.shape:
            raise ShapeError(
                f"embedding/sub shape mismatch: {embedding.shape} vs {sub_out.shape}"
            )
        x = np.concatenate([embedding, sub_out], axis=-1)
    else:
        x = embedding
    if state is None:
        state = StackState.zeros(weights.m2l)
    single = x.ndim == 1
    xs = x[None, None, :] if single else x[:, None, :]
    ys, state = run_stack(weights.m2l, state, xs)
    out = ys[:, 0, :]
    return (out[0] if single else out), state


@dataclass
class GraphState:
    """Everything one evaluation stream owns: recurrent states, the
    normalization accumulator, the down-sampling block buffer, the held
    sub-band output, and the global step counter."""

    l2m: StackState
    sub: Optional[StackState]
    m2l: StackState
    norm: NormState = field(default_factory=NormState)
    block: list = field(default_factory=list)
    held_sub: Optional[np.ndarray] = None
    steps: int = 0


def create_graph_state(weights: ModelWeights, config: ModelConfig) -> GraphState:
    weights.validate(config)
    sub_state = (
        StackState.zeros(weights.sub, batch=config.num_mel)
        if config.sub_band_present
        else None
    )
    held = (
        np.zeros(config.num_mel, np.float32) if config.sub_band_present else None
    )
    return GraphState(
        l2m=StackState.zeros(weights.l2m),
        sub=sub_state,
        m2l=StackState.zeros(weights.m2l),
        held_sub=held,
    )


def graph_step(
    weights: ModelWeights,
    config: ModelConfig,
    gs: GraphState,
    norm_mel_frame: np.ndarray,
) -> np.ndarray:
    """Advance the graph one step; returns the (2F,) compressed mask.

    The caller handles the tau alignment: this mask belongs to input
    frame (step - tau).
    """
    embedding, gs.l2m = l2m_forward(weights, norm_mel_frame, gs.l2m)
    if config.sub_band_present:
        feats = assemble_subband_inputs(norm_mel_frame, embedding, config.neighbors)
        gs.block.append(feats)
        if (gs.steps + 1) % config.downsample == 0:
            block = downsample_block(np.stack(gs.block))
            gs.held_sub, gs.sub = sub_forward(weights, block, gs.sub)
            gs.block.clear()
        mask, gs.m2l = m2l_forward(weights, embedding, gs.held_sub, gs.m2l)
    else:
        mask, gs.m2l = m2l_forward(weights, embedding, None, gs.m2l)
    gs.steps += 1
    return mask


def flush_partial_block(
    weights: ModelWeights, config: ModelConfig, gs: GraphState
) -> None:
    """Evaluate a trailing incomplete down-sample block, if any.

    Keeps the final block average well defined at sequence end; the
    output is never consumed by any later step.
    """
    if config.sub_band_present and gs.block:
        gs.held_sub, gs.sub = sub_forward(
            weights, downsample_block(np.stack(gs.block)), gs.sub
        )
        gs.block.clear()


def flush_graph(
    weights: ModelWeights, config: ModelConfig, gs: GraphState
) -> np.ndarray:
    """Run the tau zero-input flush steps; returns (tau, 2F) masks."""
    zero = np.zeros(config.num_mel, np.float32)
    masks = [graph_step(weights, config, gs, zero) for _ in range(config.lookahead)]
    flush_partial_block(weights, config, gs)
    return (
        np.stack(masks)
        if masks
        else np.zeros((0, config.mask_dim), np.float32)
    )


def forward_offline(
    weights: ModelWeights, config: ModelConfig, noisy: np.ndarray
) -> np.ndarray:
    """Enhance a whole (T, F) complex spectrogram.

    Runs the identical per-frame step path as the streaming engine, so
    the two agree bit-exactly; only the surrounding transforms are
    batched (FFT rows are bit-stable, matrix products are not).
    """
    noisy = np.asarray(noisy)
    if noisy.ndim != 2 or noisy.shape[1] != config.num_bins:
        raise ShapeError(
            f"expected (T, {config.num_bins}) spectrogram, got {noisy.shape}"
        )
    if not np.isfinite(noisy).all():
        raise DataError("non-finite spectrogram")
    gs = create_graph_state(weights, config)
    t_total = noisy.shape[0]
    masks = []
    for t in range(t_total):
        mel_frame = apply_filterbank(weights.mel, np.abs(noisy[t]))
        masks.append(graph_step(weights, config, gs, gs.norm.normalize(mel_frame)))
    flush = flush_graph(weights, config, gs)
    all_masks = masks + list(flush)
    aligned = np.stack(all_masks[config.lookahead :]) if t_total else np.zeros(
        (0, config.mask_dim), np.float32
    )
    return apply_mask(aligned, noisy)
