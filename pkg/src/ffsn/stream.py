"""Real-time stateful enhancement: arbitrary-sized chunks in, enhanced
samples out, with a fixed 1024-sample (64 ms) algorithmic latency.

The stream frames the input every hop samples against a rolling
window-length buffer (initially zeros, reproducing the offline left
padding), runs one graph step per frame, delays emission by the tau
look-ahead, and overlap-adds synthesis frames. Every arithmetic step
mirrors the offline pipeline bit-exactly: same per-frame call shapes,
same operand ordering in the overlap-add sums, same normalization
guard. Consequently chunking never changes the output, and
push+flush equals stft -> forward_offline -> istft sample for sample.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .dsp import OLA_COVERAGE_FLOOR, AnalysisConfig
from .errors import DataError, StateError
from .cirm import apply_mask
from .mel import apply_filterbank
from .model import (
    ModelConfig,
    ModelWeights,
    create_graph_state,
    flush_partial_block,
    graph_step,
)

_DEN_FLOOR = OLA_COVERAGE_FLOOR


class Stream:
    """Single-owner streaming session over immutable weights."""

    def __init__(
        self,
        weights: ModelWeights,
        config: ModelConfig,
        analysis: AnalysisConfig | None = None,
    ):
        self.weights = weights
        self.config = config
        self.analysis = analysis or AnalysisConfig()
        self.graph = create_graph_state(weights, config)

        win = self.analysis.window
        hop = self.analysis.hop
        w_sq = (win * win).astype(np.float32)
        # operand order matches offline overlap-add: previous frame's
        # second half is accumulated before the current frame's first half
        self._den_mid = w_sq[hop:] + w_sq[:hop]
        self._den_tail = w_sq[hop:].copy()

        self._window = win
        self._hop = hop
        self._buf = np.zeros(self.analysis.window_len, np.float32)
        self._residual = np.zeros(0, np.float32)
        self._tail = None  # pending second half of the last synthesis frame
        self._lookahead = deque()  # noisy spectra waiting for their mask
        self._samples_in = 0
        self._samples_out = 0
        self._enhanced_frames = 0
        self._finished = False

    # ------------------------------------------------------------- internals

    def _ola_emit(self, frame_td: np.ndarray) -> np.ndarray:
        """Overlap-add one synthesis frame; returns newly complete samples."""
        hop = self._hop
        if self._tail is None:  # first frame: its first half is left padding
            self._tail = frame_td[hop:].copy()
            return np.zeros(0, np.float32)
        num = self._tail + frame_td[:hop]
        out = np.where(
            self._den_mid > _DEN_FLOOR,
            num / np.maximum(self._den_mid, _DEN_FLOOR),
            np.float32(0.0),
        ).astype(np.float32)
        self._tail = frame_td[hop:].copy()
        return out

    def _step(self, norm_mel_or_none) -> np.ndarray:
        """One model step (real frame or zero flush frame) plus emission."""
        if norm_mel_or_none is None:
            normed = np.zeros(self.config.num_mel, np.float32)
        else:
            normed = norm_mel_or_none
        mask = graph_step(self.weights, self.config, self.graph, normed)
        if self.graph.steps > self.config.lookahead and self._lookahead:
            noisy = self._lookahead.popleft()
            enhanced = apply_mask(mask, noisy)
            frame_td = np.fft.irfft(enhanced, n=self.analysis.window_len)
            frame_td = frame_td.astype(np.float32) * self._window
            self._enhanced_frames += 1
            return self._ola_emit(frame_td)
        return np.zeros(0, np.float32)

    def _process_frame(self, hop_samples: np.ndarray) -> np.ndarray:
        self._buf = np.concatenate([self._buf[self._hop :], hop_samples])
        spec = np.fft.rfft(self._buf * self._window).astype(np.complex64)
        self._lookahead.append(spec)
        mel_frame = apply_filterbank(self.weights.mel, np.abs(spec))
        return self._step(self.graph.norm.normalize(mel_frame))

    # --------------------------------------------------------------- session

    def push(self, samples) -> np.ndarray:
        """Feed 16 kHz samples; returns every newly determined output sample."""
        if self._finished:
            raise StateError("stream already flushed")
        samples = np.asarray(samples, dtype=np.float32).reshape(-1)
        if samples.size and not np.isfinite(samples).all():
            raise DataError("non-finite input samples")
        self._samples_in += samples.shape[0]
        self._residual = np.concatenate([self._residual, samples])
        chunks = []
        while self._residual.shape[0] >= self._hop:
            chunks.append(self._process_frame(self._residual[: self._hop]))
            self._residual = self._residual[self._hop :]
        out = np.concatenate(chunks) if chunks else np.zeros(0, np.float32)
        self._samples_out += out.shape[0]
        return out

    def flush(self) -> np.ndarray:
        """Drain the look-ahead and synthesis tail; ends the session.

        Total session output length equals total input length.
        """
        if self._finished:
            raise StateError("stream already flushed")
        self._finished = True
        chunks = []
        if self._residual.shape[0]:
            pad = np.zeros(self._hop - self._residual.shape[0], np.float32)
            chunks.append(self._process_frame(np.concatenate([self._residual, pad])))
            self._residual = np.zeros(0, np.float32)
        for _ in range(self.config.lookahead):
            chunks.append(self._step(None))
        flush_partial_block(self.weights, self.config, self.graph)
        if self._tail is not None:
            tail_out = np.where(
                self._den_tail > _DEN_FLOOR,
                self._tail / np.maximum(self._den_tail, _DEN_FLOOR),
                np.float32(0.0),
            ).astype(np.float32)
            chunks.append(tail_out)
        out = np.concatenate(chunks) if chunks else np.zeros(0, np.float32)
        remaining = self._samples_in - self._samples_out
        out = out[: max(remaining, 0)]
        if out.shape[0] < remaining:  # zero-length input edge
            out = np.concatenate(
                [out, np.zeros(remaining - out.shape[0], np.float32)]
            )
        self._samples_out += out.shape[0]
        return out

    @property
    def latency_samples(self) -> int:
        """Fixed algorithmic delay: window + lookahead * hop samples."""
        return self.analysis.window_len + self.config.lookahead * self._hop


def enhance_stream(
    weights: ModelWeights,
    config: ModelConfig,
    samples: np.ndarray,
    chunk_size: int | None = None,
) -> np.ndarray:
    """Convenience wrapper: stream samples through in fixed-size chunks.

    chunk_size None processes everything in a single push.
    """
    stream = Stream(weights, config)
    samples = np.asarray(samples, dtype=np.float32).reshape(-1)
    if chunk_size is None:
        pieces = [stream.push(samples)]
    else:
        pieces = [
            stream.push(samples[start : start + chunk_size])
            for start in range(0, samples.shape[0], chunk_size)
        ]
    pieces.append(stream.flush())
    return np.concatenate(pieces)
