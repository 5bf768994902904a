"""Recurrent and affine layer evaluation.

These are the only two layer kinds in the model graph. Parameters are
immutable and shareable across threads; recurrent state is single-owner.
State arrays carry an explicit batch axis: the sub-band model evaluates
64 frequencies against shared parameters in one batched call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DataError, ShapeError


def _as_f32(name, value, ndim):
    arr = np.asarray(value, dtype=np.float32)
    if arr.ndim != ndim:
        raise ShapeError(f"{name}: expected {ndim}-d array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise DataError(f"{name}: non-finite values")
    return np.ascontiguousarray(arr)


@dataclass(frozen=True)
class LstmLayerParams:
    """One unidirectional layer; gate blocks ordered [i, f, g, o]."""

    w_input: np.ndarray
    w_recurrent: np.ndarray
    bias_input: np.ndarray
    bias_recurrent: np.ndarray

    def __post_init__(self):
        wi = _as_f32("w_input", self.w_input, 2)
        wr = _as_f32("w_recurrent", self.w_recurrent, 2)
        bi = _as_f32("bias_input", self.bias_input, 1)
        br = _as_f32("bias_recurrent", self.bias_recurrent, 1)
        gates, hidden = wr.shape
        if gates != 4 * hidden:
            raise ShapeError(
                f"w_recurrent must be (4H, H), got {wr.shape}"
            )
        if wi.shape[0] != gates:
            raise ShapeError(
                f"w_input rows {wi.shape[0]} != 4*hidden {gates}"
            )
        if bi.shape != (gates,) or br.shape != (gates,):
            raise ShapeError("bias vectors must have length 4*hidden")
        object.__setattr__(self, "w_input", wi)
        object.__setattr__(self, "w_recurrent", wr)
        object.__setattr__(self, "bias_input", bi)
        object.__setattr__(self, "bias_recurrent", br)
        # kernels consume (I, 4H)/(H, 4H); transpose once, not per call
        object.__setattr__(self, "w_input_t", np.ascontiguousarray(wi.T))
        object.__setattr__(self, "w_recurrent_t", np.ascontiguousarray(wr.T))

    @property
    def input_dim(self) -> int:
        return self.w_input.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.w_recurrent.shape[1]

    def num_params(self) -> int:
        return (
            self.w_input.size
            + self.w_recurrent.size
            + self.bias_input.size
            + self.bias_recurrent.size
        )


@dataclass(frozen=True)
class AffineParams:
    """y = weight @ x + bias."""

    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = _as_f32("weight", self.weight, 2)
        b = _as_f32("bias", self.bias, 1)
        if b.shape[0] != w.shape[0]:
            raise ShapeError(f"bias length {b.shape[0]} != out_dim {w.shape[0]}")
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)

    @property
    def input_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def output_dim(self) -> int:
        return self.weight.shape[0]

    def num_params(self) -> int:
        return self.weight.size + self.bias.size


@dataclass
class RecurrentState:
    """(h, c) pair with shape (batch, hidden); owned by one evaluation."""

    h: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, params: LstmLayerParams, batch: int = 1) -> "RecurrentState":
        shape = (batch, params.hidden_dim)
        return cls(np.zeros(shape, np.float32), np.zeros(shape, np.float32))

    @property
    def batch(self) -> int:
        return self.h.shape[0]


def _check_state(params: LstmLayerParams, state: RecurrentState):
    expected = (state.h.shape[0], params.hidden_dim)
    if state.h.shape != expected or state.c.shape != expected:
        raise ShapeError(
            f"state shape {state.h.shape}/{state.c.shape} != {expected}"
        )
    if not (np.isfinite(state.h).all() and np.isfinite(state.c).all()):
        raise DataError("non-finite recurrent state")


def lstm_sequence(
    params: LstmLayerParams, state: RecurrentState, xs: np.ndarray
) -> tuple[np.ndarray, RecurrentState]:
    """Fold the layer over xs.

    xs is (T, input_dim) for a single stream or (T, B, input_dim)
    batched; the batch axis must match the state. Returns outputs of
    the same layout plus the carried state. Splitting xs at any cut
    point and threading the state is bit-identical to one call.
    """
    xs = np.asarray(xs, dtype=np.float32)
    single = xs.ndim == 2
    if single:
        xs = xs[:, None, :]
    if xs.ndim != 3 or xs.shape[2] != params.input_dim:
        raise ShapeError(
            f"expected (T, B, {params.input_dim}) inputs, got {xs.shape}"
        )
    if xs.shape[1] != state.batch:
        raise ShapeError(f"batch {xs.shape[1]} != state batch {state.batch}")
    _check_state(params, state)
    if xs.size and not np.isfinite(xs).all():
        raise DataError("non-finite layer input")

    ys, h, c = kernels.lstm_seq(
        params.w_input_t,
        params.w_recurrent_t,
        params.bias_input,
        params.bias_recurrent,
        np.ascontiguousarray(xs),
        state.h,
        state.c,
    )
    out_state = RecurrentState(h, c)
    return (ys[:, 0, :] if single else ys), out_state


def lstm_step(
    params: LstmLayerParams, state: RecurrentState, x: np.ndarray
) -> tuple[np.ndarray, RecurrentState]:
    """Advance one frame; x is (input_dim,) or (B, input_dim)."""
    x = np.asarray(x, dtype=np.float32)
    single = x.ndim == 1
    xs = x[None, None, :] if single else x[None, :, :]
    ys, out_state = lstm_sequence(params, state, xs)
    y = ys[0]
    return (y[0] if single else y), out_state


def affine(params: AffineParams, x: np.ndarray) -> np.ndarray:
    """Apply y = W x + b to a vector (in_dim,) or rows of (..., in_dim)."""
    x = np.asarray(x, dtype=np.float32)
    if x.shape[-1] != params.input_dim:
        raise ShapeError(
            f"expected trailing dim {params.input_dim}, got {x.shape}"
        )
    return x @ params.weight.T + params.bias
