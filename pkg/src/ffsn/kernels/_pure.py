"""Reference recurrent kernel in plain numpy.

Semantics contract shared by every backend:

* transposed weights: w_input_t (I, 4H), w_recurrent_t (H, 4H), biases
  (4H,), gate blocks ordered [input, forget, cell-candidate, output];
* xs (T, B, I), initial h/c (B, H); returns (ys (T, B, H), h, c);
* the input projection is evaluated per step, never batched across the
  whole sequence, so splitting xs at any cut point and carrying (h, c)
  yields bit-identical results (identical BLAS call shapes).
"""

import numpy as np

NAME = "pure"
COMPILED = False


def _sigmoid(x):
    # tanh form avoids exp overflow warnings at large |x|
    return 0.5 * (1.0 + np.tanh(np.float32(0.5) * x))


def lstm_seq(w_input_t, w_recurrent_t, bias_input, bias_recurrent, xs, h0, c0):
    t_total, batch, _ = xs.shape
    hidden = h0.shape[1]
    bias = bias_input + bias_recurrent
    h = h0.copy()
    c = c0.copy()
    ys = np.empty((t_total, batch, hidden), np.float32)
    for t in range(t_total):
        pre = xs[t] @ w_input_t + h @ w_recurrent_t + bias
        i = _sigmoid(pre[:, :hidden])
        f = _sigmoid(pre[:, hidden : 2 * hidden])
        g = np.tanh(pre[:, 2 * hidden : 3 * hidden])
        o = _sigmoid(pre[:, 3 * hidden :])
        c = f * c + i * g
        h = o * np.tanh(c)
        ys[t] = h
    return ys, h, c
