"""Runtime-selectable compute backends for the recurrent kernels.

Two implementations of the same ``lstm_seq`` contract are provided: a
compiled extension (BLAS + fused C gate loop) and a pure-numpy fallback.
The default is the compiled one when the extension built, overridable
with the ``FFSN_BACKEND`` environment variable or :func:`select_backend`.
Backends agree within float32 round-off (~1e-6), not bit-exactly.
"""

import os

from ..errors import ConfigError
from . import _pure

_BACKENDS = {"pure": _pure}
try:
    from . import _recurrent as _compiled

    _BACKENDS["compiled"] = _compiled
except ImportError:  # extension not built; pure fallback still works
    _compiled = None

_DEFAULT = os.environ.get("FFSN_BACKEND") or (
    "compiled" if _compiled is not None else "pure"
)
if _DEFAULT not in _BACKENDS:
    raise ConfigError(
        f"FFSN_BACKEND={_DEFAULT!r} is not available; "
        f"choose from {sorted(_BACKENDS)}"
    )
_active = _BACKENDS[_DEFAULT]


def available_backends():
    """Names of the backends importable in this environment."""
    return sorted(_BACKENDS)


def active_backend() -> str:
    return _active.NAME


def select_backend(name: str) -> str:
    """Switch the process-wide kernel backend; returns the previous name."""
    global _active
    if name not in _BACKENDS:
        raise ConfigError(
            f"unknown backend {name!r}; choose from {sorted(_BACKENDS)}"
        )
    previous = _active.NAME
    _active = _BACKENDS[name]
    return previous


def lstm_seq(w_input_t, w_recurrent_t, bias_input, bias_recurrent, xs, h0, c0):
    """Run a full LSTM layer over xs (T, B, I).

    Weights arrive transposed: w_input_t (I, 4H), w_recurrent_t (H, 4H).
    See the _pure module docstring for the full contract.
    """
    return _active.lstm_seq(
        w_input_t, w_recurrent_t, bias_input, bias_recurrent, xs, h0, c0
    )
