"""Streaming speech-enhancement engine with causal temporal down-sampling.

A cascade of a linear-to-mel full-band recurrent model, a frequency-shared
sub-band recurrent model run once every m frames, and a mel-to-linear
full-band recurrent model predicting a compressed complex ratio mask.
"""

from ffsn.cirm import compress as cirm_compress
from ffsn.cirm import decompress as cirm_decompress
from ffsn.complexity import compare, count_macs, count_params
from ffsn.dsp import ENGINE_SAMPLE_RATE, AnalysisConfig, AudioClip, istft, stft
from ffsn.errors import (
    ConfigError,
    DataError,
    FfsnError,
    FormatError,
    MetricError,
    ShapeError,
    StateError,
    ValidationError,
)
from ffsn.kernels import active_backend, available_backends, select_backend
from ffsn.mel import MelFilterbank, apply_filterbank, build_filterbank
from ffsn.metrics import si_sdr
from ffsn.model import INFINITY, ModelConfig, ModelWeights, forward_offline
from ffsn.stream import Stream, enhance_stream
from ffsn.wavio import read_wav, write_wav
from ffsn.weights_io import load, save

__version__ = "0.1.0"

__all__ = [
    "ENGINE_SAMPLE_RATE",
    "INFINITY",
    "AnalysisConfig",
    "AudioClip",
    "ConfigError",
    "DataError",
    "FfsnError",
    "FormatError",
    "MelFilterbank",
    "MetricError",
    "ModelConfig",
    "ModelWeights",
    "ShapeError",
    "StateError",
    "Stream",
    "ValidationError",
    "active_backend",
    "apply_filterbank",
    "available_backends",
    "build_filterbank",
    "cirm_compress",
    "cirm_decompress",
    "compare",
    "count_macs",
    "count_params",
    "enhance_stream",
    "forward_offline",
    "istft",
    "load",
    "read_wav",
    "save",
    "select_backend",
    "si_sdr",
    "stft",
    "write_wav",
]
