"""Toy-scale trainer for the streaming speech-enhancement engine.

Builds the same cascaded full-band / sub-band mask-estimation graph in
torch, synthesizes toy noisy/clean mixtures, trains against compressed
complex-ratio-mask targets, exports engine-loadable ``.ffsn`` weight
files, and emits stage-by-stage parity fixtures. The package never
imports the engine: the only coupling is through the file formats and
the engine's command line.
"""

from .cirm import compress, compute_cirm, decompress
from .config import TrainerConfig
from .data import DatasetParams, make_dataset, make_mixture
from .export import export_weights, load_bundle, save_bundle
from .fixtures import emit_fixtures
from .graph import ReferenceModel, enhance_spectrogram
from .metrics import si_sdr
from .train import TrainingError, train_toy

__version__ = "0.1.0"

__all__ = [
    "TrainerConfig",
    "ReferenceModel",
    "enhance_spectrogram",
    "compress",
    "decompress",
    "compute_cirm",
    "DatasetParams",
    "make_mixture",
    "make_dataset",
    "TrainingError",
    "train_toy",
    "export_weights",
    "save_bundle",
    "load_bundle",
    "emit_fixtures",
    "si_sdr",
]
