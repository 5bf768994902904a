"""Writers for the engine's weight-file and tensor-bundle formats.

Weight file (.ffsn), all integers unsigned 32-bit little-endian: magic
"FFSN", version 1, config block of 11 u32 (F, F_mel, N, lookahead, six
hidden sizes, sub_band_present flag), tensor count, tensor records in
canonical order, CRC-32 trailer over every preceding byte. A record is
name length, ASCII name, rank, one u32 per dim, float32 little-endian
row-major payload. Tensor bundles (.fftb) reuse the record codec with
magic "FFTB" and no config block.

The recurrent gate blocks are ordered [input, forget, cell, output] in
both this framework and the engine, so weight matrices are dumped
without permutation.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .config import TrainerConfig
from .graph import ReferenceModel

MAGIC_WEIGHTS = b"FFSN"
MAGIC_BUNDLE = b"FFTB"
FORMAT_VERSION = 1

_LSTM_PIECES = ("w_input", "w_recurrent", "bias_input", "bias_recurrent")


def _encode_record(name: str, array: np.ndarray) -> bytes:
    encoded = name.encode("ascii")
    arr = np.ascontiguousarray(array, dtype="<f4")
    parts = [struct.pack("<I", len(encoded)), encoded, struct.pack("<I", arr.ndim)]
    parts += [struct.pack("<I", d) for d in arr.shape]
    parts.append(arr.tobytes(order="C"))
    return b"".join(parts)


def _stack_tensors(prefix: str, stack) -> dict:
    tensors = {}
    for lname, layer in (("lstm0", stack.lstm0), ("lstm1", stack.lstm1)):
        tensors[f"{prefix}.{lname}.w_input"] = layer.weight_ih_l0
        tensors[f"{prefix}.{lname}.w_recurrent"] = layer.weight_hh_l0
        tensors[f"{prefix}.{lname}.bias_input"] = layer.bias_ih_l0
        tensors[f"{prefix}.{lname}.bias_recurrent"] = layer.bias_hh_l0
    tensors[f"{prefix}.affine.weight"] = stack.out.weight
    tensors[f"{prefix}.affine.bias"] = stack.out.bias
    return {k: v.detach().cpu().numpy() for k, v in tensors.items()}


def model_tensors(model: ReferenceModel) -> dict:
    """Canonical name -> float32 array mapping, in file order."""
    config = model.config
    tensors = {"mel.filterbank": model.mel.cpu().numpy()}
    tensors.update(_stack_tensors("l2m", model.l2m))
    if config.sub_band_present:
        tensors.update(_stack_tensors("sub", model.sub))
    tensors.update(_stack_tensors("m2l", model.m2l))
    return tensors


def export_weights(model: ReferenceModel, path) -> None:
    """Write the model as an engine-loadable .ffsn file."""
    config: TrainerConfig = model.config
    header = [
        MAGIC_WEIGHTS,
        struct.pack("<I", FORMAT_VERSION),
        struct.pack(
            "<11I",
            config.num_bins,
            config.num_mel,
            config.neighbors,
            config.lookahead,
            config.l2m_hidden[0],
            config.l2m_hidden[1],
            config.sub_hidden[0],
            config.sub_hidden[1],
            config.m2l_hidden[0],
            config.m2l_hidden[1],
            1 if config.sub_band_present else 0,
        ),
    ]
    tensors = model_tensors(model)
    body = b"".join(header) + struct.pack("<I", len(tensors))
    body += b"".join(_encode_record(name, arr) for name, arr in tensors.items())
    blob = body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)
    with open(path, "wb") as fh:
        fh.write(blob)


def save_bundle(path, tensors: dict) -> None:
    """Write an ordered name -> array mapping as a .fftb bundle."""
    body = MAGIC_BUNDLE + struct.pack("<II", FORMAT_VERSION, len(tensors))
    for name, arr in tensors.items():
        body += _encode_record(name, np.asarray(arr, dtype=np.float32))
    blob = body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)
    with open(path, "wb") as fh:
        fh.write(blob)


def load_bundle(path) -> dict:
    """Read a .fftb bundle back into a name -> float32 array dict."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 16 or data[:4] != MAGIC_BUNDLE:
        raise ValueError("not a tensor bundle")
    (stored_crc,) = struct.unpack("<I", data[-4:])
    if stored_crc != (zlib.crc32(data[:-4]) & 0xFFFFFFFF):
        raise ValueError("bundle CRC mismatch")
    version, count = struct.unpack_from("<II", data, 4)
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported bundle version {version}")
    pos = 12
    tensors = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<I", data, pos)
        pos += 4
        name = data[pos : pos + name_len].decode("ascii")
        pos += name_len
        (rank,) = struct.unpack_from("<I", data, pos)
        pos += 4
        shape = struct.unpack_from(f"<{rank}I", data, pos) if rank else ()
        pos += 4 * rank
        size = int(np.prod(shape, dtype=np.int64)) if rank else 1
        arr = np.frombuffer(data, dtype="<f4", count=size, offset=pos)
        pos += 4 * size
        tensors[name] = arr.reshape(shape).copy()
    if pos != len(data) - 4:
        raise ValueError("trailing bytes in bundle")
    return tensors
