"""Binary weight-file and tensor-bundle formats.

Weight file (.ffsn), all integers unsigned 32-bit little-endian:

  magic "FFSN" | version=1 | config block of 11 u32
  (F, F_mel, N, tau, l2m_h0, l2m_h1, sub_h0, sub_h1, m2l_h0, m2l_h1,
  sub_band_present) | tensor count | tensor records | CRC-32 trailer
  over every preceding byte.

A tensor record is: name length, ASCII name, rank, one u32 per dim,
then the float32 little-endian row-major payload. Tensor names are the
closed canonical set (mel.filterbank, <stack>.lstm<i>.<piece>,
<stack>.affine.<piece>); files with missing, unknown, duplicated, or
mis-shaped tensors are rejected. The down-sampling factor m is a runtime
choice and is never serialized; only sub_band_present is.

A tensor bundle (.fftb) reuses the identical record codec with magic
"FFTB" and no config block: magic | version=1 | count | records | CRC.
Bundles carry arbitrary ASCII-named tensors (feature dumps, parity
fixtures).
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import FormatError, ValidationError
from .mel import MelFilterbank
from .model import INFINITY, ModelConfig, ModelWeights, StackWeights
from .ops import AffineParams, LstmLayerParams

MAGIC_WEIGHTS = b"FFSN"
MAGIC_BUNDLE = b"FFTB"
FORMAT_VERSION = 1

_MAX_NAME_LEN = 256
_MAX_RANK = 4

_LSTM_PIECES = ("w_input", "w_recurrent", "bias_input", "bias_recurrent")


def _canonical_names(sub_present: bool):
    stacks = ("l2m", "sub", "m2l") if sub_present else ("l2m", "m2l")
    names = ["mel.filterbank"]
    for stack in stacks:
        for layer in ("lstm0", "lstm1"):
            names += [f"{stack}.{layer}.{piece}" for piece in _LSTM_PIECES]
        names += [f"{stack}.affine.weight", f"{stack}.affine.bias"]
    return names


def _expected_shapes(config: ModelConfig):
    f, fm = config.num_bins, config.num_mel
    spec = {"mel.filterbank": (fm, f)}

    def stack(prefix, in_dim, hidden, out_dim):
        h0, h1 = hidden
        spec[f"{prefix}.lstm0.w_input"] = (4 * h0, in_dim)
        spec[f"{prefix}.lstm0.w_recurrent"] = (4 * h0, h0)
        spec[f"{prefix}.lstm0.bias_input"] = (4 * h0,)
        spec[f"{prefix}.lstm0.bias_recurrent"] = (4 * h0,)
        spec[f"{prefix}.lstm1.w_input"] = (4 * h1, h0)
        spec[f"{prefix}.lstm1.w_recurrent"] = (4 * h1, h1)
        spec[f"{prefix}.lstm1.bias_input"] = (4 * h1,)
        spec[f"{prefix}.lstm1.bias_recurrent"] = (4 * h1,)
        spec[f"{prefix}.affine.weight"] = (out_dim, h1)
        spec[f"{prefix}.affine.bias"] = (out_dim,)

    stack("l2m", fm, config.l2m_hidden, fm)
    if config.sub_band_present:
        stack("sub", config.sub_input_dim, config.sub_hidden, 1)
    stack("m2l", config.m2l_input_dim, config.m2l_hidden, config.mask_dim)
    return spec


def _weights_tensors(weights: ModelWeights, sub_present: bool):
    tensors = {"mel.filterbank": weights.mel.weights}
    stacks = [("l2m", weights.l2m), ("m2l", weights.m2l)]
    if sub_present:
        stacks.insert(1, ("sub", weights.sub))
    for prefix, stack in stacks:
        for lname, layer in (("lstm0", stack.lstm0), ("lstm1", stack.lstm1)):
            tensors[f"{prefix}.{lname}.w_input"] = layer.w_input
            tensors[f"{prefix}.{lname}.w_recurrent"] = layer.w_recurrent
            tensors[f"{prefix}.{lname}.bias_input"] = layer.bias_input
            tensors[f"{prefix}.{lname}.bias_recurrent"] = layer.bias_recurrent
        tensors[f"{prefix}.affine.weight"] = stack.out.weight
        tensors[f"{prefix}.affine.bias"] = stack.out.bias
    return tensors


def _encode_record(name: str, array: np.ndarray) -> bytes:
    encoded = name.encode("ascii")
    arr = np.ascontiguousarray(array, dtype="<f4")
    parts = [struct.pack("<I", len(encoded)), encoded, struct.pack("<I", arr.ndim)]
    parts += [struct.pack("<I", d) for d in arr.shape]
    parts.append(arr.tobytes(order="C"))
    return b"".join(parts)


class _Cursor:
    """Bounds-checked reader over an immutable byte string."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise FormatError(f"truncated file while reading {what}")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def done(self) -> bool:
        return self.pos == len(self.data)


def _decode_records(cur: _Cursor, count: int):
    records = {}
    for idx in range(count):
        name_len = cur.u32(f"tensor {idx} name length")
        if name_len == 0 or name_len > _MAX_NAME_LEN:
            raise FormatError(f"tensor {idx}: implausible name length {name_len}")
        raw = cur.take(name_len, f"tensor {idx} name")
        try:
            name = raw.decode("ascii")
        except UnicodeDecodeError:
            raise FormatError(f"tensor {idx}: non-ASCII name") from None
        rank = cur.u32(f"{name} rank")
        if rank == 0 or rank > _MAX_RANK:
            raise FormatError(f"{name}: implausible rank {rank}")
        dims = tuple(cur.u32(f"{name} dim {i}") for i in range(rank))
        total = 1
        for d in dims:
            if d == 0:
                raise FormatError(f"{name}: zero-sized dimension")
            total *= d
        payload = cur.take(4 * total, f"{name} payload")
        if name in records:
            raise ValidationError(f"duplicate tensor {name}")
        records[name] = np.frombuffer(payload, dtype="<f4").reshape(dims).copy()
    return records


def _checked_body(data: bytes, magic: bytes, kind: str) -> _Cursor:
    if len(data) < len(magic) + 8:
        raise FormatError(f"{kind} too short")
    if data[:4] != magic:
        raise FormatError(
            f"bad magic {data[:4]!r}, expected {magic.decode('ascii')}"
        )
    (stored_crc,) = struct.unpack("<I", data[-4:])
    actual = zlib.crc32(data[:-4]) & 0xFFFFFFFF
    if stored_crc != actual:
        raise FormatError(
            f"CRC mismatch: stored {stored_crc:#010x}, computed {actual:#010x}"
        )
    cur = _Cursor(data[:-4])
    cur.pos = 4
    version = cur.u32("format version")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    return cur


def save(weights: ModelWeights, config: ModelConfig, path) -> None:
    """Write weights + config to a .ffsn file; bytes are deterministic."""
    weights.validate(config)
    sub_present = config.sub_band_present
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
            1 if sub_present else 0,
        ),
    ]
    tensors = _weights_tensors(weights, sub_present)
    names = _canonical_names(sub_present)
    body = b"".join(header) + struct.pack("<I", len(names))
    body += b"".join(_encode_record(name, tensors[name]) for name in names)
    blob = body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)
    with open(path, "wb") as fh:
        fh.write(blob)


def load(path) -> tuple[ModelWeights, ModelConfig]:
    """Read and fully validate a .ffsn file.

    The returned config's downsample factor is the default (or INFINITY
    when the file has no sub-band stack); callers pick the actual m at
    run time.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    cur = _checked_body(data, MAGIC_WEIGHTS, "weight file")
    fields = struct.unpack("<11I", cur.take(44, "config block"))
    (f, fm, n, tau, l2m0, l2m1, sub0, sub1, m2l0, m2l1, sub_flag) = fields
    if sub_flag not in (0, 1):
        raise FormatError(f"sub_band_present flag must be 0/1, got {sub_flag}")
    kwargs = dict(
        num_bins=f,
        num_mel=fm,
        neighbors=n,
        lookahead=tau,
        l2m_hidden=(l2m0, l2m1),
        sub_hidden=(sub0, sub1),
        m2l_hidden=(m2l0, m2l1),
    )
    if not sub_flag:
        kwargs["downsample"] = INFINITY
    config = ModelConfig(**kwargs)
    count = cur.u32("tensor count")
    expected = _expected_shapes(config)
    if count != len(expected):
        raise ValidationError(
            f"tensor count {count} != expected {len(expected)}"
        )
    records = _decode_records(cur, count)
    if not cur.done():
        raise FormatError(f"{len(cur.data) - cur.pos} trailing bytes")

    unknown = sorted(set(records) - set(expected))
    if unknown:
        raise ValidationError(f"unknown tensors: {', '.join(unknown)}")
    missing = sorted(set(expected) - set(records))
    if missing:
        raise ValidationError(f"missing tensors: {', '.join(missing)}")
    for name, shape in expected.items():
        if records[name].shape != shape:
            raise ValidationError(
                f"{name}: shape {records[name].shape} != expected {shape}"
            )

    def stack(prefix):
        return StackWeights(
            LstmLayerParams(*(records[f"{prefix}.lstm0.{p}"] for p in _LSTM_PIECES)),
            LstmLayerParams(*(records[f"{prefix}.lstm1.{p}"] for p in _LSTM_PIECES)),
            AffineParams(
                records[f"{prefix}.affine.weight"], records[f"{prefix}.affine.bias"]
            ),
        )

    mel = MelFilterbank(
        records["mel.filterbank"],
        f_min=0.0,
        f_max=8000.0,
        sample_rate=16000,
    )
    weights = ModelWeights(
        l2m=stack("l2m"),
        sub=stack("sub") if sub_flag else None,
        m2l=stack("m2l"),
        mel=mel,
    )
    weights.validate(config)
    return weights, config


def save_tensors(path, tensors: dict) -> None:
    """Write an ordered name->array mapping as a .fftb tensor bundle."""
    body = MAGIC_BUNDLE + struct.pack("<II", FORMAT_VERSION, len(tensors))
    for name, arr in tensors.items():
        body += _encode_record(name, np.asarray(arr, dtype=np.float32))
    blob = body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)
    with open(path, "wb") as fh:
        fh.write(blob)


def load_tensors(path) -> dict:
    """Read a .fftb tensor bundle back into a name->array dict."""
    with open(path, "rb") as fh:
        data = fh.read()
    cur = _checked_body(data, MAGIC_BUNDLE, "tensor bundle")
    count = cur.u32("tensor count")
    records = _decode_records(cur, count)
    if not cur.done():
        raise FormatError(f"{len(cur.data) - cur.pos} trailing bytes")
    return records
