"""Mono 16 kHz PCM16 WAV input and output built on the stdlib wave module."""

import wave

import numpy as np

from ffsn.dsp import ENGINE_SAMPLE_RATE, AudioClip
from ffsn.errors import FormatError

__all__ = ["read_wav", "write_wav"]

_PCM16_SCALE = 32768.0


def read_wav(path: str) -> AudioClip:
    """Read a mono 16 kHz 16-bit PCM WAV file.

    Samples are scaled by 1/32768 into [-1, 1).

    Args:
        path: filesystem path of the WAV file.

    Returns:
        AudioClip holding float32 samples at the engine rate.

    Raises:
        FormatError: if the file is not mono 16 kHz PCM16.
        OSError: if the file cannot be opened.
    """
    try:
        with wave.open(path, "rb") as f:
            channels = f.getnchannels()
            width = f.getsampwidth()
            rate = f.getframerate()
            frames = f.readframes(f.getnframes())
    except wave.Error as exc:
        raise FormatError(f"not a readable WAV file: {exc}") from exc
    if channels != 1:
        raise FormatError(f"expected mono audio, got {channels} channels")
    if width != 2:
        raise FormatError(f"expected 16-bit PCM, got {8 * width}-bit")
    if rate != ENGINE_SAMPLE_RATE:
        raise FormatError(f"expected {ENGINE_SAMPLE_RATE} Hz, got {rate} Hz")
    samples = np.frombuffer(frames, dtype="<i2").astype(np.float32) / _PCM16_SCALE
    return AudioClip(samples)


def write_wav(path: str, clip: AudioClip) -> None:
    """Write an AudioClip as a mono 16 kHz 16-bit PCM WAV file.

    Samples are clipped to [-1, 1 - 1/32768] before quantization.

    Args:
        path: destination path, overwritten if present.
        clip: audio to write.
    """
    scaled = np.clip(
        clip.samples.astype(np.float64) * _PCM16_SCALE, -_PCM16_SCALE, _PCM16_SCALE - 1
    )
    pcm = np.round(scaled).astype("<i2")
    with wave.open(path, "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(clip.sample_rate)
        f.writeframes(pcm.tobytes())
