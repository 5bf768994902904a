"""WAV round-trip and format validation tests."""

import struct
import wave

import numpy as np
import pytest

from ffsn.dsp import AudioClip
from ffsn.errors import FormatError
from ffsn.wavio import read_wav, write_wav


def test_round_trip_within_quantization_step(tmp_path):
    rng = np.random.default_rng(0)
    x = (0.5 * rng.standard_normal(3000)).clip(-0.99, 0.99).astype(np.float32)
    path = str(tmp_path / "a.wav")
    write_wav(path, AudioClip(x))
    back = read_wav(path)
    assert back.sample_rate == 16000
    assert back.samples.dtype == np.float32
    assert back.samples.shape == x.shape
    assert np.max(np.abs(back.samples - x)) <= 0.5 / 32768 + 1e-7


def test_known_pcm_values(tmp_path):
    path = str(tmp_path / "b.wav")
    with wave.open(path, "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(16000)
        f.writeframes(struct.pack("<4h", 0, 16384, -32768, 32767))
    clip = read_wav(path)
    assert np.allclose(clip.samples, [0.0, 0.5, -1.0, 32767 / 32768], atol=1e-7)


def test_full_scale_is_clipped_not_wrapped(tmp_path):
    path = str(tmp_path / "c.wav")
    write_wav(path, AudioClip(np.array([1.5, -1.5, 1.0], np.float32)))
    clip = read_wav(path)
    assert np.allclose(clip.samples, [32767 / 32768, -1.0, 32767 / 32768])


def test_rejects_stereo(tmp_path):
    path = str(tmp_path / "d.wav")
    with wave.open(path, "wb") as f:
        f.setnchannels(2)
        f.setsampwidth(2)
        f.setframerate(16000)
        f.writeframes(b"\x00\x00" * 8)
    with pytest.raises(FormatError):
        read_wav(path)


def test_rejects_wrong_rate_and_width(tmp_path):
    path = str(tmp_path / "e.wav")
    with wave.open(path, "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(44100)
        f.writeframes(b"\x00\x00" * 8)
    with pytest.raises(FormatError):
        read_wav(path)
    path2 = str(tmp_path / "f.wav")
    with wave.open(path2, "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(1)
        f.setframerate(16000)
        f.writeframes(b"\x00" * 8)
    with pytest.raises(FormatError):
        read_wav(path2)


def test_rejects_non_wav_bytes(tmp_path):
    path = tmp_path / "g.wav"
    path.write_bytes(b"definitely not a wav file")
    with pytest.raises(FormatError):
        read_wav(str(path))


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        read_wav(str(tmp_path / "missing.wav"))
