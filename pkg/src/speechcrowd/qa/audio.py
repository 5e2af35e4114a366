"""PCM16 mono WAV decoding and basic sample-level measurements.

The upload contract is deliberately narrow: RIFF/WAVE, PCM format code 1,
16 bits per sample, one channel. Clients transcode before uploading, so the
server-side decoder stays small and bit-exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

FULL_SCALE = 32768  # dBFS reference for 16-bit PCM
CLIP_LEVEL = 32767


class AudioError(Exception):
    """Base class for audio decoding/processing failures."""


class MalformedContainer(AudioError):
    """Bytes are not a structurally valid RIFF/WAVE file."""


class UnsupportedFormat(AudioError):
    """Valid container, but not PCM16 mono."""


class EmptyAudio(AudioError):
    """The data chunk holds zero samples."""


@dataclass(frozen=True)
class AudioBuffer:
    """Decoded mono PCM16 audio."""

    samples: np.ndarray  # 1-D int16
    sample_rate_hz: int

    def __post_init__(self) -> None:
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        samples = np.asarray(self.samples)
        if samples.dtype != np.int16:
            # a silent float->int16 cast would corrupt every metric downstream
            raise TypeError(f"samples must be int16, got {samples.dtype}")
        if samples.ndim != 1:
            raise ValueError("samples must be 1-D")
        if samples.size == 0:
            raise ValueError("samples must be non-empty")
        object.__setattr__(self, "samples", samples)

    @property
    def channels(self) -> int:
        return 1

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


def decode_wav(data: bytes) -> AudioBuffer:
    """Decode a RIFF/WAVE byte string into an AudioBuffer.

    Raises MalformedContainer for structural problems, UnsupportedFormat for
    anything other than PCM16 mono, EmptyAudio for a zero-length data chunk.
    """
    if len(data) < 12:
        raise MalformedContainer("file shorter than a RIFF header")
    if data[0:4] != b"RIFF":
        raise MalformedContainer(f"bad magic {data[0:4]!r}, expected b'RIFF'")
    if data[8:12] != b"WAVE":
        raise MalformedContainer(f"bad form type {data[8:12]!r}, expected b'WAVE'")

    fmt: tuple[int, int, int, int] | None = None  # format code, channels, rate, bits
    payload: bytes | None = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body_start = pos + 8
        if body_start + chunk_size > len(data):
            raise MalformedContainer(f"chunk {chunk_id!r} truncated")
        body = data[body_start : body_start + chunk_size]
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise MalformedContainer("fmt chunk shorter than 16 bytes")
            format_code, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", body, 0)
            fmt = (format_code, channels, rate, bits)
        elif chunk_id == b"data":
            payload = body
        pos = body_start + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None:
        raise MalformedContainer("missing fmt chunk")
    if payload is None:
        raise MalformedContainer("missing data chunk")
    format_code, channels, rate, bits = fmt
    if format_code != 1:
        raise UnsupportedFormat(f"format code {format_code}, only PCM (1) is accepted")
    if channels != 1:
        raise UnsupportedFormat(f"{channels} channels, only mono is accepted")
    if bits != 16:
        raise UnsupportedFormat(f"{bits} bits/sample, only 16 is accepted")
    if rate <= 0:
        raise MalformedContainer("non-positive sample rate")
    if len(payload) % 2 != 0:
        raise MalformedContainer("data chunk holds a partial sample")
    samples = np.frombuffer(payload, dtype="<i2")
    if samples.size == 0:
        raise EmptyAudio("data chunk holds zero samples")
    return AudioBuffer(samples=samples, sample_rate_hz=rate)


def encode_wav(audio: AudioBuffer) -> bytes:
    """Serialize an AudioBuffer back to a canonical PCM16 mono WAV."""
    payload = audio.samples.astype("<i2").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        1,  # PCM
        1,  # mono
        audio.sample_rate_hz,
        audio.sample_rate_hz * 2,
        2,
        16,
        b"data",
        len(payload),
    )
    return header + payload


def clipping_ratio(audio: AudioBuffer) -> float:
    """Fraction of samples at or beyond digital full scale (|x| >= 32767)."""
    clipped = np.count_nonzero(np.abs(audio.samples.astype(np.int32)) >= CLIP_LEVEL)
    return clipped / len(audio.samples)
