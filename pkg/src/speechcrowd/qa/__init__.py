"""Automated quality assurance: decoding, VAD, signal gates, confidence scoring."""

from .audio import (
    AudioBuffer,
    AudioError,
    EmptyAudio,
    MalformedContainer,
    UnsupportedFormat,
    clipping_ratio,
    decode_wav,
    encode_wav,
)
from .pipeline import (
    ASR_UNAVAILABLE,
    CLIPPED,
    FAIL_REASONS,
    LOW_CONFIDENCE,
    MOSTLY_SILENCE,
    TOO_LITTLE_SPEECH,
    TOO_LONG,
    QaThresholds,
    run_qa,
)
from .textnorm import confidence, edit_distance, normalize_arabic
from .vad import SILENCE_FLOOR_DB, TooShort, VadParams, detect_speech, frame_rms_db

__all__ = [
    "ASR_UNAVAILABLE",
    "AudioBuffer",
    "AudioError",
    "CLIPPED",
    "EmptyAudio",
    "FAIL_REASONS",
    "LOW_CONFIDENCE",
    "MOSTLY_SILENCE",
    "MalformedContainer",
    "QaThresholds",
    "SILENCE_FLOOR_DB",
    "TOO_LITTLE_SPEECH",
    "TOO_LONG",
    "TooShort",
    "UnsupportedFormat",
    "VadParams",
    "clipping_ratio",
    "confidence",
    "decode_wav",
    "detect_speech",
    "edit_distance",
    "encode_wav",
    "frame_rms_db",
    "normalize_arabic",
    "run_qa",
]
