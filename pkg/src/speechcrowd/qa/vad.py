"""Energy-gate voice activity detection with an adaptive noise floor.

Frames are scored in dBFS; the noise floor is a low percentile of the frame
energies, so the speech threshold is relative to each recording's own floor
and the detector is insensitive to overall gain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .audio import FULL_SCALE, AudioBuffer, AudioError

SILENCE_FLOOR_DB = -120.0  # assigned to digitally silent frames instead of log(0)


class TooShort(AudioError):
    """Audio is shorter than a single analysis frame."""


@dataclass(frozen=True)
class VadParams:
    frame_ms: int = 25
    hop_ms: int = 10
    noise_floor_percentile: float = 0.10
    threshold_db_above_floor: float = 10.0
    hangover_frames: int = 5
    min_segment_ms: int = 100

    def __post_init__(self) -> None:
        if self.frame_ms <= 0 or self.hop_ms <= 0:
            raise ValueError("frame_ms and hop_ms must be positive")
        if self.hop_ms > self.frame_ms:
            raise ValueError("hop_ms must not exceed frame_ms")
        if not 0.0 < self.noise_floor_percentile < 1.0:
            raise ValueError("noise_floor_percentile must be in (0, 1)")
        if self.threshold_db_above_floor < 0:
            raise ValueError("threshold_db_above_floor must be non-negative")
        if self.hangover_frames < 0:
            raise ValueError("hangover_frames must be non-negative")
        if self.min_segment_ms <= 0:
            raise ValueError("min_segment_ms must be positive")


def frame_rms_db(audio: AudioBuffer, params: VadParams) -> np.ndarray:
    """Per-frame RMS level in dBFS, one value per hop-aligned full frame."""
    frame_len = audio.sample_rate_hz * params.frame_ms // 1000
    hop = audio.sample_rate_hz * params.hop_ms // 1000
    if frame_len < 1 or hop < 1:
        raise ValueError("frame/hop shorter than one sample at this rate")
    samples = audio.samples
    if len(samples) < frame_len:
        raise TooShort(f"{len(samples)} samples < one {params.frame_ms} ms frame")
    windows = sliding_window_view(samples.astype(np.float64), frame_len)[::hop]
    rms = np.sqrt(np.mean(windows * windows, axis=1))
    db = np.full(len(rms), SILENCE_FLOOR_DB)
    loud = rms > 0.0
    db[loud] = 20.0 * np.log10(rms[loud] / FULL_SCALE)
    return db


def detect_speech(audio: AudioBuffer, params: VadParams) -> list[tuple[float, float]]:
    """Detect speech segments as (start_s, end_s) pairs.

    Frames above noise-floor-percentile + threshold are speech; inter-speech
    gaps of at most ``hangover_frames`` are bridged; segments shorter than
    ``min_segment_ms`` are dropped. Output is sorted, non-overlapping and
    within [0, duration] by construction.
    """
    db = frame_rms_db(audio, params)
    floor = float(np.quantile(db, params.noise_floor_percentile))
    speech = db > floor + params.threshold_db_above_floor
    indices = np.flatnonzero(speech)
    if indices.size == 0:
        return []

    runs: list[tuple[int, int]] = []  # inclusive frame-index ranges
    run_start = prev = int(indices[0])
    for idx in indices[1:]:
        idx = int(idx)
        if idx - prev - 1 <= params.hangover_frames:
            prev = idx
        else:
            runs.append((run_start, prev))
            run_start = prev = idx
    runs.append((run_start, prev))

    hop_s = (audio.sample_rate_hz * params.hop_ms // 1000) / audio.sample_rate_hz
    frame_s = (audio.sample_rate_hz * params.frame_ms // 1000) / audio.sample_rate_hz
    spans: list[list[float]] = []
    for first, last in runs:
        start = first * hop_s
        end = last * hop_s + frame_s
        # Overlapping frames can make neighbouring runs overlap in time; merge.
        if spans and start <= spans[-1][1]:
            spans[-1][1] = max(spans[-1][1], end)
        else:
            spans.append([start, end])
    return [(s, e) for s, e in spans if (e - s) * 1000.0 >= params.min_segment_ms]
