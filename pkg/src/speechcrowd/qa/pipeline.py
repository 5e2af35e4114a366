"""The quality gates applied to every upload before human validation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..domain import QAReport, Verdict
from .audio import AudioBuffer, clipping_ratio
from .textnorm import confidence
from .vad import VadParams, detect_speech

# Gate reason codes, in the order they are evaluated and reported.
TOO_LONG = "too_long"
TOO_LITTLE_SPEECH = "too_little_speech"
MOSTLY_SILENCE = "mostly_silence"
CLIPPED = "clipped"
LOW_CONFIDENCE = "low_confidence"

# Non-gating note recorded when the recognizer could not be reached.
ASR_UNAVAILABLE = "asr_unavailable"

FAIL_REASONS = (TOO_LONG, TOO_LITTLE_SPEECH, MOSTLY_SILENCE, CLIPPED, LOW_CONFIDENCE)


@dataclass(frozen=True)
class QaThresholds:
    min_speech_s: float = 0.5
    max_duration_s: float = 30.0
    min_speech_ratio: float = 0.3
    max_clipping_ratio: float = 0.01
    min_confidence: float = 0.5  # applied only when an ASR hypothesis is present

    def __post_init__(self) -> None:
        for name in ("min_speech_ratio", "max_clipping_ratio", "min_confidence"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if not 0 < self.min_speech_s < self.max_duration_s:
            raise ValueError("need 0 < min_speech_s < max_duration_s")


def run_qa(
    audio: AudioBuffer,
    prompt_text: str,
    asr_hypothesis: str | None,
    params: VadParams,
    thresholds: QaThresholds,
    notes: Iterable[str] = (),
) -> QAReport:
    """Run VAD and all signal gates, plus the confidence gate when a hypothesis
    is available, and accumulate every tripped gate into the report.

    Deterministic: identical inputs produce an identical report. Audio errors
    (malformed, too short for a frame) propagate to the caller.
    """
    duration = audio.duration_s
    segments = detect_speech(audio, params)
    speech_total = sum(end - start for start, end in segments)
    speech_ratio = speech_total / duration
    clip = clipping_ratio(audio)
    score = confidence(prompt_text, asr_hypothesis) if asr_hypothesis is not None else None

    reasons = []
    if duration > thresholds.max_duration_s:
        reasons.append(TOO_LONG)
    if speech_total < thresholds.min_speech_s:
        reasons.append(TOO_LITTLE_SPEECH)
    if speech_ratio < thresholds.min_speech_ratio:
        reasons.append(MOSTLY_SILENCE)
    if clip > thresholds.max_clipping_ratio:
        reasons.append(CLIPPED)
    if score is not None and score < thresholds.min_confidence:
        reasons.append(LOW_CONFIDENCE)

    return QAReport(
        speech_segments=tuple(segments),
        speech_ratio=speech_ratio,
        clipping_ratio=clip,
        verdict=Verdict.FAIL if reasons else Verdict.PASS,
        fail_reasons=tuple(reasons),
        asr_hypothesis=asr_hypothesis,
        confidence=score,
        notes=tuple(notes),
    )
