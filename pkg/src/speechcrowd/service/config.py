"""Service configuration: one YAML file, every knob overridable via
SPEECHCROWD_* environment variables (override wins)."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..qa import QaThresholds, VadParams

DEFAULT_SESSION_TTL_HOURS = 24.0
DEFAULT_MAX_UPLOAD_BYTES = 20 * 1024 * 1024


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class AsrConfig:
    endpoint: str | None = None
    auth_token: str | None = None
    max_concurrent: int = 4
    timeout_s: float = 30.0


@dataclass(frozen=True)
class AppConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8000
    database_path: str = "data/speechcrowd.db"
    blob_dir: str = "data/blobs"
    quorum: int = 1
    session_ttl_hours: float = DEFAULT_SESSION_TTL_HOURS
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES
    vad: VadParams = field(default_factory=VadParams)
    qa: QaThresholds = field(default_factory=QaThresholds)
    asr: AsrConfig = field(default_factory=AsrConfig)

    def __post_init__(self) -> None:
        if self.quorum < 1:
            raise ConfigError("quorum must be >= 1")
        if self.session_ttl_hours <= 0:
            raise ConfigError("session_ttl_hours must be > 0")
        if self.max_upload_bytes < 1:
            raise ConfigError("max_upload_bytes must be >= 1")
        if not 1 <= self.listen_port <= 65535:
            raise ConfigError("listen_port out of range")


# (section, key) -> environment variable suffix and coercion. The flat list
# doubles as the documentation of every supported setting.
_SCHEMA: list[tuple[str, str | None, str, type]] = [
    ("listen_host", "listen", "host", str),
    ("listen_port", "listen", "port", int),
    ("database_path", "storage", "database", str),
    ("blob_dir", "storage", "blobs", str),
    ("quorum", None, "quorum", int),
    ("session_ttl_hours", None, "session_ttl_hours", float),
    ("max_upload_bytes", None, "max_upload_bytes", int),
]

_VAD_KEYS: dict[str, type] = {
    "frame_ms": int,
    "hop_ms": int,
    "noise_floor_percentile": float,
    "threshold_db_above_floor": float,
    "hangover_frames": int,
    "min_segment_ms": int,
}

_QA_KEYS: dict[str, type] = {
    "min_speech_s": float,
    "max_duration_s": float,
    "min_speech_ratio": float,
    "max_clipping_ratio": float,
    "min_confidence": float,
}

_ASR_KEYS: dict[str, type] = {
    "endpoint": str,
    "auth_token": str,
    "max_concurrent": int,
    "timeout_s": float,
}


def _env_name(*parts: str) -> str:
    return "SPEECHCROWD_" + "_".join(p.upper() for p in parts)


def _coerce(raw, caster: type, where: str):
    if raw is None:
        return None
    try:
        if caster is int:
            return int(raw)
        if caster is float:
            return float(raw)
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {caster.__name__}") from exc


def _section(data: dict, name: str) -> dict:
    value = data.get(name, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"config section {name!r} must be a mapping")
    return value


def load_config(path: str | os.PathLike | None = None, env: dict | None = None) -> AppConfig:
    """Build the effective configuration: defaults, then the YAML file, then
    SPEECHCROWD_* environment variables."""
    env = os.environ if env is None else env
    data: dict = {}
    if path is not None:
        raw = Path(path).read_text(encoding="utf-8")
        try:
            loaded = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("config root must be a mapping")
        data = loaded

    values: dict = {}
    for attr, section, key, caster in _SCHEMA:
        file_value = _section(data, section).get(key) if section else data.get(key)
        env_value = env.get(_env_name(section, key) if section else _env_name(key))
        chosen = env_value if env_value is not None else file_value
        coerced = _coerce(chosen, caster, attr)
        if coerced is not None:
            values[attr] = coerced

    def build_section(name: str, keys: dict[str, type]) -> dict:
        out = {}
        file_section = _section(data, name)
        for key, caster in keys.items():
            env_value = env.get(_env_name(name, key))
            chosen = env_value if env_value is not None else file_section.get(key)
            coerced = _coerce(chosen, caster, f"{name}.{key}")
            if coerced is not None:
                out[key] = coerced
        return out

    try:
        vad = VadParams(**build_section("vad", _VAD_KEYS))
        qa = QaThresholds(**build_section("qa", _QA_KEYS))
        asr = AsrConfig(**build_section("asr", _ASR_KEYS))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return AppConfig(vad=vad, qa=qa, asr=asr, **values)
