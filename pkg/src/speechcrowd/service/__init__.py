from .app import build_repository, create_app, default_asr_client
from .config import AppConfig, AsrConfig, ConfigError, load_config
from .errors import ERROR_CODES, ApiError

__all__ = [
    "AppConfig",
    "AsrConfig",
    "ApiError",
    "ConfigError",
    "ERROR_CODES",
    "build_repository",
    "create_app",
    "default_asr_client",
    "load_config",
]
