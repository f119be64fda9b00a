"""Flat ``key = value`` config files for the provider and the HTTP service."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .correction import ProviderConfig

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8000

_PROVIDER_KEYS = {
    "provider.endpoint",
    "provider.model",
    "provider.api_key_env",
    "provider.timeout_s",
    "provider.max_retries",
    "provider.parallelism",
    "provider.backoff_base_s",
    "provider.mock_responses",
}
_SERVICE_KEYS = {
    "service.host",
    "service.port",
    "service.data_dir",
    "service.audio_dir",
    "service.reference_dir",
    "service.cors_origins",
}
KNOWN_KEYS = _PROVIDER_KEYS | _SERVICE_KEYS


class ConfigError(ValueError):
    pass


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, blanks ignored."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def load_config(path: str | Path) -> dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"), source=str(path))


def _get_int(values: dict[str, str], key: str, default: int) -> int:
    if key not in values:
        return default
    try:
        return int(values[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {values[key]!r}") from None


def _get_float(values: dict[str, str], key: str, default: float) -> float:
    if key not in values:
        return default
    try:
        return float(values[key])
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {values[key]!r}") from None


def build_provider_config(values: dict[str, str]) -> ProviderConfig:
    """ProviderConfig from parsed values; endpoint and model are required
    unless a mock-responses file stands in for the real provider."""
    endpoint = values.get("provider.endpoint", "")
    model = values.get("provider.model", "")
    if "provider.mock_responses" not in values:
        if not endpoint:
            raise ConfigError("provider.endpoint is required")
        if not model:
            raise ConfigError("provider.model is required")
    try:
        return ProviderConfig(
            endpoint=endpoint or "mock://",
            model=model or "mock",
            api_key_env=values.get("provider.api_key_env") or None,
            timeout_s=_get_float(values, "provider.timeout_s", 30.0),
            max_retries=_get_int(values, "provider.max_retries", 2),
            parallelism=_get_int(values, "provider.parallelism", 4),
            backoff_base_s=_get_float(values, "provider.backoff_base_s", 0.5),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def mock_responses_path(values: dict[str, str]) -> Path | None:
    raw = values.get("provider.mock_responses")
    if raw is None:
        return None
    path = Path(raw)
    if not path.exists():
        raise ConfigError(f"provider.mock_responses file not found: {path}")
    return path


@dataclass(frozen=True)
class ServiceConfig:
    host: str = DEFAULT_HOST
    port: int = DEFAULT_PORT
    data_dir: Path = Path("sessions")
    audio_dir: Path | None = None
    reference_dir: Path | None = None
    cors_origins: tuple[str, ...] = ()
    provider: ProviderConfig | None = None
    mock_responses: Path | None = None

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ConfigError(f"port out of range: {self.port}")
        for label, directory in (
            ("data_dir", self.data_dir),
            ("audio_dir", self.audio_dir),
            ("reference_dir", self.reference_dir),
        ):
            if directory is not None and not Path(directory).is_dir():
                raise ConfigError(f"{label} is not a readable directory: {directory}")


def build_service_config(values: dict[str, str]) -> ServiceConfig:
    if "service.data_dir" not in values:
        raise ConfigError("service.data_dir is required")
    provider = None
    if any(k in values for k in _PROVIDER_KEYS):
        provider = build_provider_config(values)
    origins = tuple(
        o.strip()
        for o in values.get("service.cors_origins", "").split(",")
        if o.strip()
    )
    return ServiceConfig(
        host=values.get("service.host", DEFAULT_HOST),
        port=_get_int(values, "service.port", DEFAULT_PORT),
        data_dir=Path(values["service.data_dir"]),
        audio_dir=Path(values["service.audio_dir"]) if "service.audio_dir" in values else None,
        reference_dir=(
            Path(values["service.reference_dir"])
            if "service.reference_dir" in values
            else None
        ),
        cors_origins=origins,
        provider=provider,
        mock_responses=mock_responses_path(values),
    )
