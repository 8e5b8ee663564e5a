"""
Config Loader Utility
Reads experiment TOML files, applies --set overrides and validates the
result into an ExperimentConfig.
"""
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from ddsim.exceptions import ConfigError
from ddsim.models.schemas import ExperimentConfig


SECTIONS = ("experiment", "grid", "model", "schedule", "friedrichs_lee", "output")

# Default to config/experiments relative to project root
PRESETS_DIR = Path(__file__).parent.parent.parent / "config" / "experiments"


class DDSimSettings(BaseSettings):
    """Environment settings; only the output directory is read from the environment."""
    model_config = SettingsConfigDict(env_prefix="DDSIM_", env_file=".env", extra="ignore")

    out: Optional[str] = None


def parse_override(override: str) -> tuple:
    """
    Split "section.key=value" into (section, key, value).

    The value is read as a TOML value (numbers, booleans, arrays, quoted
    strings) and falls back to the raw string.
    """
    if "=" not in override:
        raise ConfigError(f"Override '{override}' is not of the form section.key=value")
    path, raw = override.split("=", 1)
    if path.count(".") != 1:
        raise ConfigError(f"Override '{override}' must name exactly section.key")
    section, key = (part.strip() for part in path.split("."))
    if section not in SECTIONS:
        raise ConfigError(f"Unknown config section '{section}' in override '{override}'")
    if not key:
        raise ConfigError(f"Override '{override}' has an empty key")
    try:
        value = tomllib.loads(f"value = {raw.strip()}")["value"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return section, key, value


def apply_overrides(document: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Return a copy of document with every override applied in order."""
    merged = {section: dict(values) for section, values in document.items()}
    for override in overrides:
        section, key, value = parse_override(override)
        merged.setdefault(section, {})[key] = value
    return merged


def _format_errors(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def build_config(document: Dict[str, Any]) -> ExperimentConfig:
    """Validate a raw TOML document."""
    unknown = [section for section in document if section not in SECTIONS]
    if unknown:
        raise ConfigError(f"Unknown config section(s): {', '.join(sorted(unknown))}")
    try:
        return ExperimentConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {_format_errors(e)}") from e


def read_document(path: Union[str, Path]) -> Dict[str, Any]:
    """Parse a TOML file into a plain dict."""
    path = Path(path)
    if not path.exists():
        preset = PRESETS_DIR / f"{path.stem}.toml"
        if path.suffix == "" and preset.exists():
            path = preset
        else:
            raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Cannot parse {path}: {e}") from e


def load_config(path: Union[str, Path], overrides: Optional[List[str]] = None) -> ExperimentConfig:
    """
    Load, override and validate an experiment configuration.

    Args:
        path: TOML file, or the bare name of a preset in config/experiments
        overrides: "section.key=value" strings applied after reading

    Returns:
        The validated ExperimentConfig
    """
    document = apply_overrides(read_document(path), overrides or [])
    return build_config(document)


def resolve_output_dir(config: ExperimentConfig, cli_out: Optional[str] = None) -> Path:
    """--out wins over DDSIM_OUT, which wins over [output] dir."""
    if cli_out:
        return Path(cli_out)
    env_out = DDSimSettings().out
    if env_out:
        return Path(env_out)
    return Path(config.output.dir)


def list_presets() -> List[str]:
    """Names of the shipped preset configurations."""
    if not PRESETS_DIR.exists():
        return []
    return sorted(p.stem for p in PRESETS_DIR.glob("*.toml"))
