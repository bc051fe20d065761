"""
Workspace Module
Handles saving and loading flat key = value configuration files.

A configuration file holds one `key = value` pair per line; `#` starts a
comment. Reports embed their resolved configuration as commented lines after
a `# [config]` marker, and Workspace.load reads such a block back.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional

from analysis.errors import ConfigurationError
from .config import CONFIG_BLOCK_MARKER

logger = logging.getLogger(__name__)


def parse_key_values(text: str, source: str = '<text>') -> Dict[str, str]:
    """
    Parse `key = value` lines.

    Args:
        text: File content
        source: Name used in error messages

    Returns:
        Ordered mapping of keys to raw string values

    Raises:
        ConfigurationError: On a line without '=' or a repeated key
    """
    lines = text.splitlines()
    if any(line.strip() == CONFIG_BLOCK_MARKER for line in lines):
        lines = _embedded_block(lines)

    values: Dict[str, str] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigurationError(None, f"{source}:{number}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        if not key:
            raise ConfigurationError(None, f"{source}:{number}: empty key")
        if key in values:
            raise ConfigurationError(key, f"{source}:{number}: repeated key")
        values[key] = value
    return values


def _embedded_block(lines: Iterable[str]) -> list:
    block = []
    inside = False
    for line in lines:
        stripped = line.strip()
        if stripped == CONFIG_BLOCK_MARKER:
            inside = True
            continue
        if not inside:
            continue
        if not stripped.startswith('#'):
            break
        block.append(stripped[1:].strip())
    return block


def format_key_values(values: Mapping[str, object]) -> str:
    return "".join(f"{key} = {value}\n" for key, value in values.items())


def config_block(values: Mapping[str, object]) -> str:
    """Commented configuration block for embedding in reports."""
    lines = [CONFIG_BLOCK_MARKER]
    lines.extend(f"# {key} = {value}" for key, value in values.items())
    return "\n".join(lines) + "\n"


def apply_overrides(values: Mapping[str, str], overrides: Iterable[str]) -> Dict[str, str]:
    """
    Apply command-line `key=value` overrides on top of a parsed configuration.

    Raises:
        ConfigurationError: If an override has no '='
    """
    merged = dict(values)
    for item in overrides:
        if '=' not in item:
            raise ConfigurationError(None, f"override {item!r} is not key=value")
        key, value = (part.strip() for part in item.split('=', 1))
        if not key:
            raise ConfigurationError(None, f"override {item!r} has an empty key")
        merged[key] = value
    return merged


class Workspace:
    """Class for managing configuration save/load operations."""

    @staticmethod
    def save(filepath: str, values: Mapping[str, object]) -> bool:
        """
        Save a configuration as key = value lines.

        Args:
            filepath: Path to save the configuration file
            values: Configuration mapping

        Returns:
            True if successful, False otherwise
        """
        try:
            Path(filepath).write_text(format_key_values(values))
            return True
        except OSError as e:
            logger.error("Error saving configuration to %s: %s", filepath, e)
            return False

    @staticmethod
    def load(filepath: str) -> Optional[Dict[str, str]]:
        """
        Load a configuration file or the config block embedded in a report.

        Args:
            filepath: Path to the configuration or report file

        Returns:
            Mapping of raw values, or None if the file cannot be read

        Raises:
            ConfigurationError: If the content is malformed
        """
        path = Path(filepath)
        if not path.exists():
            logger.error("Configuration file not found: %s", filepath)
            return None
        try:
            text = path.read_text()
        except OSError as e:
            logger.error("Error loading configuration %s: %s", filepath, e)
            return None
        return parse_key_values(text, source=str(filepath))
