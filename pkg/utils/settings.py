"""
Flat key=value settings files
Dotted keys (stream.global.depth=5) expand into nested dictionaries
"""

from pathlib import Path
from typing import Any, Dict, Iterable, Tuple, Union

from .errors import ArtifactIOError, ConfigurationError


def parse_settings_lines(lines: Iterable[str], source: str = "<settings>") -> Dict[str, Any]:
    """
    Parse key=value lines into a nested dictionary.

    Args:
        lines: Raw text lines
        source: Name used in error messages

    Returns:
        Nested dictionary keyed by the dotted path segments (values stay strings)

    Raises:
        ConfigurationError: On malformed lines, empty keys or duplicate keys
    """
    tree: Dict[str, Any] = {}
    seen: Dict[str, int] = {}

    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{number}: expected key=value, got '{line}'")

        key, value = (part.strip() for part in line.split("=", 1))
        parts = key.split(".")
        if not key or any(not part for part in parts):
            raise ConfigurationError(f"{source}:{number}: invalid key '{key}'")
        if key in seen:
            raise ConfigurationError(
                f"{source}:{number}: duplicate key '{key}' (first set on line {seen[key]})"
            )
        seen[key] = number

        node = tree
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigurationError(f"{source}:{number}: '{key}' conflicts with a scalar key")
            node = child
        if isinstance(node.get(parts[-1]), dict):
            raise ConfigurationError(f"{source}:{number}: '{key}' conflicts with a section")
        node[parts[-1]] = value

    return tree


def load_settings_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Read and parse a settings file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(path, f"cannot read settings file ({exc.strerror or exc})") from exc
    return parse_settings_lines(text.splitlines(), source=str(path))


def flatten_settings(tree: Dict[str, Any], prefix: str = "") -> Tuple[Tuple[str, str], ...]:
    """Inverse of parse_settings_lines: sorted (dotted key, value) pairs."""
    items = []
    for key in sorted(tree):
        value = tree[key]
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            items.extend(flatten_settings(value, prefix=f"{dotted}."))
        else:
            if isinstance(value, (list, tuple)):
                value = ",".join(str(v) for v in value)
            items.append((dotted, str(value)))
    return tuple(items)
