"""TOML scenario configuration with dotted-path overrides.

The file mirrors ScenarioConfig: [world], [schedule], [auxiliary],
[auxiliary.gap], [extractor], [extractor.train], [head], [sampling]
sections plus top-level composition, eval_seeds and output_dir.  Any field
can be overridden on the command line as ``--set section.field=value``.
"""

from __future__ import annotations

import json
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigurationError, DataFormatError
from .runner import ScenarioConfig


def load_config(path) -> ScenarioConfig:
    d = load_config_dict(path)
    return ScenarioConfig.from_dict(d)


def load_config_dict(path) -> dict:
    try:
        blob = Path(path).read_bytes()
    except OSError as err:
        raise DataFormatError(f"cannot read config {path}: {err}") from err
    try:
        return tomllib.loads(blob.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as err:
        raise DataFormatError(f"malformed config {path}: {err}") from err


def parse_override_value(text: str):
    """Scalar or list literal; anything that is not JSON is a plain string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(d: dict, assignments) -> dict:
    """Apply ``section.field=value`` assignments to a nested config dict."""
    for raw in assignments:
        if "=" not in raw:
            raise ConfigurationError(f"override must look like path.to.field=value, got {raw!r}")
        dotted, value = raw.split("=", 1)
        parts = [p for p in dotted.strip().split(".") if p]
        if not parts:
            raise ConfigurationError(f"empty override path in {raw!r}")
        node = d
        for part in parts[:-1]:
            nxt = node.setdefault(part, {})
            if not isinstance(nxt, dict):
                raise ConfigurationError(f"{dotted}: {part!r} is not a section")
            node = nxt
        node[parts[-1]] = parse_override_value(value.strip())
    return d
