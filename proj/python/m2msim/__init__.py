"""Python access to the m2m slice simulator."""

import json

from ._m2msim import (
    ConfigError,
    IoError,
    OracleSizeError,
    effective_config as _effective_config,
    posterior_idle,
    solve_policy as _solve_policy,
    sweep as _sweep,
    uplink_rate,
)

__all__ = [
    "ConfigError",
    "IoError",
    "OracleSizeError",
    "effective_config",
    "posterior_idle",
    "solve_policy",
    "sweep",
    "uplink_rate",
]


def _text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return json.dumps(config)


def effective_config(config=None):
    """Configuration with every default filled in."""
    return json.loads(_effective_config(_text(config)))


def sweep(axis, config=None):
    """List of result rows for axis 'cycles' or 'mtcs'."""
    return _sweep(axis, _text(config))


def solve_policy(config=None, mtc=0):
    """Serialized POMDP policy of one active device."""
    return json.loads(_solve_policy(_text(config), mtc))
