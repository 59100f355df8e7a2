#!/usr/bin/env python3
"""
Settings for ring-chord, read once from ring_chord_config.json at the project root.

The file is created with defaults on first use. Missing keys fall back to their
defaults and numeric settings of the wrong type are replaced by the default.
"""

import json
import os
import sys
from typing import Any, Callable, Dict, Optional

THREADS_ENV_VAR = "RING_CHORD_THREADS"


class Config:
    _instance: Optional["Config"] = None
    _loaded = False

    PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
    CONFIG_FILE = os.path.join(PROJECT_ROOT, "ring_chord_config.json")

    DEFAULT_CONFIG: Dict[str, Any] = {
        "log_folder": os.path.join(PROJECT_ROOT, "logs"),
        "log_basename": "ring_chord",
        "max_log_size_mb": 5,
        "max_log_backups": 10,
        "default_tau": 0.1,  # AW-RBAPS window, fraction of S
        "default_modes": 12,  # low-frequency mode count m
        "default_budget": 100.0,  # chord conductance w
        "threads": None,  # None -> all cores
        "sim_sigma": 1.0,
        "sim_paths": 200,
    }

    # settings that must convert cleanly; everything else is taken as stored
    TYPED_KEYS: Dict[str, Callable[[Any], Any]] = {
        "max_log_size_mb": float,
        "max_log_backups": int,
        "default_tau": float,
        "default_modes": int,
        "default_budget": float,
        "sim_sigma": float,
        "sim_paths": int,
    }

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not self._loaded:
            self._settings = self._load()
            self._loaded = True

    def _load(self) -> Dict[str, Any]:
        stored: Dict[str, Any] = {}
        if os.path.exists(self.CONFIG_FILE):
            try:
                with open(self.CONFIG_FILE, "r", encoding="utf-8") as f:
                    stored = json.load(f)
            except (json.JSONDecodeError, OSError) as e:
                _warn(f"Ignoring unreadable {self.CONFIG_FILE}: {e}")
            if not isinstance(stored, dict):
                _warn(f"Ignoring {self.CONFIG_FILE}: top level is not an object")
                stored = {}
        else:
            self._write_defaults()

        settings = {**self.DEFAULT_CONFIG, **stored}
        for key, cast in self.TYPED_KEYS.items():
            try:
                settings[key] = cast(settings[key])
            except (TypeError, ValueError):
                _warn(f"Setting {key}={settings[key]!r} is not a {cast.__name__}; using the default")
                settings[key] = self.DEFAULT_CONFIG[key]
        return settings

    def _write_defaults(self) -> None:
        try:
            with open(self.CONFIG_FILE, "w", encoding="utf-8") as f:
                json.dump(self.DEFAULT_CONFIG, f, indent=4)
        except OSError as e:
            _warn(f"Could not create {self.CONFIG_FILE}: {e}")

    def get(self, key: str, default: Any = None) -> Any:
        """
        Look up a setting.

        Args:
            key: Setting name
            default: Returned when the key is unknown

        Returns:
            The stored value, its built-in default, or ``default``
        """
        return self._settings.get(key, default)

    def log_settings(self) -> Dict[str, Any]:
        """Keyword arguments for :func:`src.logging_utils.setup_logging`."""
        return {
            "log_folder": self._settings["log_folder"],
            "log_basename": self._settings["log_basename"],
            "max_bytes": int(self._settings["max_log_size_mb"] * 1024 * 1024),
            "backup_count": self._settings["max_log_backups"],
        }

    def worker_count(self, requested: Optional[int] = None) -> int:
        """
        Number of worker processes for a campaign.

        An explicit request wins, then RING_CHORD_THREADS, then the ``threads``
        setting, then every available core.

        Args:
            requested: Explicit worker count, if any

        Returns:
            int: A worker count >= 1
        """
        if requested is not None:
            return max(1, int(requested))

        env_value = os.environ.get(THREADS_ENV_VAR)
        if env_value:
            try:
                return max(1, int(env_value))
            except ValueError:
                _warn(f"Ignoring non-integer {THREADS_ENV_VAR}={env_value!r}")

        threads = self._settings.get("threads")
        if threads:
            return max(1, int(threads))
        return os.cpu_count() or 1


def _warn(message: str) -> None:
    # logging is not configured yet when settings load
    print(f"Warning: {message}", file=sys.stderr)


config = Config()
