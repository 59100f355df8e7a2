#!/usr/bin/env python3
"""Tests for formatting helpers, JSON I/O, artifacts and configuration."""

import io
import json
import logging
import sys
from logging.handlers import RotatingFileHandler

import numpy as np
import pytest

from src.config import THREADS_ENV_VAR, config
from src.exceptions import InputError
from src.logging_utils import get_logger, setup_logging
from src.results_store import ResultStore
from src.utils import (
    dump_json,
    format_float,
    format_mean_sd,
    format_time,
    get_visual_width,
    json_safe,
    load_json,
    pad_string,
    print_dynamic_table,
    write_text,
)


class TestFormatting:
    """Tests for text formatting."""

    @pytest.mark.parametrize(
        "seconds, expected", [(5, "5s"), (65, "1m 5s"), (3725, "1h 2m 5s")]
    )
    def test_format_time(self, seconds, expected):
        """Should render hours, minutes and seconds."""
        assert format_time(seconds) == expected

    def test_format_float(self):
        """Should switch to scientific notation for tiny or huge values."""
        assert format_float(None) == "-"
        assert format_float(0.5) == "0.5000"
        assert format_float(1e-7) == "1.000e-07"
        assert format_float(3) == "3"
        assert format_float(True) == "True"

    def test_format_mean_sd(self):
        """Should join mean and sd, or give '-' when there is no data."""
        assert format_mean_sd({"mean": 0.25, "sd": 0.01}, 2) == "0.25 ± 0.01"
        assert format_mean_sd({"mean": None}) == "-"

    def test_visual_width_of_combining_marks(self):
        """Should measure θ̂ as one column."""
        assert get_visual_width("θ̂") == 1
        assert pad_string("θ̂", 4, "right") == "   θ̂"

    def test_table_alignment(self):
        """Should print rows padded to a common width."""
        out = io.StringIO()
        print_dynamic_table([{"a": "x", "b": "1.0"}], {"a": "ε⁺", "b": "Value"}, stream=out)
        lines = [line for line in out.getvalue().splitlines() if line]
        assert "ε⁺" in lines[1] and "Value" in lines[1]
        assert get_visual_width(lines[1].rstrip()) <= get_visual_width(lines[0])


class TestJson:
    """Tests for JSON helpers."""

    def test_json_safe(self):
        """Should convert numpy types and map non-finite floats to None."""
        data = json_safe({"a": np.float64(1.5), "b": np.int64(3), "c": np.array([1.0, np.inf]),
                          "d": (1, 2), "e": np.bool_(True), "f": float("nan")})
        assert data == {"a": 1.5, "b": 3, "c": [1.0, None], "d": [1, 2], "e": True, "f": None}

    def test_dump_json_round_trips_floats(self):
        """Should keep shortest round-trip float representations."""
        value = 0.1 + 0.2
        assert json.loads(dump_json({"x": value}))["x"] == value

    def test_load_json_errors(self, tmp_path):
        """Should report missing files and malformed JSON with their position."""
        with pytest.raises(InputError):
            load_json(str(tmp_path / "missing.json"))
        broken = tmp_path / "broken.json"
        broken.write_text('{\n  "n": ,\n}')
        with pytest.raises(InputError, match="line 2"):
            load_json(str(broken))

    def test_write_text_errors(self, tmp_path):
        """Should report an unwritable path as an input error."""
        with pytest.raises(InputError, match="Cannot write"):
            write_text(str(tmp_path / "missing" / "x.json"), "{}")


class TestResultStore:
    """Tests for campaign artifacts."""

    def test_trials_csv(self, tmp_path):
        """Should write 17-digit floats, lowercase booleans and empty cells for None."""
        store = ResultStore(str(tmp_path / "out"))
        path = store.write_trials([{"trial": 0, "x": 0.1, "ok": True, "r": None}])
        lines = open(path, encoding="utf-8").read().splitlines()
        assert lines == ["trial,x,ok,r", "0,0.10000000000000001,true,"]

    def test_summary_meta_first(self, tmp_path):
        """Should put the meta block before the summary keys."""
        store = ResultStore(str(tmp_path))
        path = store.write_summary({"mode": "pareto", "eps": float("inf")}, {"version": "x"})
        data = json.loads(open(path, encoding="utf-8").read())
        assert list(data) == ["meta", "mode", "eps"]
        assert data["eps"] is None

    def test_blocked_directory(self, tmp_path):
        """Should report a directory that cannot be created as an input error."""
        (tmp_path / "taken").write_text("")
        with pytest.raises(InputError, match="Cannot create directory"):
            ResultStore(str(tmp_path / "taken" / "out"))

    def test_subdir(self, tmp_path):
        """Should nest labeled settings and keep unlabeled ones in place."""
        store = ResultStore(str(tmp_path))
        assert store.subdir("") is store
        assert store.subdir("n_20").out_dir == str(tmp_path / "n_20")
        assert (tmp_path / "n_20").is_dir()

    def test_front_file(self, tmp_path):
        """Should name front files by trial."""
        path = ResultStore(str(tmp_path)).write_front(3, {"trial": 3, "full_front": []})
        assert path.endswith("front_3.json")


class TestConfig:
    """Tests for configuration lookups."""

    def test_defaults_present(self):
        """Should expose the numeric defaults used by the command line."""
        assert config.get("default_tau") is not None
        assert config.get("no_such_key", 42) == 42

    def test_worker_count_precedence(self, monkeypatch):
        """Should prefer an explicit request, then the environment variable."""
        monkeypatch.setenv(THREADS_ENV_VAR, "3")
        assert config.worker_count(2) == 2
        assert config.worker_count() == 3
        monkeypatch.setenv(THREADS_ENV_VAR, "many")
        assert config.worker_count() >= 1
        assert config.worker_count(0) == 1

    def test_log_settings(self):
        """Should translate the log settings into setup_logging arguments."""
        settings = config.log_settings()
        assert set(settings) == {"log_folder", "log_basename", "max_bytes", "backup_count"}
        assert settings["max_bytes"] == int(config.get("max_log_size_mb") * 1024 * 1024)


class TestLogging:
    """Tests for logging setup."""

    def test_setup_replaces_handlers(self, tmp_path):
        """Should attach one file and one stderr handler, even when called twice."""
        root = logging.getLogger()
        saved = list(root.handlers)
        try:
            setup_logging(str(tmp_path), "t", verbose=True)
            setup_logging(str(tmp_path), "t", verbose=False)
            assert len(root.handlers) == 2
            console = [h for h in root.handlers if not isinstance(h, RotatingFileHandler)]
            assert console[0].stream is sys.stderr
            assert console[0].level == logging.INFO
            get_logger("src.test").info("hello")
            assert (tmp_path / "t_0.log").exists()
        finally:
            for handler in list(root.handlers):
                root.removeHandler(handler)
                handler.close()
            for handler in saved:
                root.addHandler(handler)
            logging.captureWarnings(False)
