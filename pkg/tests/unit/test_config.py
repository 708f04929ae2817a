"""
Test Suite for Configuration Loading

YAML engine settings, window parsing and command-line overrides.
"""

from pathlib import Path

import pytest
from pydantic import ValidationError

from src.config_parser import ConfigParser, EngineConfig, LoggingConfig, RunConfig, golden_dir, parse_window
from src.exceptions import BadInputError

ROOT = Path(__file__).resolve().parents[2]


class TestWindows:
    """Degree windows from strings and sequences."""

    def test_string_forms(self):
        assert parse_window("-24:0") == (-24, 0)
        assert parse_window([-3, 2]) == (-3, 2)
        assert parse_window(None) is None

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_window("-24")
        with pytest.raises(ValueError):
            parse_window("2:1")


class TestEngineConfig:
    """Validation of engine settings."""

    def test_defaults(self):
        config = EngineConfig()
        assert config.precision == 6
        assert config.window is None
        assert config.logging.level == "WARNING"

    def test_window_from_string(self):
        assert EngineConfig(window="-10:0").window == (-10, 0)

    def test_precision_bounds(self):
        with pytest.raises(ValidationError):
            EngineConfig(precision=0)

    def test_log_level_normalized(self):
        assert LoggingConfig(level="debug").level == "DEBUG"
        with pytest.raises(ValidationError):
            LoggingConfig(level="chatty")

    def test_run_needs_operands(self):
        with pytest.raises(ValidationError):
            RunConfig(command="tor", left="F")
        assert RunConfig(command="polytope", inputs=["K", "4"]).format == "grid"


class TestConfigParser:
    """Loading YAML files and merging overrides."""

    def setup_method(self):
        self.parser = ConfigParser()

    def test_shipped_default(self):
        config = self.parser.load_config(ROOT / "config" / "default_config.yml")
        assert config.precision == 6
        assert config.n_max == 6
        assert config.bar_max_dim == 4000

    def test_engine_block(self, tmp_path):
        path = tmp_path / "run.yml"
        path.write_text("engine:\n  precision: 3\n  window: '-11:0'\n  logging:\n    level: info\n")
        config = self.parser.load_config(path)
        assert config.precision == 3
        assert config.window == (-11, 0)
        assert config.logging.level == "INFO"

    def test_missing_explicit_file(self, tmp_path):
        with pytest.raises(BadInputError):
            self.parser.load_config(tmp_path / "absent.yml")

    def test_invalid_values(self, tmp_path):
        path = tmp_path / "bad.yml"
        path.write_text("engine:\n  precision: -1\n")
        with pytest.raises(BadInputError):
            self.parser.load_config(path)

    def test_broken_yaml(self, tmp_path):
        path = tmp_path / "broken.yml"
        path.write_text("engine: [unclosed\n")
        with pytest.raises(BadInputError):
            self.parser.load_config(path)

    def test_merge_skips_none(self, tmp_path):
        path = tmp_path / "run.yml"
        path.write_text("engine:\n  precision: 3\n")
        self.parser.load_config(path)
        config = self.parser.merge({"precision": None, "n_max": 2, "level": "ERROR", "json_logs": True})
        assert config.precision == 3
        assert config.n_max == 2
        assert config.logging.level == "ERROR"
        assert config.logging.json_logs

    def test_merge_validates(self):
        with pytest.raises(BadInputError):
            self.parser.merge({"r_max": 0})

    def test_golden_dir_override(self, monkeypatch, tmp_path):
        monkeypatch.setenv("PIN2HOMALG_GOLDEN_DIR", str(tmp_path))
        assert golden_dir() == tmp_path
