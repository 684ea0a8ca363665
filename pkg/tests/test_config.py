"""Tests for configuration loading and validation."""
import pytest
from pydantic import ValidationError

from fblab.config import (
    Config,
    KernelConfig,
    LoggingConfig,
    RatioConfig,
    RunConfig,
    RuntimeSettings,
    get_config,
    load_config,
    set_config,
)


def test_defaults_without_file(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path))
    config = load_config()
    assert config.ratio.truncation == 512
    assert config.kernel.tolerance == 1e-10
    assert config.run is None


def test_missing_explicit_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "missing.yaml"))


def test_flat_keys_become_run_section(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("nu: 0.5\nsetting: lebesgue\nkernel:\n  t_min: 0.01\n", encoding="utf-8")
    config = load_config(str(path))
    assert config.run == {"nu": 0.5, "setting": "lebesgue"}
    assert config.kernel.t_min == 0.01


def test_non_mapping_file(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_config(str(path))


def test_invalid_section_value(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("ratio:\n  truncation: 5\n", encoding="utf-8")
    with pytest.raises(ValidationError):
        load_config(str(path))


def test_log_level_normalized():
    assert LoggingConfig(level="debug").level == "DEBUG"
    with pytest.raises(ValidationError):
        LoggingConfig(level="loud")


@pytest.mark.parametrize("values", [
    {"setting": "essential"},
    {"setting": "essential", "nu": -1.0},
    {"setting": "jacobi", "alpha": 0.5},
    {"setting": "jacobi", "alpha": -1.5, "beta": 0.0},
    {"setting": "essential", "nu": 0.0, "grid": 1},
    {"setting": "essential", "nu": 0.0, "tolerance": 0.0},
    {"setting": "hyperbolic", "nu": 0.0},
])
def test_run_preconditions(values):
    with pytest.raises(ValidationError):
        RunConfig(**values)


def test_kernel_config_keeps_base_policy():
    base = KernelConfig(max_exponent=4.0, truncation=40)
    run = RunConfig(nu=0.0, tolerance=1e-8, t_min=0.01)
    merged = run.kernel_config(base)
    assert merged.max_exponent == 4.0
    assert merged.truncation == 40
    assert merged.tolerance == 1e-8
    assert merged.t_min == 0.01
    assert RunConfig(nu=0.0, truncation=12).kernel_config(base).truncation == 12


def test_ratio_truncation_floor():
    with pytest.raises(ValidationError):
        RatioConfig(truncation=9)


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("FBLAB_THREADS", "0")
    assert RuntimeSettings().threads == 1
    monkeypatch.setenv("FBLAB_THREADS", "3")
    assert RuntimeSettings().threads == 3


def test_global_config():
    config = Config()
    set_config(config)
    assert get_config() is config
