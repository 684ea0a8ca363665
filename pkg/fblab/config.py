"""Configuration management for fblab."""
import os
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

SETTING_NAMES = ("natural", "lebesgue", "essential", "essential-prob", "modified", "jacobi")


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: str = "WARNING"
    file: Optional[str] = None
    max_size_mb: int = 10
    backup_count: int = 5
    colorize: bool = True
    format: str = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}"

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        """Validate log level name."""
        levels = {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}
        if v.upper() not in levels:
            raise ValueError(f"Unknown log level: {v}")
        return v.upper()


class ZeroConfig(BaseModel):
    """Bessel zero search configuration."""
    scan_step: float = 0.25
    max_iterations: int = 100
    tolerance: float = 1e-13

    @field_validator("scan_step")
    @classmethod
    def validate_scan_step(cls, v: float) -> float:
        """Scan step must stay well below the zero spacing."""
        if not 0 < v <= 1.0:
            raise ValueError(f"scan_step must lie in (0, 1], got {v}")
        return v


class RatioConfig(BaseModel):
    """Mittag-Leffler sum configuration for the ratio functions."""
    truncation: int = 512
    table_factor: int = 4

    @field_validator("truncation")
    @classmethod
    def validate_truncation(cls, v: int) -> int:
        """Truncation below 10 terms is rejected."""
        if v < 10:
            raise ValueError(f"truncation must be >= 10, got {v}")
        return v


class QuadratureConfig(BaseModel):
    """Composite Gauss rule configuration."""
    panels: Optional[int] = None
    order: int = 16
    grading_ratio: float = 0.2
    validation_tolerance: float = 1e-12

    @field_validator("panels")
    @classmethod
    def validate_panels(cls, v: Optional[int]) -> Optional[int]:
        """At least four panels."""
        if v is not None and v < 4:
            raise ValueError(f"panels must be >= 4, got {v}")
        return v

    @field_validator("order")
    @classmethod
    def validate_order(cls, v: int) -> int:
        """At least eight nodes per panel."""
        if v < 8:
            raise ValueError(f"order must be >= 8, got {v}")
        return v

    @field_validator("grading_ratio")
    @classmethod
    def validate_grading_ratio(cls, v: float) -> float:
        """Grading ratio strictly between 0 and 1."""
        if not 0 < v < 1:
            raise ValueError(f"grading_ratio must lie in (0, 1), got {v}")
        return v


class KernelConfig(BaseModel):
    """Truncation and tolerance policy for eigenfunction-series kernels."""
    truncation: Optional[int] = None
    tolerance: float = 1e-10
    t_min: float = 1e-3
    max_exponent: float = 8.0

    @field_validator("truncation")
    @classmethod
    def validate_truncation(cls, v: Optional[int]) -> Optional[int]:
        """Truncation must be positive when given."""
        if v is not None and v < 1:
            raise ValueError(f"truncation must be >= 1, got {v}")
        return v

    @field_validator("tolerance", "t_min", "max_exponent")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Positive reals only."""
        if not v > 0:
            raise ValueError(f"value must be positive, got {v}")
        return v


class VerifyConfig(BaseModel):
    """Verification harness configuration."""
    seed: int = 20240917
    samples: int = 100
    baselines: Optional[str] = None
    strict: bool = False


class RunConfig(BaseModel):
    """Parameters of a single CLI run, validated before any computation."""
    setting: Literal["natural", "lebesgue", "essential", "essential-prob", "modified", "jacobi"] = "essential"
    nu: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    truncation: Optional[int] = None
    tolerance: float = 1e-10
    t_min: float = 1e-3
    grid: int = 64
    output: Optional[str] = None
    format: Literal["json", "csv"] = "json"

    @field_validator("grid")
    @classmethod
    def validate_grid(cls, v: int) -> int:
        """Grids need at least two points."""
        if v < 2:
            raise ValueError(f"grid must be >= 2, got {v}")
        return v

    @field_validator("tolerance", "t_min")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Positive reals only."""
        if not v > 0:
            raise ValueError(f"value must be positive, got {v}")
        return v

    @model_validator(mode="after")
    def validate_parameters(self) -> "RunConfig":
        """Check the order parameters required by the chosen setting."""
        if self.setting == "jacobi":
            if self.alpha is None or self.beta is None:
                raise ValueError("jacobi setting requires alpha and beta")
            if not (self.alpha > -1 and self.beta > -1):
                raise ValueError(f"alpha, beta must be > -1, got ({self.alpha}, {self.beta})")
        else:
            if self.nu is None:
                raise ValueError(f"{self.setting} setting requires nu")
            if not self.nu > -1:
                raise ValueError(f"nu must be > -1, got {self.nu}")
        return self

    def kernel_config(self, base: Optional[KernelConfig] = None) -> KernelConfig:
        """Kernel policy implied by this run, on top of ``base``."""
        base = base or KernelConfig()
        return base.model_copy(update={
            "truncation": self.truncation if self.truncation is not None else base.truncation,
            "tolerance": self.tolerance,
            "t_min": self.t_min,
        })


class RuntimeSettings(BaseSettings):
    """Process-level settings read from the environment."""
    model_config = SettingsConfigDict(env_prefix="FBLAB_")

    threads: int = Field(default_factory=lambda: min(8, os.cpu_count() or 1))

    @field_validator("threads")
    @classmethod
    def validate_threads(cls, v: int) -> int:
        """At least one worker."""
        return max(1, v)


class Config(BaseModel):
    """Root configuration model."""
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    zeros: ZeroConfig = Field(default_factory=ZeroConfig)
    ratio: RatioConfig = Field(default_factory=RatioConfig)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    kernel: KernelConfig = Field(default_factory=KernelConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    run: Optional[dict] = None


SECTIONS = ("logging", "zeros", "ratio", "quadrature", "kernel", "verify", "run")


def load_config(config_path: Optional[str] = None) -> Config:
    """
    Load configuration from YAML file.

    Top-level keys that are not section names are collected into the
    ``run`` section, so a flat ``nu: 0.5`` file is accepted.

    Args:
        config_path: Path to config file. If None, searches in standard
            locations and falls back to defaults.

    Returns:
        Config object with validated settings.

    Raises:
        FileNotFoundError: If an explicit config file is missing.
        ValueError: If config validation fails.
    """
    if config_path is None:
        search_paths = [
            "config/fblab.yaml",
            os.path.expanduser("~/.config/fblab/config.yaml"),
        ]

        for path in search_paths:
            if os.path.exists(path):
                config_path = path
                break

        if config_path is None:
            return Config()

    if not os.path.exists(config_path):
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_path, "r", encoding="utf-8") as f:
        config_data = yaml.safe_load(f) or {}

    if not isinstance(config_data, dict):
        raise ValueError(f"Config file must contain a mapping: {config_path}")

    sectioned = {key: value for key, value in config_data.items() if key in SECTIONS}
    flat = {key: value for key, value in config_data.items() if key not in SECTIONS}
    if flat:
        sectioned["run"] = {**(sectioned.get("run") or {}), **flat}

    return Config(**sectioned)


# Global config instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get the global config instance."""
    global _config
    if _config is None:
        _config = load_config()
    return _config


def set_config(config: Config) -> None:
    """Set the global config instance."""
    global _config
    _config = config
