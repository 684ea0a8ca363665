"""Frozen ratio caps and Calderón bands, loaded from and written back to YAML."""
import math
from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple

import yaml
from loguru import logger
from pydantic import BaseModel, Field, field_validator

from fblab.schemas import CalderonReport, RatioReport
from fblab.utils.exceptions import ConfigurationError

DEFAULT_PATH = Path(__file__).resolve().parent.parent / "data" / "baselines.yaml"
# Regenerated caps and bands keep this factor of headroom over the observed values.
HEADROOM = 2.0


class RatioBaseline(BaseModel):
    """Cap on max/min of a kernel/comparator ratio, with the horizon T it was frozen at."""

    cap: float
    horizon: float

    @field_validator("cap", "horizon")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Positive reals only."""
        if not v > 0:
            raise ValueError(f"value must be positive, got {v}")
        return v


class Baselines(BaseModel):
    """Root baseline document."""

    version: int = 1
    ratio_caps: Dict[str, RatioBaseline] = Field(default_factory=dict)
    domination_cap: float = 10.0
    calderon_bands: Dict[str, Tuple[float, float]] = Field(default_factory=dict)

    @field_validator("calderon_bands")
    @classmethod
    def validate_bands(cls, v: Dict[str, Tuple[float, float]]) -> Dict[str, Tuple[float, float]]:
        """Bands are 0 < low <= high."""
        for key, (low, high) in v.items():
            if not 0 < low <= high:
                raise ValueError(f"band {key} must satisfy 0 < low <= high, got ({low}, {high})")
        return v

    def ratio_cap(self, case: str) -> Optional[RatioBaseline]:
        return self.ratio_caps.get(case)

    def calderon_band(self, nu: float, p: float) -> Optional[Tuple[float, float]]:
        """Band for (ν, p), falling back to the ``default`` entry."""
        return self.calderon_bands.get(band_key(nu, p), self.calderon_bands.get("default"))


def band_key(nu: float, p: float) -> str:
    return f"nu={nu:g},p={p:g}"


def load_baselines(path: Optional[str] = None) -> Baselines:
    """
    Load the baseline file.

    Args:
        path: YAML file; the packaged file when None.

    Raises:
        ConfigurationError: If the file is missing or malformed.
    """
    source = Path(path) if path else DEFAULT_PATH
    if not source.exists():
        raise ConfigurationError(f"Baseline file not found: {source}")
    try:
        with open(source, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        return Baselines(**data)
    except (yaml.YAMLError, ValueError) as e:
        raise ConfigurationError(f"Invalid baseline file {source}: {e}") from e


def save_baselines(baselines: Baselines, path: Optional[str] = None) -> Path:
    """Write ``baselines`` as YAML and return the path written."""
    target = Path(path) if path else DEFAULT_PATH
    target.parent.mkdir(parents=True, exist_ok=True)
    document = baselines.model_dump(mode="json")
    with open(target, "w", encoding="utf-8") as f:
        f.write("# Frozen regression guards. Regenerate with `fblab verify --update-baselines`.\n")
        yaml.safe_dump(document, f, sort_keys=True)
    logger.info(f"Wrote baselines to {target}")
    return target


def _round_up(value: float) -> float:
    """Round up to two significant digits."""
    if value <= 0 or not math.isfinite(value):
        return value
    scale = 10.0 ** (math.floor(math.log10(value)) - 1)
    return math.ceil(value / scale) * scale


def _round_down(value: float) -> float:
    if value <= 0 or not math.isfinite(value):
        return value
    scale = 10.0 ** (math.floor(math.log10(value)) - 1)
    return math.floor(value / scale) * scale


def regenerate(
    current: Baselines,
    ratio_reports: Iterable[Tuple[str, RatioReport]] = (),
    calderon_reports: Iterable[CalderonReport] = (),
    domination: Optional[float] = None,
) -> Baselines:
    """
    New baselines from observed values, with ``HEADROOM`` on every side.

    Entries without a new observation are carried over unchanged.
    """
    caps = dict(current.ratio_caps)
    for case, report in ratio_reports:
        horizon = max(report.t_values)
        caps[case] = RatioBaseline(cap=_round_up(HEADROOM * report.spread), horizon=horizon)
    bands = dict(current.calderon_bands)
    for report in calderon_reports:
        bands[band_key(report.nu, report.p)] = (
            _round_down(report.min_ratio / HEADROOM),
            _round_up(report.max_ratio * HEADROOM),
        )
    domination_cap = current.domination_cap if domination is None else _round_up(HEADROOM * domination)
    return Baselines(version=current.version, ratio_caps=caps, domination_cap=domination_cap, calderon_bands=bands)
