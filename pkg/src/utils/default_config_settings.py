import json
import logging
import os
import uuid
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.fuzzy.fuzzy_number import DEFAULT_ALPHA_LEVELS
from src.wave.domain_search import DEFAULT_REFINE_TOL

logger = logging.getLogger(__name__)


def default_config():
    """Prepare the default configuration"""
    return {
        "m": 1,
        "resolution": None,
        "alpha_levels": DEFAULT_ALPHA_LEVELS,
        "epsilon": 0.0,
        "refine_tol": DEFAULT_REFINE_TOL,
        "coeff": "1,2,3",
        "output": None,
        "format": "csv",
        "step": 0.05,
        "scan_resolution": 0.01,
        "residual_h": 1e-3,
        "threads": None,
    }


class RunConfig(BaseModel):
    """Validated settings shared by every subcommand"""

    model_config = ConfigDict(extra="ignore")

    subcommand: Optional[str] = None
    m: int = Field(default=1, ge=0)
    resolution: Optional[float] = None
    alpha_levels: int = Field(default=DEFAULT_ALPHA_LEVELS, ge=2)
    epsilon: float = Field(default=0.0, ge=0.0)
    refine_tol: float = DEFAULT_REFINE_TOL
    coeff: str = "1,2,3"
    output: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    step: float = 0.05
    scan_resolution: float = 0.01
    residual_h: float = 1e-3
    threads: Optional[int] = Field(default=None, ge=1)

    @field_validator("resolution", "refine_tol", "step", "scan_resolution", "residual_h")
    @classmethod
    def _positive(cls, v: Optional[float], info) -> Optional[float]:
        if v is not None and not v > 0:
            raise ValueError(f"{info.field_name} must be positive, got {v}")
        return v


def load_config_from_file(config_file):
    """Load settings from a JSON file; keys not in the defaults are dropped with a warning."""
    with open(config_file, "r", encoding="utf-8") as f:
        settings = json.load(f)
    if not isinstance(settings, dict):
        raise ValueError(f"configuration file {config_file} must hold a JSON object")
    known = default_config()
    unknown = sorted(set(settings) - set(known))
    if unknown:
        logger.warning(f"Ignoring unknown configuration keys: {', '.join(unknown)}")
    return {k: v for k, v in settings.items() if k in known}


def save_config_to_file(settings, save_dir="./tmp/fuzzywave_settings"):
    """Save the settings to a JSON file with a UUID name and return its path."""
    os.makedirs(save_dir, exist_ok=True)
    config_file = os.path.join(save_dir, f"{uuid.uuid4()}.json")
    with open(config_file, "w", encoding="utf-8") as f:
        json.dump(settings, f, indent=2)
    logger.info(f"Configuration saved to {config_file}")
    return config_file
