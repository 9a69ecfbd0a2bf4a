"""
Experiment configuration.

A config file is flat key=value text read with python-dotenv. Values resolve in
this order, later wins: field defaults, the config file, FAILCLUSTER_<KEY>
environment variables, command line flags.
"""

import logging
import os
from typing import Literal, Optional, Tuple

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from failcluster.cluster import MountainParams
from failcluster.errors import ConfigurationError
from failcluster.faultgen.corpus import FaultTypeClass
from failcluster.formulas import RefId, representatives, resolve_refs

logger = logging.getLogger(__name__)

ENV_PREFIX = "FAILCLUSTER_"


def _split(value):
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return value


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    corpus_dir: Optional[str] = Field(default=None, description="Load versions from this directory instead of generating")
    generator: Literal["synthetic", "micro"] = Field(default="synthetic", description="Corpus generator used when no corpus_dir is given")
    nofs: Tuple[int, ...] = Field(default=(2, 3, 4, 5), description="Numbers of faults per version")
    versions_per_level: int = Field(default=5, ge=1, description="Versions generated per factor level")
    fault_types: Tuple[FaultTypeClass, ...] = Field(default=tuple(FaultTypeClass), description="Fault type classes for the micro generator")
    n_failed_per_fault: int = Field(default=3, ge=1, description="Synthetic failed tests per planted fault")
    n_passed: int = Field(default=20, ge=1, description="Synthetic passed tests per version")
    n_statements: int = Field(default=40, ge=1, description="Synthetic statements per version")
    noise: float = Field(default=0.0, ge=0.0, lt=1.0, description="Synthetic coverage bit-flip probability")
    background: float = Field(default=0.5, ge=0.0, le=1.0, description="Probability a passed test covers a passed-only statement")
    suite_size: int = Field(default=200, ge=1, description="Random inputs per micro program")
    refs: Tuple[RefId, ...] = Field(default=representatives(), description="Risk evaluation formulas, GroupN names or all-groups")
    nsp1f: Tuple[float, ...] = Field(default=(1.0,), description="Fractions of passed tests paired with each failed test")
    bandwidth_scale: float = Field(default=1.0, gt=0.0, description="Mountain method bandwidth multiplier")
    revision_sharpening: float = Field(default=2.0, gt=0.0, description="Mountain method revision sharpening")
    stop_ratio: float = Field(default=0.15, gt=0.0, lt=1.0, description="Mountain method stopping share of the first potential")
    winsor_lower: float = Field(default=5.0, ge=0.0, le=100.0, description="Lower winsorization percentile")
    winsor_upper: float = Field(default=95.0, ge=0.0, le=100.0, description="Upper winsorization percentile")
    averaging: Literal["micro", "macro"] = Field(default="micro", description="How PR/RR combine over clusters")
    seed: int = Field(ge=0, lt=2 ** 64, description="Root seed of every random stream")
    out_dir: str = Field(default="reports", description="Directory receiving CSV tables and the manifest")
    workers: int = Field(default=1, ge=1, description="Threads evaluating versions in parallel")

    @field_validator("nofs", "fault_types", mode="before")
    @classmethod
    def _comma_list(cls, value):
        return _split(value)

    @field_validator("nofs")
    @classmethod
    def _positive_nofs(cls, value):
        if not value or min(value) < 1:
            raise ValueError("at least one number of faults, each >= 1")
        return value

    @field_validator("refs", mode="before")
    @classmethod
    def _resolve_refs(cls, value):
        if isinstance(value, str):
            return resolve_refs(value)
        return tuple(RefId.parse(v) if isinstance(v, str) else v for v in value)

    @field_validator("nsp1f", mode="before")
    @classmethod
    def _fractions(cls, value):
        fractions = []
        for item in _split(value):
            fraction = float(item)
            # percent values are accepted too
            fractions.append(fraction / 100.0 if fraction > 1.0 else fraction)
        return fractions

    @field_validator("nsp1f")
    @classmethod
    def _fractions_in_range(cls, value):
        if not value:
            raise ValueError("at least one fraction is required")
        for fraction in value:
            if not 0.0 < fraction <= 1.0:
                raise ValueError(f"fraction {fraction} outside (0, 1]")
        return value

    @model_validator(mode="after")
    def _check(self):
        if not self.refs:
            raise ValueError("at least one risk evaluation formula is required")
        if self.winsor_lower >= self.winsor_upper:
            raise ValueError("winsor_lower must be below winsor_upper")
        return self

    @property
    def mountain(self):
        return MountainParams(
            bandwidth_scale=self.bandwidth_scale,
            revision_sharpening=self.revision_sharpening,
            stop_ratio=self.stop_ratio,
            winsor_lower=self.winsor_lower,
            winsor_upper=self.winsor_upper,
        )


def _from_environment(environ):
    values = {}
    for name in ExperimentConfig.model_fields:
        key = ENV_PREFIX + name.upper()
        if environ.get(key) not in (None, ""):
            values[name] = environ[key]
    return values


def load_config(path=None, overrides=None, environ=None):
    """Resolve an ExperimentConfig from defaults, file, environment and overrides."""
    values = {}
    if path is not None:
        if not os.path.exists(path):
            raise ConfigurationError("config", f"file {path} not found")
        values.update({k.strip().lower(): v for k, v in dotenv_values(path).items()
                       if v is not None})
    values.update(_from_environment(os.environ if environ is None else environ))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})

    unknown = sorted(set(values) - set(ExperimentConfig.model_fields))
    if unknown:
        raise ConfigurationError(unknown[0], "unknown configuration key")
    try:
        cfg = ExperimentConfig(**values)
    except ValidationError as exc:
        error = exc.errors()[0]
        field = ".".join(str(part) for part in error["loc"]) or "config"
        raise ConfigurationError(field, error["msg"]) from exc
    logger.debug("Resolved configuration: %s", cfg.model_dump(mode="json"))
    return cfg
