"""
Experiment configuration models.

An experiment file (JSON, or YAML by extension) names one or two operators,
the spectral cutoff, tolerances and the settings of the kernel, probe and
asymptotics sections. Relative file references are resolved against the
directory of the experiment file.
"""

import math
import os
from typing import Any, Dict, List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError, ValidationInfo
from pydantic import field_validator, model_validator

from debranges_lab.entire_solution import phi_bessel, phi_regular
from debranges_lab.errors import ConfigError, PotentialError
from debranges_lab.io_utils import SCHEMA_VERSION, read_json, read_potential_table
from debranges_lab.operator_core import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    Potential,
    PotentialFunction,
    constant_potential,
    cosine_potential,
    make_bessel_potential,
    make_regular_potential,
    polynomial_potential,
    power_potential,
    zero_potential,
)


def _resolve(path: Optional[str], info: ValidationInfo) -> Optional[str]:
    if path is None or os.path.isabs(path):
        return path
    base = (info.context or {}).get("base_dir")
    return os.path.normpath(os.path.join(base, path)) if base else path


class PotentialSource(BaseModel):
    """Where q comes from: a closed-form family or a tabulated x,q CSV."""
    model_config = ConfigDict(extra="forbid")

    type: Literal["zero", "constant", "polynomial", "cosine", "power", "table"] = "zero"
    value: float = 0.0
    coefficients: List[float] = Field(default_factory=list)
    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0
    coefficient: float = 0.0
    exponent: float = 0.0
    path: Optional[str] = None

    @field_validator("path")
    @classmethod
    def _path_exists(cls, value: Optional[str], info: ValidationInfo) -> Optional[str]:
        value = _resolve(value, info)
        if value is not None and not os.path.exists(value):
            raise ValueError(f"potential table not found: {value}")
        return value

    @model_validator(mode="after")
    def _table_needs_path(self) -> "PotentialSource":
        if self.type == "table" and self.path is None:
            raise ValueError("a table potential needs a path")
        return self

    def build(self) -> PotentialFunction:
        if self.type == "zero":
            return zero_potential()
        if self.type == "constant":
            return constant_potential(self.value)
        if self.type == "polynomial":
            return polynomial_potential(self.coefficients or [0.0])
        if self.type == "cosine":
            return cosine_potential(self.amplitude, self.frequency, self.phase)
        if self.type == "power":
            return power_potential(self.coefficient, self.exponent)
        return read_potential_table(self.path)


class OperatorSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["regular", "bessel"] = "regular"
    a: float = 0.0
    b: float = math.pi
    l: float = 0.0
    potential: PotentialSource = Field(default_factory=PotentialSource)
    left_angle: float = 0.0
    right_angle: float = 0.0
    x_match: Optional[PositiveFloat] = None
    description: Optional[str] = None

    @model_validator(mode="after")
    def _check_interval(self) -> "OperatorSpec":
        if not self.b > self.a:
            raise ValueError(f"interval must satisfy b > a, got ({self.a}, {self.b})")
        if self.kind == "bessel":
            if self.a != 0.0:
                raise ValueError("Bessel operators live on (0, b)")
            if self.l < -0.5:
                raise ValueError(f"Bessel index must satisfy l >= -1/2, got {self.l}")
        if not 0.0 <= self.left_angle < math.pi:
            raise ValueError("left_angle must lie in [0, pi)")
        if not 0.0 <= self.right_angle < math.pi:
            raise ValueError("right_angle must lie in [0, pi)")
        return self

    def build_potential(self) -> Potential:
        q = self.potential.build()
        if self.kind == "bessel":
            return make_bessel_potential(self.l, self.b, q, self.description)
        return make_regular_potential(self.a, self.b, q, self.description)

    def build_solution(self, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                       max_terms: int = 200, retries: int = 8):
        """The normalized entire solution for this operator."""
        p = self.build_potential()
        if self.kind == "bessel":
            return phi_bessel(p, x_match=self.x_match, max_terms=max_terms, retries=retries, rtol=rtol, atol=atol)
        return phi_regular(p, boundary_angle=self.left_angle, rtol=rtol, atol=atol)


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    parseval: PositiveFloat = 1e-5
    kernel_duality: PositiveFloat = 1e-7
    nesting: PositiveFloat = 1e-5
    asymptotics: PositiveFloat = 1e-2
    reproducing: PositiveFloat = 1e-5
    measure: PositiveFloat = 1e-6
    slope: PositiveFloat = 1e-5
    density: PositiveFloat = 1e-5
    logderivative: PositiveFloat = 1e-5
    potential: PositiveFloat = 1e-4
    index: PositiveFloat = 1e-3
    gauge: PositiveFloat = 1e-9

    def uniqueness(self) -> Dict[str, float]:
        return {key: getattr(self, key) for key in ("measure", "slope", "density", "logderivative", "potential", "index")}


class KernelSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    c: Optional[float] = None
    pairs: PositiveInt = 20
    radius: PositiveFloat = 50.0
    diagonal_points: PositiveInt = 11
    points: List[Tuple[float, float]] = Field(default_factory=list)


class ProbeSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    count: PositiveInt = 10
    half_width_range: Tuple[PositiveFloat, PositiveFloat] = (0.6, 1.2)
    panel_width: PositiveFloat = 0.05
    inner_c: Optional[PositiveFloat] = None
    outer_c: Optional[PositiveFloat] = None

    @model_validator(mode="after")
    def _ordered(self) -> "ProbeSection":
        lo, hi = self.half_width_range
        if lo > hi:
            raise ValueError("half_width_range must be (low, high)")
        if self.inner_c is not None and self.outer_c is not None and self.inner_c >= self.outer_c:
            raise ValueError("inner_c must be smaller than outer_c")
        return self


class AsymptoticsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x: Optional[PositiveFloat] = None
    x_tilde: Optional[PositiveFloat] = None
    y_ladder: List[PositiveFloat] = Field(default_factory=lambda: [10.0, 100.0, 1000.0, 10000.0])


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: Literal["v1"] = Field(SCHEMA_VERSION, alias="schema")
    name: str
    operators: List[OperatorSpec] = Field(min_length=1, max_length=2)
    lambda_max: float = 400.0
    rtol: Optional[PositiveFloat] = None
    tolerances: Tolerances = Field(default_factory=Tolerances)
    kernel: KernelSection = Field(default_factory=KernelSection)
    probes: ProbeSection = Field(default_factory=ProbeSection)
    asymptotics: AsymptoticsSection = Field(default_factory=AsymptoticsSection)
    measure_file: Optional[str] = None
    output_dir: str = "output"
    seed: int = 42

    @field_validator("measure_file")
    @classmethod
    def _measure_exists(cls, value: Optional[str], info: ValidationInfo) -> Optional[str]:
        value = _resolve(value, info)
        if value is not None and not os.path.exists(value):
            raise ValueError(f"measure file not found: {value}")
        return value

    @property
    def primary(self) -> OperatorSpec:
        return self.operators[0]

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True, mode="json")


def parse_experiment(data: Dict[str, Any], base_dir: Optional[str] = None) -> ExperimentConfig:
    """Validate a configuration mapping; any failure becomes a ConfigError."""
    try:
        return ExperimentConfig.model_validate(data, context={"base_dir": base_dir})
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment configuration: {e}")


def load_experiment(path: str) -> ExperimentConfig:
    """Read and validate an experiment file (.json, .yaml or .yml)."""
    if not os.path.exists(path):
        raise ConfigError(f"Experiment file not found: {path}")
    if path.lower().endswith((".yaml", ".yml")):
        with open(path, "r") as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigError(f"Invalid YAML in {path}: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must contain a mapping")
    else:
        data = read_json(path)
    return parse_experiment(data, os.path.dirname(os.path.abspath(path)))


def apply_overrides(config: ExperimentConfig, tol: Optional[float] = None, lambda_max: Optional[float] = None,
                    out: Optional[str] = None, seed: Optional[int] = None) -> ExperimentConfig:
    """Global command-line flags take precedence over the file."""
    update: Dict[str, Any] = {}
    if tol is not None:
        if tol <= 0:
            raise ConfigError("--tol must be positive")
        update["rtol"] = float(tol)
    if lambda_max is not None:
        update["lambda_max"] = float(lambda_max)
    if out is not None:
        update["output_dir"] = out
    if seed is not None:
        update["seed"] = int(seed)
    return config.model_copy(update=update) if update else config


def build_operators(config: ExperimentConfig, numerics: Optional[Dict[str, Any]] = None) -> List[Any]:
    """Entire solutions for every operator in the experiment, with integrator settings applied."""
    numerics = numerics or {}
    rtol = config.rtol or float(numerics.get("rtol", DEFAULT_RTOL))
    atol = float(numerics.get("atol", DEFAULT_ATOL))
    max_terms = int(numerics.get("frobenius_max_terms", 200))
    retries = int(numerics.get("frobenius_retries", 8))
    try:
        return [spec.build_solution(rtol, atol, max_terms, retries) for spec in config.operators]
    except PotentialError as e:
        raise ConfigError(f"Operator rejected: {e}")
