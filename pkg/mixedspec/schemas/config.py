# mixedspec/schemas/config.py
import hashlib
import json
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from mixedspec.models.domain import RectDomain
from mixedspec.schemas.forcing import ForcingSchema


class TruncationMode(str, Enum):
    """Valid truncation modes"""
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


class TruncationPolicy(BaseModel):
    """Either a fixed mode count N, or adaptive growth until the tail bound is under tail_tol."""
    mode: TruncationMode = Field(TruncationMode.FIXED, description="fixed or adaptive")
    n: Optional[int] = Field(None, ge=1, description="Mode count for fixed truncation", examples=[16])
    tail_tol: Optional[float] = Field(None, gt=0, description="Target tail bound for adaptive truncation")
    n_cap: int = Field(256, ge=1, description="Hard maximum mode count")

    @model_validator(mode="after")
    def validate_policy(self) -> "TruncationPolicy":
        if self.mode == TruncationMode.FIXED:
            if self.n is None:
                raise ValueError("Fixed truncation needs n")
            if self.n_cap < self.n:
                raise ValueError("n_cap must be at least n")
        elif self.tail_tol is None:
            raise ValueError("Adaptive truncation needs tail_tol")
        return self

    @classmethod
    def fixed(cls, n: int, n_cap: Optional[int] = None) -> "TruncationPolicy":
        return cls(mode=TruncationMode.FIXED, n=n, n_cap=max(n, n_cap or n))

    @classmethod
    def adaptive(cls, tail_tol: float, n_cap: int = 256) -> "TruncationPolicy":
        return cls(mode=TruncationMode.ADAPTIVE, tail_tol=tail_tol, n_cap=n_cap)

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "examples": [
                {"mode": "fixed", "n": 1},
                {"mode": "adaptive", "tail_tol": 1e-8, "n_cap": 256},
            ]
        },
    )


class GridConfig(BaseModel):
    nx: int = Field(101, ge=3, description="Uniform x nodes including both walls")
    nt: int = Field(101, ge=3, description="Uniform t nodes over [-T, T]")

    model_config = ConfigDict(frozen=True, extra="forbid")


class Tolerances(BaseModel):
    """Absolute tolerances used by solve and verify."""
    quadrature: float = Field(1e-12, gt=0)
    residual: float = Field(1e-7, gt=0)
    jump: float = Field(1e-9, gt=0)
    boundary: float = Field(1e-15, gt=0)
    ode: float = Field(1e-7, gt=0)
    roundtrip: float = Field(1e-9, gt=0)

    model_config = ConfigDict(frozen=True, extra="forbid")


class VerifyOptions(BaseModel):
    trials: int = Field(100, ge=1, description="Randomized trials per integral bound")
    conjugation_samples: int = Field(33, ge=2, description="x samples for the seam jumps")
    probe_offset: float = Field(1e-4, gt=0, description="Offset of the one-sided difference probes")
    fd_grid: int = Field(101, ge=3, description="Grid size of the finite-difference cross-check")
    inject_b_perturbation: Optional[float] = Field(
        None, description="Perturb b_1 by this amount before verifying (detector regression)"
    )

    model_config = ConfigDict(frozen=True, extra="forbid")


class ConvergeOptions(BaseModel):
    n_list: List[int] = Field(default_factory=lambda: [4, 8, 16, 32], min_length=1)
    reference_n: int = Field(128, ge=2)

    @field_validator("n_list")
    @classmethod
    def validate_n_list(cls, v: List[int]) -> List[int]:
        if any(n < 1 for n in v):
            raise ValueError("Mode counts in n_list must be at least 1")
        return sorted(set(v))

    @model_validator(mode="after")
    def validate_reference(self) -> "ConvergeOptions":
        if self.reference_n <= max(self.n_list):
            raise ValueError("reference_n must exceed every entry of n_list")
        return self

    model_config = ConfigDict(frozen=True, extra="forbid")


class ScanOptions(BaseModel):
    n_max: int = Field(50, ge=1)

    model_config = ConfigDict(frozen=True, extra="forbid")


class RunConfig(BaseModel):
    """A complete batch run: geometry, forcing, truncation and per-command options."""
    domain: RectDomain
    forcing: ForcingSchema
    truncation: TruncationPolicy = Field(default_factory=lambda: TruncationPolicy.adaptive(1e-8))
    grid: GridConfig = Field(default_factory=GridConfig)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    verify: VerifyOptions = Field(default_factory=VerifyOptions)
    converge: ConvergeOptions = Field(default_factory=ConvergeOptions)
    scan: ScanOptions = Field(default_factory=ScanOptions)
    output_dir: str = Field("out", description="Directory for result files")
    seed: int = Field(0, ge=0, description="Seed for every randomized check")

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "example": {
                "domain": {"p": 1.0, "T": 1.0},
                "forcing": {
                    "terms": [
                        {
                            "spatial": {"kind": "poly_bubble", "amplitude": 1.0},
                            "temporal": {"kind": "polynomial", "coefficients": [1.0]},
                        }
                    ],
                    "smoothness_alpha": 0.5,
                },
                "truncation": {"mode": "adaptive", "tail_tol": 1e-8, "n_cap": 256},
            }
        },
    )

    def canonical_json(self) -> str:
        """Sorted-key JSON of everything that affects results; output_dir is left out."""
        return json.dumps(self.model_dump(mode="json", by_alias=True, exclude={"output_dir"}), sort_keys=True,
                          separators=(",", ":"))

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON dump."""
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()
