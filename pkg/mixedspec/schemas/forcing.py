# mixedspec/schemas/forcing.py
from enum import Enum
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SpatialKind(str, Enum):
    """Valid spatial profile kinds"""
    SINE_MODE = "sine_mode"
    POLY_BUBBLE = "poly_bubble"
    SAMPLED_PROFILE = "sampled_profile"


class TemporalKind(str, Enum):
    """Valid temporal profile kinds"""
    POLYNOMIAL = "polynomial"
    TRIG = "trig"
    EXPONENTIAL = "exponential"
    SAMPLED_SIGNAL = "sampled_signal"


class SineModeSchema(BaseModel):
    kind: Literal["sine_mode"] = "sine_mode"
    k: int = Field(..., ge=1, description="Mode index of the sine profile", examples=[1])

    model_config = ConfigDict(frozen=True, extra="forbid")


class PolyBubbleSchema(BaseModel):
    kind: Literal["poly_bubble"] = "poly_bubble"
    amplitude: float = Field(1.0, description="Scale of x(p - x)", examples=[1.0])

    model_config = ConfigDict(frozen=True, extra="forbid")


class SampledProfileSchema(BaseModel):
    kind: Literal["sampled_profile"] = "sampled_profile"
    values: List[float] = Field(
        ...,
        min_length=2,
        description="Samples on a uniform grid spanning [0, p], endpoints included",
        examples=[[0.0, 0.5, 1.0, 0.5, 0.0]],
    )

    model_config = ConfigDict(frozen=True, extra="forbid")


class PolynomialSchema(BaseModel):
    kind: Literal["polynomial"] = "polynomial"
    coefficients: List[float] = Field(
        ...,
        min_length=1,
        description="Coefficients in ascending powers of t",
        examples=[[1.0, 0.0, 2.0]],
    )

    model_config = ConfigDict(frozen=True, extra="forbid")


class TrigSchema(BaseModel):
    kind: Literal["trig"] = "trig"
    amplitude: float = Field(1.0, description="Amplitude of sin(omega t + phase)")
    omega: float = Field(..., description="Angular frequency", examples=[2.0])
    phase: float = Field(0.0, description="Phase in radians")

    model_config = ConfigDict(frozen=True, extra="forbid")


class ExponentialSchema(BaseModel):
    kind: Literal["exponential"] = "exponential"
    amplitude: float = Field(1.0, description="Amplitude of exp(rate t)")
    rate: float = Field(..., description="Growth rate", examples=[-1.0])

    model_config = ConfigDict(frozen=True, extra="forbid")


class SampledSignalSchema(BaseModel):
    kind: Literal["sampled_signal"] = "sampled_signal"
    values: List[float] = Field(
        ...,
        min_length=2,
        description="Samples on a uniform grid spanning [-T, T], endpoints included",
    )

    model_config = ConfigDict(frozen=True, extra="forbid")


SpatialSchema = Annotated[
    Union[SineModeSchema, PolyBubbleSchema, SampledProfileSchema],
    Field(discriminator="kind"),
]

TemporalSchema = Annotated[
    Union[PolynomialSchema, TrigSchema, ExponentialSchema, SampledSignalSchema],
    Field(discriminator="kind"),
]


class ForcingTermSchema(BaseModel):
    """One separable term spatial(x) * temporal(t)."""
    spatial: SpatialSchema
    temporal: TemporalSchema

    model_config = ConfigDict(frozen=True, extra="forbid")


class ForcingSchema(BaseModel):
    """Right-hand side f(x, t) as a sum of catalog terms, or the explicit zero forcing."""
    terms: List[ForcingTermSchema] = Field(default_factory=list)
    zero: bool = Field(False, description="Set to true for f = 0; terms must then be empty")
    smoothness_alpha: Optional[float] = Field(
        None,
        gt=0,
        lt=1,
        description="Claimed Hoelder exponent of df/dx, used by decay diagnostics",
        examples=[0.5],
    )

    @field_validator("terms", mode="before")
    @classmethod
    def check_terms_is_list(cls, v):
        if not isinstance(v, list):
            raise ValueError("Terms should be a valid list")
        return v

    @model_validator(mode="after")
    def validate_zero_flag(self) -> "ForcingSchema":
        if self.zero and self.terms:
            raise ValueError("A zero forcing cannot also list terms")
        if not self.zero and not self.terms:
            raise ValueError("Forcing needs at least one term, or zero: true")
        return self

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "examples": [
                {"zero": True},
                {
                    "terms": [
                        {
                            "spatial": {"kind": "sine_mode", "k": 1},
                            "temporal": {"kind": "polynomial", "coefficients": [1.0]},
                        }
                    ]
                },
            ]
        },
    )
