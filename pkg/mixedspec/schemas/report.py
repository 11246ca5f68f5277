# mixedspec/schemas/report.py
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from mixedspec.schemas.config import Tolerances

# Reports may carry +inf (uncertified tail bounds); JSON writes it as a string
REPORT_CONFIG = ConfigDict(frozen=True, ser_json_inf_nan="strings")


class ViolationCode(str, Enum):
    """Machine-readable reasons a forcing is rejected"""
    BOUNDARY_NONZERO = "BOUNDARY_NONZERO"
    SEAM_DISCONTINUITY = "SEAM_DISCONTINUITY"
    SMOOTHNESS_OUT_OF_RANGE = "SMOOTHNESS_OUT_OF_RANGE"
    NONFINITE_SAMPLES = "NONFINITE_SAMPLES"
    DOMAIN_MISMATCH = "DOMAIN_MISMATCH"


class Violation(BaseModel):
    code: ViolationCode
    message: str

    model_config = REPORT_CONFIG


class TailBasis(str, Enum):
    """How a tail bound was obtained"""
    BAND_LIMITED = "band_limited"
    FITTED = "fitted"
    EXTRAPOLATED = "extrapolated"


class DecayFit(BaseModel):
    """Power law C * n**rate fitted to coefficient magnitudes."""
    C: float = Field(..., description="Fitted amplitude")
    rate: float = Field(..., description="Fitted log-log slope")
    points: int = Field(..., ge=0, description="Coefficients used by the fit")
    basis: TailBasis = TailBasis.FITTED

    model_config = REPORT_CONFIG


class RegionResiduals(BaseModel):
    linf: float = Field(..., ge=0)
    l2: float = Field(..., ge=0, description="Discrete L2 norm, sqrt(sum r^2 dx dt)")
    points: int = Field(..., ge=0)

    model_config = REPORT_CONFIG


class ResidualReport(BaseModel):
    """Residuals u_tt - u_xx - f on the hyperbolic part and u_t + u_xx - f on the parabolic part."""
    spectral_plus: RegionResiduals
    spectral_minus: RegionResiduals
    stencil_plus: RegionResiduals
    stencil_minus: RegionResiduals
    forcing_truncation: float = Field(..., ge=0, description="max |f - f_N| on the grid")
    hyperbolic_via_ode_identity: bool = Field(
        False, description="u_tt came from the mode ODE because f'' is unavailable"
    )
    nx: int
    nt: int

    model_config = REPORT_CONFIG


class ConjugationReport(BaseModel):
    """Largest jumps of u, u_t and u_tt across t = 0 over the x samples."""
    jump_u: float
    jump_ut: float
    jump_utt: Optional[float] = Field(None, description="None when u_tt is not checked")
    utt_checked: bool
    probe_jump_u: float = Field(..., description="One-sided difference estimate at +-offset")
    probe_jump_ut: float
    probe_jump_utt: Optional[float] = None
    samples: int
    probe_offset: float

    model_config = REPORT_CONFIG


class BoundCheck(BaseModel):
    name: str
    lhs: float
    rhs: float
    passed: bool

    model_config = REPORT_CONFIG


class UniquenessReport(BaseModel):
    zero_coefficients_exact: bool
    zero_fields_max: float
    probe_mode: int = Field(..., description="Mode the forcing of the round trip is aligned with")
    roundtrip_error: float = Field(..., description="Projected vs stored amplitude of that mode")
    orthogonality_error: float = Field(..., description="Largest projected amplitude of another mode")
    ode_residual_hyp: Optional[float] = Field(None, description="None when u_tt is unavailable")
    ode_residual_par: float
    passed: bool

    model_config = REPORT_CONFIG


class PrintedFormCheck(BaseModel):
    """Expanded derivative form vs the ODE-identity value, corrected and as printed."""
    form: str
    n: int
    t: float
    corrected_discrepancy: float
    printed_discrepancy: float
    passed: bool

    model_config = REPORT_CONFIG


class FdCrossCheck(BaseModel):
    nx: int
    nt: int
    deviation_plus: float
    deviation_minus: float
    seam_velocity_scale: float = 1.0
    note: str = "seeded from spectral seam data; checks the equation, not uniqueness"

    model_config = REPORT_CONFIG


class WallLimitProbe(BaseModel):
    x_left: float
    x_right: float
    value_left: float = Field(..., description="max_t |x u_x| near x = 0")
    value_right: float = Field(..., description="max_t |(p - x) u_x| near x = p")
    u_max: float
    passed: bool

    model_config = REPORT_CONFIG


class TailReport(BaseModel):
    n_modes: int
    bounds: Dict[str, float] = Field(..., description="Tail bound per field over the whole rectangle")
    basis: TailBasis
    certified: bool

    model_config = REPORT_CONFIG


class VerificationReport(BaseModel):
    """Outcome of every check run against one solution."""
    n_modes: int
    residuals: ResidualReport
    boundary_max: float
    conjugation: ConjugationReport
    bound_checks: List[BoundCheck]
    decay_fit: Optional[DecayFit] = None
    tail: TailReport
    uniqueness: UniquenessReport
    printed_forms: List[PrintedFormCheck]
    fd_cross_check: Optional[FdCrossCheck] = None
    wall_limit: Optional[WallLimitProbe] = None
    warnings: List[str] = Field(default_factory=list)
    tolerances: Tolerances
    failures: List[str] = Field(default_factory=list, description="Names of failed checks")
    passed: bool

    model_config = REPORT_CONFIG


class DegeneracyScan(BaseModel):
    """cos(lambda_n T) + lambda_n sin(lambda_n T) for n = 1..n_max."""
    p: float
    T: float
    lambdas: List[float]
    values: List[float]
    min_abs: float
    argmin: int = Field(..., ge=1, description="Mode index of the smallest |value|")

    model_config = REPORT_CONFIG


class ConvergenceRow(BaseModel):
    n: int
    errors: Dict[str, float]
    coefficient: float = Field(..., description="max_t |f_n| of the last kept mode")

    model_config = REPORT_CONFIG


class ConvergenceTable(BaseModel):
    reference_n: int
    rows: List[ConvergenceRow]
    slopes: Dict[str, Optional[float]] = Field(
        ..., description="Log-log slope of error vs N per field, None when errors vanish"
    )

    model_config = REPORT_CONFIG


class SolutionMeta(BaseModel):
    n_modes: int
    tail: TailReport
    decay_fit: Optional[DecayFit] = None
    utt_available: bool
    warnings: List[str] = Field(default_factory=list)
    tolerances: Tolerances
    config_hash: str

    model_config = REPORT_CONFIG


class SelftestRow(BaseModel):
    name: str
    passed: bool
    detail: str
    seconds: float
    time_limit: float = Field(..., description="Expected runtime on a desktop core; informational")

    model_config = REPORT_CONFIG


class SelftestReport(BaseModel):
    """selftest_report.json; the timings make it the one output that is not byte-stable."""
    seed: int
    passed: bool
    rows: List[SelftestRow]

    model_config = REPORT_CONFIG
