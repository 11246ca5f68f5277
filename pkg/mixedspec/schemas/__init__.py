from mixedspec.schemas.config import (
    ConvergeOptions,
    GridConfig,
    RunConfig,
    ScanOptions,
    Tolerances,
    TruncationMode,
    TruncationPolicy,
    VerifyOptions,
)
from mixedspec.schemas.forcing import ForcingSchema, ForcingTermSchema
from mixedspec.schemas.report import (
    BoundCheck,
    ConjugationReport,
    ConvergenceRow,
    ConvergenceTable,
    DecayFit,
    DegeneracyScan,
    FdCrossCheck,
    PrintedFormCheck,
    RegionResiduals,
    ResidualReport,
    SelftestReport,
    SelftestRow,
    SolutionMeta,
    TailBasis,
    TailReport,
    UniquenessReport,
    VerificationReport,
    Violation,
    ViolationCode,
    WallLimitProbe,
)
