"""Subspace equivariance and invariance scores for paired activation tensors.

Given two activation tensors of the same shape -- typically a layer's
response to a batch and to a spatially transformed version of it -- the
library matricizes them so spatial cells are features, truncates each side
to its leading principal subspace, runs a stable CCA between the two, and
reports two scores: equivariance (is the information still linearly
recoverable?) and invariance (did the spatial basis itself stay aligned?).
A synthetic harness with built-in spatial transforms validates the scores
against known ground-truth regimes, and the CLI batch-scores externally
dumped layer activations.
"""

from .errors import (
    DegenerateRankError,
    DegenerateSampleError,
    DtypeError,
    FormatError,
    NumericalError,
    OracleError,
    ParseError,
    SeisError,
    ShapeError,
    ValidationError,
)
from .harness import (
    ConditionSummary,
    DEFAULT_DIMS,
    DEFAULT_SMOOTHNESS,
    DEFAULT_TRIALS,
    HarnessConfig,
    gen_synthetic_activations,
    make_alternate,
    run_condition,
    run_validation_suite,
)
from .linalg import (
    CcaResult,
    TruncatedSubspace,
    cca,
    cca_oracle,
    row_cosines,
    spatial_subspace,
    thin_svd,
    truncate_99,
)
from .matricize import CenteredMatrix, center_rows, dematricize, matricize
from .metrics import SeisScores, equivariance_score, invariance_score, seis
from .tensor_io import (
    Manifest,
    ManifestEntry,
    ResultRow,
    load_manifest,
    read_tensor,
    validate_tensor,
    write_results,
    write_tensor,
)
from .transforms import (
    AffineParams,
    CONDITION_ORDER,
    ConditionKind,
    GEOMETRIC_CONDITIONS,
    apply_affine,
    make_stream,
    permute_spatial,
    random_baseline,
    sample_params,
)

__version__ = "0.1.0"

__all__ = [
    "AffineParams",
    "CONDITION_ORDER",
    "CcaResult",
    "CenteredMatrix",
    "ConditionKind",
    "ConditionSummary",
    "DEFAULT_DIMS",
    "DEFAULT_SMOOTHNESS",
    "DEFAULT_TRIALS",
    "DegenerateRankError",
    "DegenerateSampleError",
    "DtypeError",
    "FormatError",
    "GEOMETRIC_CONDITIONS",
    "HarnessConfig",
    "Manifest",
    "ManifestEntry",
    "NumericalError",
    "OracleError",
    "ParseError",
    "ResultRow",
    "SeisError",
    "SeisScores",
    "ShapeError",
    "TruncatedSubspace",
    "ValidationError",
    "apply_affine",
    "cca",
    "cca_oracle",
    "center_rows",
    "dematricize",
    "equivariance_score",
    "gen_synthetic_activations",
    "invariance_score",
    "load_manifest",
    "make_alternate",
    "make_stream",
    "matricize",
    "permute_spatial",
    "random_baseline",
    "read_tensor",
    "row_cosines",
    "run_condition",
    "run_validation_suite",
    "sample_params",
    "seis",
    "spatial_subspace",
    "thin_svd",
    "truncate_99",
    "validate_tensor",
    "write_results",
    "write_tensor",
]
