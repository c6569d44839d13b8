"""cantorlab: a numerical laboratory for regular Cantor sets.

Construct Cantor sets from expanding Markov maps, measure fractal
invariants (box and Moran dimension, thickness), form arithmetic sums
and differences, scan one-parameter projections, certify robust
intersections through recurrent regions of relative positions, compute
best-rational-approximation spectra from continued fractions, and probe
simple hyperbolic dynamics (affine horseshoes, a linear torus map, the
standard family).
"""

from .cantor_core import (
    AffineMap,
    BranchMap,
    Cover,
    Interval,
    MarkovPartition,
    MembershipResult,
    MoebiusMap,
    RegularCantorSet,
    build_affine,
    contains,
    cover_to_csv,
    dump_set,
    gauss_cantor,
    load_set,
    refine,
    refine_to_length,
    resolve_budget,
    scale_affine,
    set_from_json,
    set_to_json,
)
from .catalog import CatalogEntry, builtin_names, get_set, list_builtin_sets
from .dimension import (
    DimensionEstimate,
    ThicknessEstimate,
    box_dimension,
    hausdorff_dimension_moran,
    interval_box_dimension,
    moran_drift,
    moran_root,
    nonuniform_condition,
    thickness,
)
from .dynamics import (
    AffineHorseshoe,
    CatMapReport,
    HorseshoeReport,
    LyapunovReport,
    cat_map_check,
    enumerate_torus_periodic_points,
    horseshoe_cantor_sets,
    horseshoe_dimension,
    solve_unit_dimension,
    standard_family_lyapunov,
)
from .errors import (
    BudgetExceeded,
    CantorLabError,
    ConfigInvalid,
    ContractionViolation,
    DegenerateCover,
    EmptyTarget,
    EstimatorMismatch,
    NoGaps,
    NonAffineInput,
    NonContiguousTransitions,
    NonMixingTransitions,
    OverlappingPieces,
    PrecisionExhausted,
    PrecisionLoss,
    ResourceError,
    TZeroNotInDifference,
    ValidationError,
)
from .intersect import (
    DensityProfile,
    DifferenceProfile,
    GapLemmaResult,
    IntersectionOutcome,
    PositionRegion,
    RelativePosition,
    SearchOutcome,
    d_stable_probe,
    difference_scan,
    gap_lemma_test,
    intersect_test,
    perturb_set,
    position_to_sets,
    recurrent_compact_search,
    region_to_json,
    renormalization_sensitivity,
    save_certificate,
    tangency_density_experiment,
    verify_certificate,
)
from .setops import (
    IntervalUnion,
    ProjectionScan,
    contains_interval,
    covered_length,
    cover_sum,
    marstrand_scan,
    measure_estimate,
    merge_intervals,
    union_from_cover,
)
from .spectra import (
    CFSequence,
    HalflineHit,
    SpectrumValue,
    cf_expand,
    cf_value,
    convergents,
    hall_halfline_probe,
    k_alpha,
    lagrange_sample,
    spectrum_csv,
    two_sided_values,
)
from .surd import QuadraticSurd, periodic_tail_value, periodic_value

__version__ = "1.0.0"

__all__ = [
    "AffineHorseshoe",
    "AffineMap",
    "BranchMap",
    "BudgetExceeded",
    "CFSequence",
    "CantorLabError",
    "CatMapReport",
    "CatalogEntry",
    "ConfigInvalid",
    "ContractionViolation",
    "Cover",
    "DegenerateCover",
    "DensityProfile",
    "DifferenceProfile",
    "DimensionEstimate",
    "EmptyTarget",
    "EstimatorMismatch",
    "GapLemmaResult",
    "HalflineHit",
    "HorseshoeReport",
    "Interval",
    "IntersectionOutcome",
    "IntervalUnion",
    "LyapunovReport",
    "MarkovPartition",
    "MembershipResult",
    "MoebiusMap",
    "NoGaps",
    "NonAffineInput",
    "NonContiguousTransitions",
    "NonMixingTransitions",
    "OverlappingPieces",
    "PositionRegion",
    "PrecisionExhausted",
    "PrecisionLoss",
    "ProjectionScan",
    "QuadraticSurd",
    "RegularCantorSet",
    "RelativePosition",
    "ResourceError",
    "SearchOutcome",
    "SpectrumValue",
    "TZeroNotInDifference",
    "ThicknessEstimate",
    "ValidationError",
    "box_dimension",
    "build_affine",
    "cat_map_check",
    "cf_expand",
    "cf_value",
    "contains",
    "contains_interval",
    "convergents",
    "cover_sum",
    "cover_to_csv",
    "covered_length",
    "d_stable_probe",
    "difference_scan",
    "dump_set",
    "enumerate_torus_periodic_points",
    "gap_lemma_test",
    "gauss_cantor",
    "get_set",
    "hall_halfline_probe",
    "hausdorff_dimension_moran",
    "horseshoe_cantor_sets",
    "horseshoe_dimension",
    "intersect_test",
    "interval_box_dimension",
    "k_alpha",
    "lagrange_sample",
    "builtin_names",
    "list_builtin_sets",
    "load_set",
    "marstrand_scan",
    "measure_estimate",
    "merge_intervals",
    "moran_drift",
    "moran_root",
    "nonuniform_condition",
    "periodic_tail_value",
    "periodic_value",
    "perturb_set",
    "position_to_sets",
    "recurrent_compact_search",
    "refine",
    "refine_to_length",
    "region_to_json",
    "renormalization_sensitivity",
    "resolve_budget",
    "save_certificate",
    "scale_affine",
    "set_from_json",
    "set_to_json",
    "solve_unit_dimension",
    "spectrum_csv",
    "standard_family_lyapunov",
    "tangency_density_experiment",
    "thickness",
    "two_sided_values",
    "union_from_cover",
    "verify_certificate",
]
