"""Sharp modulus of uniform convexity of L^p spaces, numerically certified.

The sharp constant is computed by explicit formulas (closed form for
p >= 2, a slice-parameter root for 1 < p < 2) and certified three separate
ways: affine tangent-plane certificates verified by grid scans, LP
concavification of sampled boundary data, and derivative-free maximization
over step-function pairs.
"""

from .bellman import (
    BruteForceResult,
    SearchBudget,
    StepFunction,
    StepPair,
    brute_force_bellman,
    format_witness,
    hanner_gap,
    moment,
    payoff,
    witness_test,
)
from .certificates import (
    Certificate,
    VerificationReport,
    certificate_ge2,
    certificate_lt2,
    majorization_gap,
    monotonicity_witness,
    sharpness_check,
    verify_appendix,
)
from .domain import (
    BoundaryFace,
    BoundaryProfile,
    LambdaPoint,
    boundary_profile,
    boundary_value,
    contains,
    slice_lower_bound,
    slice_point,
)
from .envelope import EnvelopeQuery, ObstacleGrid, concavify, envelope_slice, sample_boundary
from .moduli import SStar, delta, delta_closed_form, delta_implicit, delta_via_s_star, solve_s_star
from .numerics import Bracket, LpProblem, bisect_root, central_diff, scan_extremum, solve_lp

__all__ = [
    "Bracket",
    "BoundaryFace",
    "BoundaryProfile",
    "BruteForceResult",
    "Certificate",
    "EnvelopeQuery",
    "LambdaPoint",
    "LpProblem",
    "ObstacleGrid",
    "SStar",
    "SearchBudget",
    "StepFunction",
    "StepPair",
    "VerificationReport",
    "bisect_root",
    "boundary_profile",
    "boundary_value",
    "brute_force_bellman",
    "central_diff",
    "certificate_ge2",
    "certificate_lt2",
    "concavify",
    "contains",
    "delta",
    "delta_closed_form",
    "delta_implicit",
    "delta_via_s_star",
    "envelope_slice",
    "format_witness",
    "hanner_gap",
    "majorization_gap",
    "moment",
    "monotonicity_witness",
    "payoff",
    "sample_boundary",
    "scan_extremum",
    "sharpness_check",
    "slice_lower_bound",
    "slice_point",
    "solve_lp",
    "solve_s_star",
    "verify_appendix",
    "witness_test",
]
