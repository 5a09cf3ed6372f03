"""Exact computations with finite subsets of solvable matrix groups.

Approximate-group and control certificates, covering and growth lemmas as
executable operations, and a recursive decomposition of small-tripling sets
of upper-triangular matrices into a large piece of a nilpotent coset.
"""

__version__ = "0.1.0"

from .engine import (
    DecompositionReport,
    EngineConfig,
    assemble_control,
    corner_intersection,
    corner_power,
    decompose,
    ratio_partition,
)
from .errors import (
    ApproxGroupsError,
    CapExceeded,
    DimensionError,
    NotUpperTriangularError,
    ParseError,
    PreconditionError,
    ScalarError,
)
from .growth import (
    ApproximateGroupCertificate,
    ControlCertificate,
    GrowthReport,
    certify_approximate_group,
    certify_control,
    compose_control,
    fiber_stats,
    finite_index_reduce,
    growth_stats,
    hom_tripling_report,
    intersection_growth,
    ruzsa_cover,
    solymosi_statistic,
)
from .matrix import (
    JordanPair,
    Matrix,
    commutator,
    corner_extract,
    corner_make,
    diag,
    diag_ratio,
    elementary,
    identity,
    jordan_split,
    mat_inv,
    mat_mul,
    pi_prime_project,
    pi_project,
)
from .nilpotency import (
    NilpotencyVerdict,
    group_ball,
    nested_commutator,
    nilpotency_step,
    ordered_progression,
)
from .scalar import GaussianRational, Rational, gq, gq_arith, gq_canonicalize
from .sets import (
    GroupSet,
    GrowthCap,
    intersect_subgroup,
    inverse_set,
    pm_power_set,
    power_set,
    product_set,
    symmetrize,
)

__all__ = [
    "ApproxGroupsError",
    "ApproximateGroupCertificate",
    "CapExceeded",
    "ControlCertificate",
    "DecompositionReport",
    "DimensionError",
    "EngineConfig",
    "GaussianRational",
    "GroupSet",
    "GrowthCap",
    "GrowthReport",
    "JordanPair",
    "Matrix",
    "NilpotencyVerdict",
    "NotUpperTriangularError",
    "ParseError",
    "PreconditionError",
    "Rational",
    "ScalarError",
    "assemble_control",
    "certify_approximate_group",
    "certify_control",
    "commutator",
    "compose_control",
    "corner_extract",
    "corner_intersection",
    "corner_make",
    "corner_power",
    "decompose",
    "diag",
    "diag_ratio",
    "elementary",
    "fiber_stats",
    "finite_index_reduce",
    "gq",
    "gq_arith",
    "gq_canonicalize",
    "group_ball",
    "growth_stats",
    "hom_tripling_report",
    "identity",
    "intersect_subgroup",
    "intersection_growth",
    "inverse_set",
    "jordan_split",
    "mat_inv",
    "mat_mul",
    "nested_commutator",
    "nilpotency_step",
    "ordered_progression",
    "pi_prime_project",
    "pi_project",
    "pm_power_set",
    "power_set",
    "product_set",
    "ratio_partition",
    "ruzsa_cover",
    "solymosi_statistic",
    "symmetrize",
]
