"""Explicit Galois covers of P^d built from self-products of an elliptic curve.

Two constructions are provided: quotient by signed permutations with rational
translations, and quotient by a faithful permutation action of S_{d+1} twisted
by translations.  Both come with numerical verification of the Galois property
(the group acts simply transitively on generic fibers) and an exact integer
calculus for the associated polarizations and intersection numbers.
"""

from .covers import (
    CoverSpec,
    CriterionReport,
    SampleRecord,
    VerificationReport,
    build_cover,
    criterion_check,
    fiber_A,
    galois_verify,
    map_A,
    map_B,
    very_ample_preconditions,
)
from .elliptic import (
    FiniteSubgroupSpec,
    HomPair,
    IsogenyQuotient,
    LatticeTau,
    TorusPoint,
    eisenstein_g2_g3,
    product_point,
    quotient_lattice,
    reduce_point,
    torsion_points,
    wp,
    wp_inverse,
    wp_prime,
)
from .errors import (
    ConfigError,
    DegenerateSection,
    EllcoverError,
    ExponentMismatch,
    HighMultiplicity,
    IllConditioned,
    InvalidOrder,
    InvalidPoint,
    InvalidSubgroup,
    NoConvergence,
    NonGenericTarget,
    NonIntegralNorm,
    NotVeryAmpleWarning,
    OrderCapExceeded,
    SumNotZero,
)
from .groups import (
    AffineAutomorphism,
    FiniteActionGroup,
    build_group_A,
    build_group_B,
    is_free_at,
    orbit,
)
from .polarization import (
    PolarizationMatrix,
    SublatticeInclusion,
    chi,
    isogeny_degree_factor,
    mixed_intersection,
    norm_endomorphism,
    pullback,
    self_intersection,
)
from .symfun import (
    ProjectivePoint,
    SectionBasis,
    divisor_to_coords,
    projective_spread,
    section_zeros,
    sym_fiber,
    sym_product,
)

__version__ = "0.1.0"

__all__ = [
    "AffineAutomorphism",
    "ConfigError",
    "CoverSpec",
    "CriterionReport",
    "DegenerateSection",
    "EllcoverError",
    "ExponentMismatch",
    "FiniteActionGroup",
    "FiniteSubgroupSpec",
    "HighMultiplicity",
    "HomPair",
    "IllConditioned",
    "InvalidOrder",
    "InvalidPoint",
    "InvalidSubgroup",
    "IsogenyQuotient",
    "LatticeTau",
    "NoConvergence",
    "NonGenericTarget",
    "NonIntegralNorm",
    "NotVeryAmpleWarning",
    "OrderCapExceeded",
    "PolarizationMatrix",
    "ProjectivePoint",
    "SampleRecord",
    "SectionBasis",
    "SublatticeInclusion",
    "SumNotZero",
    "TorusPoint",
    "VerificationReport",
    "build_cover",
    "build_group_A",
    "build_group_B",
    "chi",
    "criterion_check",
    "divisor_to_coords",
    "eisenstein_g2_g3",
    "fiber_A",
    "galois_verify",
    "is_free_at",
    "isogeny_degree_factor",
    "map_A",
    "map_B",
    "mixed_intersection",
    "norm_endomorphism",
    "orbit",
    "product_point",
    "projective_spread",
    "pullback",
    "quotient_lattice",
    "reduce_point",
    "section_zeros",
    "self_intersection",
    "sym_fiber",
    "sym_product",
    "torsion_points",
    "very_ample_preconditions",
    "wp",
    "wp_inverse",
    "wp_prime",
]
