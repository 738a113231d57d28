"""Exact Hodge decomposition and transferred A-infinity structures for finite DGAs."""

from .constructions import (
    InvalidComplex,
    JacobiFailure,
    LieStructure,
    SimplicialComplex,
    chevalley_eilenberg_dga,
    simplicial_cochain_dga,
)
from .dga import (
    DGA,
    CohomologyRing,
    ParseError,
    ValidationError,
    cohomology_ring,
    from_structure_file,
    multiply,
    validate_dga,
)
from .hodge import HodgeData, InvariantViolation, NotHarmonic, build_hodge, harmonic_part
from .linalg import Element, GradedBilinearForm, GradedMap, GradedVectorSpace
from .transfer import (
    AInfinityStructure,
    ArityError,
    NotDefined,
    check_lemma_associativity,
    check_ring_isomorphism,
    compare_m3_massey,
    harmonic_product,
    lambda_eval,
    massey_triple,
    stasheff_check,
    transfer_structure,
)

__version__ = "0.1.0"
