"""Lattices of order-convex subsets of chains: decision procedures and catalog."""

from .catalog import (
    SIClass,
    VarietyPosition,
    canonical_bitrack,
    classify_si,
    co_chain,
    l_mn,
    variety_position,
)
from .depend import (
    InvariantReport,
    WeakBiTrack,
    WeakTrack,
    check_dependency_invariants,
    dependency_closure,
    dependents,
    interval_value_check,
    is_minimal_pair_cover,
    is_weak_bitrack,
    is_weak_track,
    min_covers,
    minimal_pairs,
    track_embedding,
    weak_bitracks,
    weak_tracks,
)
from .lattice import (
    FinLattice,
    LatticeError,
    LatticeMap,
    StructuralFlags,
    direct_product,
    embedding_search,
    find_isomorphism,
    iter_lattices,
    lattice_from_json,
    lattice_to_json,
    lattices_of_size,
    monolith,
    principal_congruence,
    structural_predicates,
    surjection_search,
)
from .membership import (
    ChainOrderWitness,
    EmbeddingCertificate,
    MembershipResult,
    brute_force_oracle,
    certificate_from_json,
    certificate_to_json,
    chain_order,
    decide_sub_lo,
    decide_sub_n,
    verify_certificate,
)
from .poset import Poset, PosetError, poset_from_json, poset_to_json
from .project import (
    LambdaConfig,
    hom_from_lambda,
    lambda_holds,
    plain_config,
    retract_section,
    split_config,
)
from .star import (
    SeparationReport,
    SeparationWitness,
    load_pq_fixture,
    search_pq,
    star_identity,
    verify_separation,
)
from .terms import (
    CheckResult,
    Identity,
    ParseError,
    Term,
    TermError,
    builtin,
    builtin_names,
    check,
    check_sigma,
    identity_from_json,
    identity_to_json,
    load_identity,
    naive_check,
    parse_term,
    term_to_sexpr,
)

__all__ = [
    "ChainOrderWitness",
    "CheckResult",
    "EmbeddingCertificate",
    "FinLattice",
    "Identity",
    "InvariantReport",
    "LambdaConfig",
    "LatticeError",
    "LatticeMap",
    "MembershipResult",
    "ParseError",
    "Poset",
    "PosetError",
    "SIClass",
    "SeparationReport",
    "SeparationWitness",
    "StructuralFlags",
    "Term",
    "TermError",
    "VarietyPosition",
    "WeakBiTrack",
    "WeakTrack",
    "brute_force_oracle",
    "builtin",
    "builtin_names",
    "canonical_bitrack",
    "certificate_from_json",
    "certificate_to_json",
    "chain_order",
    "check",
    "check_dependency_invariants",
    "check_sigma",
    "classify_si",
    "co_chain",
    "decide_sub_lo",
    "decide_sub_n",
    "dependency_closure",
    "dependents",
    "direct_product",
    "embedding_search",
    "find_isomorphism",
    "hom_from_lambda",
    "identity_from_json",
    "identity_to_json",
    "interval_value_check",
    "is_minimal_pair_cover",
    "is_weak_bitrack",
    "is_weak_track",
    "iter_lattices",
    "l_mn",
    "lambda_holds",
    "lattice_from_json",
    "lattice_to_json",
    "lattices_of_size",
    "load_identity",
    "load_pq_fixture",
    "min_covers",
    "minimal_pairs",
    "monolith",
    "naive_check",
    "parse_term",
    "plain_config",
    "poset_from_json",
    "poset_to_json",
    "principal_congruence",
    "retract_section",
    "search_pq",
    "split_config",
    "star_identity",
    "structural_predicates",
    "surjection_search",
    "term_to_sexpr",
    "track_embedding",
    "variety_position",
    "verify_certificate",
    "verify_separation",
    "weak_bitracks",
    "weak_tracks",
]
