"""Triangle-free Cayley-graph storage codes over F_2^n and the group-algebra
machinery (ideals, annihilators, bit-packed GF(2) elimination) used to
compute their rates exactly."""

from .algebra import (
    AlgebraElement,
    B2Coordinates,
    add,
    disjoint_variables,
    elem_from_monomials,
    from_b2,
    mul,
    parse_polynomial,
    support,
    to_b2,
)
from .code import (
    CodeReport,
    CodeSpace,
    ConnectionSet,
    check_storage_property,
    code_rate,
    connection_set_from_element,
    coset_matrix,
    graph_stats,
    is_triangle_free,
    necessary_conditions,
    repair_all,
    repair_coordinate,
)
from .errors import (
    ArityError,
    ConventionError,
    ParameterError,
    ParseError,
    RepairError,
    ResourceError,
    StorageCodeError,
)
from .families import (
    FamilyInstance,
    family_bounds,
    generalized_element,
    hamming_element,
    seven_eighths_element,
    sparsity_check,
)
from .gf2 import (
    BitMatrix,
    SubspaceBasis,
    mult_operator_matrix,
    nullspace,
    rank,
    subspace_intersection,
    subspace_sum,
)
from .ideals import (
    IdealHandle,
    annihilator_contains,
    annihilator_dim,
    ideal_dim,
    ideal_product,
    ideal_sum,
    verify_ideal_identities,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "ArityError",
    "B2Coordinates",
    "BitMatrix",
    "CodeReport",
    "CodeSpace",
    "ConnectionSet",
    "ConventionError",
    "FamilyInstance",
    "IdealHandle",
    "ParameterError",
    "ParseError",
    "RepairError",
    "ResourceError",
    "StorageCodeError",
    "SubspaceBasis",
    "add",
    "annihilator_contains",
    "annihilator_dim",
    "check_storage_property",
    "code_rate",
    "connection_set_from_element",
    "coset_matrix",
    "disjoint_variables",
    "elem_from_monomials",
    "family_bounds",
    "from_b2",
    "generalized_element",
    "graph_stats",
    "hamming_element",
    "ideal_dim",
    "ideal_product",
    "ideal_sum",
    "is_triangle_free",
    "mul",
    "mult_operator_matrix",
    "necessary_conditions",
    "nullspace",
    "parse_polynomial",
    "rank",
    "repair_all",
    "repair_coordinate",
    "seven_eighths_element",
    "sparsity_check",
    "subspace_intersection",
    "subspace_sum",
    "support",
    "to_b2",
    "verify_ideal_identities",
    "__version__",
]
