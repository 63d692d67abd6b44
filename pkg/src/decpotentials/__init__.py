"""Discrete Poincare and Bogovskii operators on planar simplicial complexes.

The package builds cone operators on simplicial chains -- from collapse
sequences, vertex-star cones, discrete contractions, and piecewise-affine
Lipschitz contractions -- and turns them into potential operators on
cochains and Whitney forms that satisfy the homotopy identity
``d P + P d = id`` (up to the appropriate constant / mean-value correction
at the ends of the complex)."""

from .simplicial import (
    Chain,
    Cochain,
    SimplicialComplex,
    SimplicialMap,
    boundary,
    canonical_simplex,
    coboundary,
    has_zero_trace,
    induced_chain_map,
    pairing,
    validate_simplicial_map,
)
from .whitney import MeshGeometry, de_rham, whitney_field, whitney_value
from .singular import (
    ConeChain,
    InfiniteCone,
    LinearSimplex,
    OutsideDomainError,
    SingularChain,
    chain_functional,
    cone_boundary,
    cone_chain_functional,
    integrate_whitney,
    integrate_whitney_over_cone,
    is_degenerate,
    lift_chain,
    lift_simplex,
    singular_boundary,
    truncate_cone,
)
from .homotopy import (
    CollapseSequence,
    ProductComplex,
    StrongCollapseSequence,
    build_product_complex,
    contraction_from_strong_collapse,
    extrusion,
    find_collapse_sequence,
    find_strong_collapse_sequence,
    load_sequence,
    save_sequence,
    uniform_breakpoints,
    validate_collapse_sequence,
    validate_strong_collapse_sequence,
)
from .cones import (
    InfiniteConeOperator,
    SimplicialConeOperator,
    SingularConeOperator,
    SlabAffineContraction,
    collapse_cone,
    contraction_cone,
    infinite_cone,
    lipschitz_cone,
    star_cone,
    validate_contraction,
)
from .potentials import (
    BasePointOnFacetError,
    BogovskiiOperator,
    ComplexPropertyOperator,
    DiscretePoincareOperator,
    PreconditionError,
    check_base_point,
    homotopy_residual,
    max_residual,
    verify_homotopy,
)
from .meshes import (
    generate_square_mesh,
    generate_ushape_mesh,
    load_cochain_csv,
    load_mesh_json,
    save_cochain_csv,
    save_mesh_json,
    vertex_at,
)

__version__ = "0.1.0"

__all__ = [
    "BasePointOnFacetError",
    "BogovskiiOperator",
    "Chain",
    "Cochain",
    "CollapseSequence",
    "ComplexPropertyOperator",
    "ConeChain",
    "DiscretePoincareOperator",
    "InfiniteCone",
    "InfiniteConeOperator",
    "LinearSimplex",
    "MeshGeometry",
    "OutsideDomainError",
    "PreconditionError",
    "ProductComplex",
    "SimplicialComplex",
    "SimplicialConeOperator",
    "SimplicialMap",
    "SingularChain",
    "SingularConeOperator",
    "SlabAffineContraction",
    "StrongCollapseSequence",
    "boundary",
    "build_product_complex",
    "canonical_simplex",
    "chain_functional",
    "check_base_point",
    "coboundary",
    "collapse_cone",
    "cone_boundary",
    "cone_chain_functional",
    "contraction_cone",
    "contraction_from_strong_collapse",
    "de_rham",
    "extrusion",
    "find_collapse_sequence",
    "find_strong_collapse_sequence",
    "generate_square_mesh",
    "generate_ushape_mesh",
    "has_zero_trace",
    "homotopy_residual",
    "induced_chain_map",
    "infinite_cone",
    "integrate_whitney",
    "integrate_whitney_over_cone",
    "is_degenerate",
    "lift_chain",
    "lift_simplex",
    "lipschitz_cone",
    "load_cochain_csv",
    "load_mesh_json",
    "load_sequence",
    "max_residual",
    "pairing",
    "save_cochain_csv",
    "save_mesh_json",
    "save_sequence",
    "singular_boundary",
    "star_cone",
    "truncate_cone",
    "uniform_breakpoints",
    "validate_collapse_sequence",
    "validate_contraction",
    "validate_simplicial_map",
    "validate_strong_collapse_sequence",
    "verify_homotopy",
    "vertex_at",
    "whitney_field",
    "whitney_value",
]
