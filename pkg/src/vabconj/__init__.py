"""Conjugacy decisions and separability growth for virtually abelian groups."""

from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    GroupLawError,
    NonMember,
    NonUnimodular,
    NotACocycle,
    NotAHomomorphism,
    NotASublattice,
    SplitFailure,
)
from .groups import FiniteGroup, from_cayley, from_matrix_generators
from .lattices import (
    InvariantFactors,
    Lattice,
    RatLattice,
    coset_residues,
    enumerate_sublattices,
    hnf_basis,
    index,
    intersect,
    lattice_sum,
    member,
    preimage,
    radical,
    snf,
    solve_integer,
)
from .reps import (
    CharacterMap,
    IntRep,
    IsotypicComponent,
    SquareHull,
    character,
    component_w_v,
    fixed_lattice,
    is_irreducible,
    square_hull,
    v_lattice,
    validate,
    varpi,
    w_lattice,
)
from .separability import (
    Classification,
    ExponentCertificate,
    ProbeTuple,
    admits,
    admits_m,
    classify,
    k3_exponent,
    min_admitting_dim,
    naive_upper_bound,
    solution_sets,
    strongly_unsolvable,
    vanishes,
)
from .vab import Element, VirtAbGroup, embed_extension
from .growth import (
    GrowthRow,
    ProbeRow,
    empirical_conj,
    export,
    lcm_points,
    parse_report,
    probe_lower_bound,
    witness_sequence,
)
from .registry import build_group, builtin_doc, builtin_names

__all__ = [name for name in dir() if not name.startswith("_")]
