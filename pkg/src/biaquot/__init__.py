"""Biautomatic structures on central quotients.

The library detects central loops and Z-cycles in a word acceptor, builds
the regular language of quotient normal forms, computes the explicit
two-way fellow traveller bound for the quotient, and constructs the
rational simplicial subdivision at infinity for abelian structures.
"""

from .errors import InputError, PreconditionError, ResourceError, StructuralError
from .fsa import Alphabet, Automaton, Loop, Path
from .groups import Ball, DirectProduct, Free, FreeAbelian, GroupModel
from .structures import (
    BiautomaticStructure,
    VerificationReport,
    builtin,
    builtin_default_z,
    builtin_names,
    validate_structure,
    verify_fellow_traveller,
    verify_surjectivity,
    verify_uniqueness,
)
from .cycles import (
    CentralCycle,
    CentralLoop,
    LiveSet,
    ZCycle,
    check_independence,
    check_simplicity,
    compute_cycle_constants,
    contains,
    enumerate_live_sets,
    find_central_loops,
    find_primitive_z_cycles,
    splice,
    strip,
)
from .quotient import (
    BoundReport,
    QuotientStructure,
    build_contains_acceptor,
    build_quotient,
    build_touch_acceptor,
    central_quotient_tower,
    compute_bound,
    finite_quotient_projection,
    verify_quotient,
)
from .fan import (
    Direction,
    PathNormalForm,
    Simplex,
    Subdivision,
    build_subdivision,
    find_quotient_representative,
    loop_sequence,
    path_normal_form,
    star,
    verify_subdivision,
    verify_visual_approximation,
    visual_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
