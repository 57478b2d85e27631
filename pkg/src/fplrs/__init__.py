"""Exact combinatorics of fully-packed loops on square-lattice domains:
enumeration refined by link pattern, the diagram algebra acting on
pattern space, the plaquette-flipping bijection and its orbits, and the
exact stationary vector of the loop-model Hamiltonian, together with
verification suites that certify their interrelations at small sizes.
"""

__version__ = "0.1.0"

from .errors import (
    ArityMismatch,
    FplrsError,
    GeometryMismatch,
    IndexOutOfRange,
    InvalidTriplet,
    KernelDimensionError,
    NonUniqueGamma,
    UnknownIdentity,
)
from .lattice import (
    BoundaryCondition,
    BoundaryString,
    Domain,
    GluedGraph,
    boundary_string,
    build_square,
    glue_and_gamma,
)
from .linkpat import LinkPattern, LpVector, RotationClass, all_patterns, catalan
from .fplcore import (
    FplConfig,
    LinkData,
    PsiTable,
    asm_count_formula,
    count_configs,
    enumerate_configs,
    link_data,
    plaquette_indicator,
    refined_counts,
    vertex_type,
)
from .gyration import Orbit, apply_h, gyrate, orbit, orbit_partition
from .groundstate import build_h_matrix, stationary_vector, verify_rs
from .identities import aux_state, check_identity, check_spr, run_identity_suite
