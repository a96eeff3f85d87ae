"""Exact lattice, cone and toric-singularity computations.

Submodules: :mod:`exactlin` (integer and rational linear algebra),
:mod:`lattice` (even lattices and isometries), :mod:`cones` (cones, fans,
polytopes), :mod:`toric` (singularity tests), :mod:`perfect` (local perfect
cone decompositions), :mod:`groups` (finite quotients) and :mod:`k3`
(polarized K3 lattices).
"""

from .cones import Fan, Polytope, RationalCone, dual_cone, face_lattice, hull_facets, intersect
from .groups import (
    FiniteMatrixGroup,
    KltCertificate,
    check_no_invariant_fixed_divisor,
    classify_elements,
    close_group,
    quotient_analysis,
    ramification_divisor,
)
from .k3 import build_polarized_lattice, isotropic_splitting, k3_lattice, main_theorem_probe, polarized_scenario
from .kernels import BACKEND
from .lattice import (
    DiscriminantForm,
    IntegralLattice,
    IsotropicData,
    Isometry,
    classify_isometry,
    discriminant_form,
    lift_reflection,
    make_reflection,
    parse_lattice,
    primitive_isotropic_vectors,
    quotient_by_isotropic,
    reduce_isometry,
)
from .perfect import (
    LorentzianModel,
    PSDModel,
    cone_points,
    make_window,
    perfect_fan_local,
    verify_admissible_local,
    verify_perfect_canonical,
)
from .toric import (
    SingularityVerdict,
    TorusInvariantDivisor,
    divisor_of_character,
    fan_singularity_verdict,
    pi_polytope,
    q_gorenstein_by_facet,
    q_gorenstein_by_system,
    q_cartier_test,
    singularity_verdict,
)

__version__ = "0.1.0"
