"""Finite subgroups of SO(4) and SO(8), their equivariant polynomial maps and bifurcating branches."""

from .errors import BudgetExceeded, ConsistencyFault, LabError, ParameterError, ToleranceFault
from .matgroup import (
    FiniteMatrixGroup,
    GeneratorSet,
    MatrixElement,
    QuaternionPair,
    build_g3_generators,
    build_g8_generators,
    close_group,
    element_order,
    quaternion_pair_to_matrix,
    verify_matrix_relations,
)
from .repanalysis import (
    Subspace,
    commutant_dimension,
    fixed_subspace,
    isotropy_types,
    normalizer,
    pointwise_stabilizer,
    sampled_isotropy_types,
    verify_omega_formulas,
    verify_weyl_is_g3,
    weyl_action,
)
from .equivariants import PolyMap, equivariant_dimension, reynolds_equivariant_basis, restriction_rank
from .bifurcation import find_branches, g3_branches, lift_branches_g8
from .wordgroup import Presentation, Word, abstract_order, check_tables, reduce_word

__version__ = "0.1.0"
