"""Entanglement robustness of superpositions of pure multipartite states.

Schmidt analysis, product-state optimization, collapse witnesses and
positive certificates for ``a|psi> + b|p>``, and unextendible entangled
bases with their local unambiguous identification.
"""

from .certify import (GHZW, CollapseWitness, Prop2Structure, Prop5Verdict, UISCertificate,
                      Verdict, certify_uis, classify_ghz_w, find_collapse, hyperdeterminant,
                      prop2_structure_check, prop5_check, random_prop2_state, three_tangle,
                      verify_collapse)
from .errors import (ConstraintOutsideSubspace, DimensionMismatch, IndexOutOfRange,
                     MissingStructure, NonOrthonormalBasis, NotBiseparable, NotEntangled,
                     NotGenuinelyEntangled, ShapeMismatch, StateFileError, TrivialCoefficient,
                     UISError, WrongShape, ZeroVector)
from .product_opt import (NotFound, ProductSearchBudget, ProductWitness,
                          best_product_approximation, product_state_in_subspace)
from .schmidt import (SchmidtDecomposition, SeparabilityClass, SepTag, is_completely_product,
                      max_second_coefficient, product_factors, schmidt_coefficients,
                      schmidt_decompose, schmidt_rank, second_coefficient, separability_class)
from .states import (Bipartition, HilbertDims, PureState, all_cuts, apply_local, basis_state,
                     ghz_state, ket, normalize, product_state, random_product_state,
                     random_state, superpose, tensor_states, w_state)
from .ueb import (Discrimination, DiscriminationVerdict, Purity, StateSet, UEBReport,
                  build_3ueb, build_w_ueb, unambiguous_locc_feasible, verify_ueb)

__version__ = "0.1.0"
