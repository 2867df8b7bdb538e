"""Exact and floating tools for congruence covers of quaternionic hyperbolic lattices.

Systole lower bounds from ideal norms and congruence indices, together with
explicit congruence geodesics giving upper bounds.
"""

from .hyperbolic import (
    Classification,
    Isometry,
    ProjectivePoint,
    apply,
    classify,
    distance,
    trace_length_bound,
    translation_length,
)
from .lattice import (
    AdmissibleGroupSpec,
    BadPlaceSet,
    IneligibleIdeal,
    bad_places,
    congruence_index,
    hilbert_symbol_odd,
    index_upper_bound,
    is_admissible,
    is_congruence_element,
    is_lattice_element,
    local_index,
    trace_lower_bound,
)
from .numberfield import (
    FieldElement,
    IdealSpec,
    PrimeIdealData,
    RealQuadraticField,
    ResidueRing,
    classify_prime,
)
from .quaternion import ExactQuaternion, QuaternionAlgebra, similar_to_complex
from .quatlinalg import QuatMatrix, complexify, right_eigenvalues
from .systole import (
    BoundReport,
    WitnessBlock,
    congruence_witness,
    find_witness,
    sweep,
    systole_lower_bound_index,
    systole_lower_bound_norm,
)

__version__ = "0.1.0"
