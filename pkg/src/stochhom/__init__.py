"""Exact and sampled expected Betti numbers of random simplicial complexes."""

from .complex import (
    RandomComplex,
    SimplicialComplex,
    closure,
    configuration_probability,
    iter_configurations,
    parse_complex,
    realize,
    serialize_complex,
)
from .errors import CacheCorruptionError, ComplexFormatError, FaceClosureError, GuardExceeded, StochHomError
from .expectation import (
    SymbolicPolynomial,
    count_subcomplexes,
    expected_betti_exact,
    expected_euler_exact,
    mc_estimate,
    monomial_coefficient,
    symbolic_expected_betti,
)
from .geometry import PointCloud, ProbModel, assign_probabilities, load_points, vr_complex
from .homology import betti, betti_numbers, boundary_matrix, euler
from .patterns import CanonicalForm, Pattern, automorphism_count, canonical_form
from .polynomial import UniPoly, assemble_b0, horner_eval, orbit_count, p_n_polynomial
from .reduction import (
    CoefficientCache,
    c_direct,
    c_recursive,
    erase_cycle_rule,
    has_spike,
    n_intersection_test,
    reduce_pattern,
    sym_diff_1,
    union_1,
)

__version__ = "0.1.0"
