"""Structured finite potent operators on a separable Hilbert space.

The representable class (finite block plus rank-one tail terms) is closed
under sums, products, adjoints and zero-constant polynomials, and every
member splits uniquely into an invertible part on a finite-dimensional core
plus a nilpotent remainder.  This package computes that splitting along with
the index, Drazin inverse, spectrum, the trace family, determinants of
``Id + f`` and the adjoint structure, and ships a conformance suite plus a
``finpot`` command-line tool.
"""

from .errors import (
    AmbientMismatch,
    DegenerateTolerance,
    EigenFailure,
    FinpotError,
    MalformedBlock,
    MalformedFile,
    NotSquareSummable,
    OpValidationError,
    UnboundedTail,
    UnknownEigenvalue,
)
from .sequences import (
    SERIES_TOL,
    GeometricTail,
    PowerTail,
    TailSequence,
    geometric_tail,
    is_square_summable,
    power_tail,
    seq_inner,
    seq_norm_sq,
    seq_value,
)
from .vectors import HVector, basis_vector, hvector, tail_vector, zero_vector
from .operators import (
    RankOneTerm,
    StructuredOperator,
    compact_terms,
    identity_operator,
    op_distance,
    operator,
    pairing_residual,
    probe_vectors,
    rank_one,
    validate,
    zero_operator,
)
from .reduction import RANK_TOL, ActiveSpace, active_space, truncate
from .potency import (
    ASTDecomposition,
    CNDecomposition,
    CoreSpace,
    Degenerate,
    KernelPower,
    ast_decompose,
    cn_decompose,
    drazin_inverse,
    drazin_polynomial,
    global_index,
    invariant_subspace,
    is_nilpotent,
    minimal_polynomial,
    operator_power,
    poly_eval,
    quasi_compact_order,
)
from .spectral import (
    EigenPair,
    RieszPoint,
    SpectralReport,
    TraceDetReport,
    det_id_plus,
    diagonal_trace,
    eigen,
    leray_trace,
    riesz_point,
    riesz_trace,
    spectrum,
    tate_trace,
    trace_det_report,
)
from .adjoint import (
    AdjointReport,
    adjoint_cn,
    adjoint_spectrum_trace_det,
    adjoint_structure,
)
from .conformance import (
    CHECK_TOL,
    ConformanceReport,
    GenParams,
    paper_example,
    random_finite_potent,
    run_conformance,
)
from .serialization import (
    canonical_json,
    load_operator,
    op_fingerprint,
    operator_from_obj,
    operator_to_obj,
    save_operator,
)

__version__ = "0.1.0"
