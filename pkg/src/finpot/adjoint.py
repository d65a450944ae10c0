"""Structure checks relating an operator to its adjoint.

For a valid operator the adjoint is again in the representable class, the
core dimensions and indices agree, each core is the orthogonal complement of
the other side's nilpotent part, the core/nilpotent splitting commutes with
taking adjoints, and spectrum, trace and determinant conjugate.  All claims
about the infinite-dimensional nilpotent part are verified as residuals over
a finite probe family; subspaces are never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .operators import StructuredOperator, op_distance
from .potency import ASTDecomposition, ast_decompose, cn_decompose
from .reduction import RANK_TOL
from .spectral import det_id_plus, spectrum, tate_trace
from .vectors import HVector, basis_vector, tail_vector

__all__ = [
    "AdjointReport",
    "adjoint_structure",
    "adjoint_cn",
    "adjoint_spectrum_trace_det",
    "conjugate_matching_distance",
    "u_probe_family",
]


@dataclass
class AdjointReport:
    """Residuals of the adjoint structure theorems; all small on valid input."""

    dim_w: int
    dim_w_star: int
    index: int
    index_star: int
    w_star_perp_u: float  # core of the adjoint against nilpotent probes
    u_star_perp_w: float  # core of the operator against adjoint nilpotent probes
    cn_adjoint: float
    spectrum_conj: float
    trace_conj: float
    det_conj: float

    @property
    def dim_match(self) -> bool:
        return self.dim_w == self.dim_w_star

    @property
    def index_match(self) -> bool:
        return self.index == self.index_star

    def max_residual(self) -> float:
        return max(self.w_star_perp_u, self.u_star_perp_w, self.cn_adjoint,
                   self.spectrum_conj, self.trace_conj, self.det_conj)

    def passed(self, tol: float) -> bool:
        return self.dim_match and self.index_match and self.max_residual() <= tol

    def to_json_obj(self) -> dict:
        return {
            "dim_w": self.dim_w,
            "dim_w_star": self.dim_w_star,
            "index": self.index,
            "index_star": self.index_star,
            "w_star_perp_u": self.w_star_perp_u,
            "u_star_perp_w": self.u_star_perp_w,
            "cn_adjoint": self.cn_adjoint,
            "spectrum_conj": self.spectrum_conj,
            "trace_conj": self.trace_conj,
            "det_conj": self.det_conj,
        }


def u_probe_family(op: StructuredOperator, ast: ASTDecomposition,
                   span: int = 16, membership_tol: float = 1e-8) -> list[HVector]:
    """Finite probes of the nilpotent-part subspace.

    Candidates: the kernel-power directions inside the active subspace, basis
    vectors just beyond every finite support, and each distinct tail pattern
    as a vector.  Candidates are kept only when the kernel-power membership
    test confirms them, so the family never contains spurious core
    components.
    """
    probes: list[HVector] = []
    for i in range(ast.u_coords.shape[1]):
        probes.append(ast.active.lift(ast.u_coords[:, i]))
    top = op.cutoff
    tails = []
    for t in op.terms:
        for vec in (t.left, t.right):
            top = max(top, vec.max_finite_index)
            tails.extend(vec.tails)
    candidates = [basis_vector(j) for j in range(top + 1, top + span + 1)]
    seen = set()
    for s in tails:
        if s not in seen:
            seen.add(s)
            candidates.append(tail_vector(s))
    probes.extend(v for v in candidates if ast.u_membership(v, membership_tol))
    return probes


def _perp_residual(core_basis: list[HVector], probes: list[HVector],
                   series_tol: float) -> float:
    worst = 0.0
    for w in core_basis:
        wn = max(w.norm(series_tol), 1e-30)
        for u in probes:
            un = max(u.norm(series_tol), 1e-30)
            worst = max(worst, abs(w.inner(u, series_tol)) / (wn * un))
    return worst


def conjugate_matching_distance(values_a: list[complex],
                                values_b: list[complex]) -> float:
    """Distance between one multiset and the conjugate of another.

    Uses an optimal-sum assignment and reports the largest matched gap;
    mismatched cardinalities give infinity.
    """
    if len(values_a) != len(values_b):
        return float("inf")
    if not values_a:
        return 0.0
    cost = np.array([[abs(a - b.conjugate()) for b in values_b] for a in values_a])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def adjoint_cn(op: StructuredOperator, tol: float = RANK_TOL,
               ast: ASTDecomposition | None = None,
               ast_star: ASTDecomposition | None = None) -> float:
    """Probe distance between splitting-then-adjoint and adjoint-then-splitting."""
    star = op.adjoint()
    cn = cn_decompose(op, tol, ast=ast)
    cn_star = cn_decompose(star, tol, ast=ast_star)
    core_gap = op_distance(cn_star.core, cn.core.adjoint())
    nil_gap = op_distance(cn_star.nilpotent, cn.nilpotent.adjoint())
    return max(core_gap, nil_gap)


def adjoint_spectrum_trace_det(op: StructuredOperator, tol: float = RANK_TOL,
                               ast: ASTDecomposition | None = None,
                               ast_star: ASTDecomposition | None = None
                               ) -> tuple[float, float, float]:
    """Residuals of spectrum/trace/determinant conjugation under adjoints."""
    if ast is None:
        ast = ast_decompose(op, tol)
    if ast_star is None:
        ast_star = ast_decompose(op.adjoint(), tol)
    spec = spectrum(op, tol, ast=ast)
    spec_star = spectrum(op.adjoint(), tol, ast=ast_star)
    spec_res = conjugate_matching_distance(spec_star.values, spec.values)
    tr = tate_trace(op, tol, ast=ast)
    tr_star = tate_trace(op.adjoint(), tol, ast=ast_star)
    trace_res = abs(tr_star - tr.conjugate()) / (1.0 + abs(tr))
    det = det_id_plus(op, tol, ast=ast)[0]
    det_star = det_id_plus(op.adjoint(), tol, ast=ast_star)[0]
    det_res = abs(det_star - det.conjugate()) / (1.0 + abs(det))
    return spec_res, trace_res, det_res


def adjoint_structure(op: StructuredOperator, tol: float = RANK_TOL,
                      membership_tol: float = 1e-8) -> AdjointReport:
    """Full adjoint suite: dimensions, indices, perpendicularity of each core
    to the other side's nilpotent part, splitting commutation and the
    conjugation residuals."""
    star = op.adjoint()
    ast = ast_decompose(op, tol)
    ast_star = ast_decompose(star, tol)
    series_tol = ast.active.series_tol
    w_star_perp_u = _perp_residual(
        ast_star.w_basis, u_probe_family(op, ast, membership_tol=membership_tol),
        series_tol)
    u_star_perp_w = _perp_residual(
        ast.w_basis, u_probe_family(star, ast_star, membership_tol=membership_tol),
        series_tol)
    cn_res = adjoint_cn(op, tol, ast=ast, ast_star=ast_star)
    spec_res, trace_res, det_res = adjoint_spectrum_trace_det(
        op, tol, ast=ast, ast_star=ast_star)
    return AdjointReport(
        dim_w=ast.dim_w,
        dim_w_star=ast_star.dim_w,
        index=ast.index,
        index_star=ast_star.index,
        w_star_perp_u=w_star_perp_u,
        u_star_perp_w=u_star_perp_w,
        cn_adjoint=cn_res,
        spectrum_conj=spec_res,
        trace_conj=trace_res,
        det_conj=det_res,
    )
