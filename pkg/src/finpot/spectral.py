"""Spectrum, the trace family and determinants of ``Id + op``.

The nonzero spectrum of a valid operator is the eigenvalue set of its core
compression, always finite; zero belongs to the spectrum exactly when the
index is at least one.  Four trace paths are implemented (core compression,
quotient construction, eigenvalue sum of the compact core part, and the
diagonal closed form) together with three determinant formulas (core
restriction, eigenvalue product, exterior-power sums via Newton identities).
They agree on every valid operator; the report records the largest pairwise
discrepancy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import EigenFailure, UnknownEigenvalue
from .operators import StructuredOperator
from .potency import (
    ASTDecomposition,
    ast_decompose,
    cn_decompose,
    CNDecomposition,
    matrix_range,
    poly_eval,
    range_and_null,
    _svd_rank,
)
from .reduction import RANK_TOL
from .sequences import SERIES_TOL
from .vectors import HVector

__all__ = [
    "EigenPair",
    "eigen",
    "SpectralReport",
    "spectrum",
    "RieszPoint",
    "riesz_point",
    "tate_trace",
    "leray_trace",
    "riesz_trace",
    "diagonal_trace",
    "det_id_plus",
    "TraceDetReport",
    "trace_det_report",
    "DET_CONVENTION_NOTE",
]

DET_CONVENTION_NOTE = (
    "determinants here are of Id + f (identity shift included); for the "
    "built-in worked example this equals 31-1j, while the sometimes-quoted "
    "value 15+1j is det of the core restriction alone, without the shift"
)


@dataclass(frozen=True)
class EigenPair:
    value: complex
    multiplicity: int
    residual: float


def eigen(a: np.ndarray, tol: float = RANK_TOL) -> list[EigenPair]:
    """Eigenvalues with algebraic multiplicities for a dense matrix.

    Raw eigenvalues are clustered, then each multiplicity is confirmed as the
    dimension of the generalized kernel ``Ker (a - value)**n`` at rank
    tolerance.  Inconsistent counts raise EigenFailure.  The per-eigenvalue
    residual is the smallest singular value of ``a - value`` scaled by the
    matrix norm.
    """
    n = a.shape[0]
    if n == 0:
        return []
    scale = max(1.0, float(np.linalg.norm(a, "fro")))
    values = np.linalg.eigvals(a)
    radius = max(tol, (2e-16 * scale) ** (1.0 / n) * 3.0) * scale
    clusters: list[list[complex]] = []
    for lam in sorted(values, key=lambda z: (round(z.real, 12), round(z.imag, 12))):
        for cluster in clusters:
            if abs(lam - cluster[0]) <= radius:
                cluster.append(lam)
                break
        else:
            clusters.append([lam])
    centers = [complex(np.mean(c)) for c in clusters]
    pairs = []
    total = 0
    eye = np.eye(n)
    for center in centers:
        shifted = a - center * eye
        if len(centers) == 1:
            mult = n
        else:
            # gap-aware scaling: directions belonging to other eigenvalues
            # keep singular values >= (gap/2)**n after the power, so dividing
            # by half the gap makes the rank cutoff power-free
            gap = min(abs(center - other) for other in centers if other is not center)
            if gap <= 2.0 * max(tol, 1e-12) * scale:
                raise EigenFailure(
                    f"clusters around {center!r} are too close to separate at tolerance"
                )
            power = np.linalg.matrix_power(shifted / (0.5 * gap), n)
            s = np.linalg.svd(power, compute_uv=False)
            mult = int(np.sum(s <= 1.0))
        residual = float(np.linalg.svd(shifted, compute_uv=False)[-1]) / scale
        pairs.append(EigenPair(center, mult, residual))
        total += mult
    if total != n:
        raise EigenFailure(
            f"generalized-kernel multiplicities sum to {total}, expected {n}"
        )
    return pairs


@dataclass
class SpectralReport:
    """Nonzero eigenvalues with algebraic multiplicities, plus whether zero
    belongs to the spectrum (it does exactly when the index is >= 1)."""

    contains_zero: bool
    eigenpairs: list[EigenPair]

    @property
    def values(self) -> list[complex]:
        """Nonzero eigenvalues listed with multiplicity."""
        out = []
        for p in self.eigenpairs:
            out.extend([p.value] * p.multiplicity)
        return out

    @property
    def total_multiplicity(self) -> int:
        return sum(p.multiplicity for p in self.eigenpairs)

    @property
    def max_residual(self) -> float:
        return max((p.residual for p in self.eigenpairs), default=0.0)


def spectrum(op: StructuredOperator, tol: float = RANK_TOL,
             ast: ASTDecomposition | None = None) -> SpectralReport:
    if ast is None:
        ast = ast_decompose(op, tol)
    pairs = eigen(ast.b_w, tol)
    return SpectralReport(contains_zero=ast.index >= 1, eigenpairs=pairs)


# -- Riesz points -------------------------------------------------------------


@dataclass
class RieszPoint:
    """Splitting data at a nonzero spectral point.

    ``n_basis`` spans the generalized eigenspace (finite-dimensional);
    ``f_membership`` tests the complementary invariant subspace, on which the
    shifted operator is invertible.  The recorded residuals certify
    nilpotency of the shift on the first factor and invertibility on the
    second.
    """

    value: complex
    n_basis: list[HVector]
    f_membership: Callable[[HVector], bool]
    nilpotent_residual: float
    invertible_margin: float


def riesz_point(op: StructuredOperator, lam: complex, tol: float = RANK_TOL,
                ast: ASTDecomposition | None = None) -> RieszPoint:
    if ast is None:
        ast = ast_decompose(op, tol)
    report = spectrum(op, tol, ast=ast)
    scale = max(1.0, float(np.linalg.norm(ast.b_w, "fro")))
    matches = [p for p in report.eigenpairs if abs(p.value - lam) <= max(1e-6, tol) * scale]
    if lam == 0 or not matches:
        raise UnknownEigenvalue(f"{lam!r} is not in the computed nonzero spectrum")
    lam = matches[0].value
    b_w = ast.b_w
    w = b_w.shape[0]
    eye = np.eye(w)
    shifted = b_w - lam * eye
    # order of lam in the annihilator = size of its largest Jordan block
    order = 0
    prev = 0
    power = eye
    for _ in range(w):
        power = power @ shifted
        dim = w - _svd_rank(np.linalg.svd(power, compute_uv=False), max(tol, 1e-10))
        order += 1
        if dim == prev:
            order -= 1
            break
        prev = dim
    _, kernel = range_and_null(np.linalg.matrix_power(shifted, w) if w else shifted, tol)
    n_basis = [ast.active.lift(ast.w_coords @ kernel[:, i]) for i in range(kernel.shape[1])]
    nil_map = kernel.conj().T @ shifted @ kernel
    nilpotent_residual = float(np.linalg.norm(np.linalg.matrix_power(nil_map, max(order, 1))))
    # membership polynomial: annihilator with the (x - lam) factors removed
    m, p = ast.annihilator
    full = np.concatenate([np.zeros(m, dtype=complex), [1.0 + 0j]])
    full = np.polynomial.polynomial.polymul(full, p)
    reduced = full
    for _ in range(order):
        reduced = _deflate(reduced, lam)
    membership_op = poly_eval(op, reduced, ast.active.series_tol)
    membership_scale = _poly_scale(reduced)

    def f_membership(v: HVector, _op=membership_op, _tol=max(tol, 1e-8),
                     _scale=membership_scale, _stol=ast.active.series_tol) -> bool:
        nv = v.norm(_stol)
        if nv == 0.0:
            return True
        return _op.apply(v, _stol).norm(_stol) <= _tol * _scale * max(1.0, nv)

    # invertibility margin of the shift on F within the active subspace
    b = ast.active.matrix
    poly_b = _poly_matrix(reduced, b)
    _, f_coords = range_and_null(poly_b, tol)
    if f_coords.shape[1]:
        restricted = f_coords.conj().T @ (b - lam * np.eye(b.shape[0])) @ f_coords
        margin = float(np.linalg.svd(restricted, compute_uv=False)[-1])
    else:
        margin = np.inf
    return RieszPoint(lam, n_basis, f_membership, nilpotent_residual, margin)


def _deflate(coeffs: np.ndarray, root: complex) -> np.ndarray:
    """Synthetic division by (x - root); the remainder is discarded."""
    coeffs = np.asarray(coeffs, dtype=complex)
    out = np.zeros(len(coeffs) - 1, dtype=complex)
    acc = 0j
    for k in range(len(coeffs) - 1, 0, -1):
        acc = coeffs[k] + root * acc
        out[k - 1] = acc
    return out


def _poly_scale(coeffs: np.ndarray) -> float:
    return max(1.0, float(np.abs(coeffs).max()))


def _poly_matrix(coeffs: np.ndarray, a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    power = np.eye(a.shape[0], dtype=complex)
    for c in coeffs:
        if c != 0:
            out = out + c * power
        power = power @ a
    return out


# -- traces -------------------------------------------------------------------


def tate_trace(op: StructuredOperator, tol: float = RANK_TOL,
               ast: ASTDecomposition | None = None) -> complex:
    """Trace of the core compression (zero for nilpotent operators)."""
    if ast is None:
        ast = ast_decompose(op, tol)
    return complex(np.trace(ast.b_w))


def leray_trace(op: StructuredOperator, tol: float = RANK_TOL,
                ast: ASTDecomposition | None = None) -> complex:
    """Trace of the induced map on the quotient by the kernel-power subspace.

    Computed with a complement basis inside the active subspace, a path
    independent of the core restriction used by ``tate_trace``.
    """
    if ast is None:
        ast = ast_decompose(op, tol)
    b = ast.active.matrix
    u = ast.u_coords
    if u.shape[1] == b.shape[0]:
        return 0j
    comp = matrix_range(np.eye(b.shape[0], dtype=complex) - u @ u.conj().T, tol)
    stacked = np.hstack([u, comp])
    coeffs = np.linalg.solve(stacked, b @ comp)
    induced = coeffs[u.shape[1]:, :]
    return complex(np.trace(induced))


def riesz_trace(op: StructuredOperator, tol: float = RANK_TOL,
                cn: CNDecomposition | None = None) -> complex:
    """Eigenvalue sum (with multiplicity) of the compact core part."""
    if cn is None:
        cn = cn_decompose(op, tol)
    core_ast = ast_decompose(cn.core, tol)
    report = spectrum(cn.core, tol, ast=core_ast)
    return complex(sum(report.values)) if report.eigenpairs else 0j


def diagonal_trace(op: StructuredOperator, tol: float = SERIES_TOL) -> complex:
    """Closed-form diagonal sum: tr(block) + sum_k <left_k, right_k>.

    This is the orthonormal-basis diagonal sum of a trace-class operator and
    serves as the independent oracle for the other trace paths.
    """
    total = complex(np.trace(op.block))
    for t in op.terms:
        total += t.left.inner(t.right, tol)
    return total


# -- determinants -------------------------------------------------------------


def _elementary_symmetric(power_sums: list[complex]) -> list[complex]:
    """Newton identities: e_k from power sums p_1..p_n (e_0 = 1)."""
    e = [1.0 + 0j]
    for k in range(1, len(power_sums) + 1):
        acc = 0j
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * power_sums[i - 1]
        e.append(acc / k)
    return e


def det_id_plus(op: StructuredOperator, tol: float = RANK_TOL,
                ast: ASTDecomposition | None = None) -> tuple[complex, complex, complex]:
    """det(Id + op) by three formulas: core restriction, eigenvalue product,
    and exterior-power traces via elementary symmetric functions."""
    if ast is None:
        ast = ast_decompose(op, tol)
    b_w = ast.b_w
    w = b_w.shape[0]
    det_restriction = complex(np.linalg.det(np.eye(w) + b_w)) if w else 1.0 + 0j
    pairs = eigen(b_w, tol)
    det_product = 1.0 + 0j
    for p in pairs:
        det_product *= (1.0 + p.value) ** p.multiplicity
    power = np.eye(w, dtype=complex)
    power_sums = []
    for _ in range(w):
        power = power @ b_w
        power_sums.append(complex(np.trace(power)))
    det_exterior = complex(sum(_elementary_symmetric(power_sums)))
    return det_restriction, det_product, det_exterior


# -- combined report -----------------------------------------------------------


@dataclass
class TraceDetReport:
    tate: complex
    leray: complex
    riesz: complex
    diagonal: complex
    det_restriction: complex
    det_product: complex
    det_exterior: complex
    det_dense: complex = field(default=1.0 + 0j)
    max_discrepancy: float = 0.0

    def to_json_obj(self) -> dict:
        def c(z: complex) -> list[float]:
            return [z.real, z.imag]

        return {
            "tate": c(self.tate),
            "leray": c(self.leray),
            "riesz": c(self.riesz),
            "diagonal": c(self.diagonal),
            "det_restriction": c(self.det_restriction),
            "det_product": c(self.det_product),
            "det_exterior": c(self.det_exterior),
            "det_dense": c(self.det_dense),
            "max_discrepancy": self.max_discrepancy,
        }


def trace_det_report(op: StructuredOperator, tol: float = RANK_TOL,
                     ast: ASTDecomposition | None = None,
                     cn: CNDecomposition | None = None) -> TraceDetReport:
    """All trace and determinant paths, with the worst pairwise discrepancy.

    Trace differences are scaled by 1 + |tate|; determinant differences are
    relative to 1 + |det_restriction|.  The dense determinant of Id plus the
    full active compression is included as an extra oracle (the nilpotent
    directions contribute a factor of one).
    """
    if ast is None:
        ast = ast_decompose(op, tol)
    tate = tate_trace(op, tol, ast=ast)
    leray = leray_trace(op, tol, ast=ast)
    riesz = riesz_trace(op, tol, cn=cn)
    diagonal = diagonal_trace(op, ast.active.series_tol)
    det_r, det_p, det_e = det_id_plus(op, tol, ast=ast)
    d = ast.active.dim
    det_dense = complex(np.linalg.det(np.eye(d) + ast.active.matrix)) if d else 1.0 + 0j
    trace_scale = 1.0 + abs(tate)
    det_scale = 1.0 + abs(det_r)
    traces = [tate, leray, riesz, diagonal]
    dets = [det_r, det_p, det_e, det_dense]
    disc = max(
        max(abs(x - y) for x in traces for y in traces) / trace_scale,
        max(abs(x - y) for x in dets for y in dets) / det_scale,
    )
    return TraceDetReport(tate, leray, riesz, diagonal, det_r, det_p, det_e,
                          det_dense, disc)
