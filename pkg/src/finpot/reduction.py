"""Finite-dimensional reduction of a structured operator.

Every structured operator maps the whole space into the span of its block
columns and rank-one left factors.  That span is a finite-dimensional
invariant subspace containing the image, so all spectral questions reduce to
a dense matrix on it.  ``truncate`` provides the independent brute-force
oracle: the compression onto the first K coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTolerance
from .operators import StructuredOperator
from .sequences import SERIES_TOL
from .vectors import HVector, basis_vector

__all__ = ["RANK_TOL", "ActiveSpace", "active_space", "truncate"]

RANK_TOL = 1e-10


@dataclass
class ActiveSpace:
    """Orthonormal basis of the invariant active subspace and the compression.

    ``matrix[j, i] = <phi(basis[i]), basis[j]>`` so that columns hold image
    coordinates; ``residual`` is the largest reconstruction defect
    ``||phi(q_i) - sum_j matrix[j, i] q_j||`` over the basis.
    """

    basis: list[HVector]
    matrix: np.ndarray
    residual: float
    series_tol: float = field(default=SERIES_TOL, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, v: HVector) -> tuple[np.ndarray, float]:
        """Coefficients of ``v`` in the basis plus the off-space defect norm."""
        c = np.array([v.inner(q, self.series_tol) for q in self.basis])
        rest = v
        for q, cj in zip(self.basis, c):
            rest = rest - cj * q
        return c, rest.norm(self.series_tol)

    def lift(self, coeffs: np.ndarray) -> HVector:
        out = HVector()
        for cj, q in zip(coeffs, self.basis):
            if cj != 0:
                out = out + cj * q
        return out


def _gram_schmidt(candidates: list[HVector], tol: float, series_tol: float) -> list[HVector]:
    basis: list[HVector] = []
    for cand in candidates:
        scale = cand.norm(series_tol)
        if scale == 0.0:
            continue
        v = cand
        for _ in range(2):  # re-orthogonalize once for numerical safety
            for q in basis:
                v = v - v.inner(q, series_tol) * q
        r = v.norm(series_tol)
        if r > tol * max(1.0, scale):
            basis.append((1.0 / r) * v)
    return basis


def active_space(op: StructuredOperator, tol: float = RANK_TOL,
                 series_tol: float = SERIES_TOL) -> ActiveSpace:
    """Orthonormalize {nonzero block columns} + {rank-one left factors}.

    On a finite ambient space the full coordinate space is used instead, which
    keeps the compression exact.
    """
    if op.ambient is not None:
        n = op.ambient
        basis = [basis_vector(j) for j in range(1, n + 1)]
        return ActiveSpace(basis, truncate(op, n), 0.0, series_tol)
    candidates: list[HVector] = []
    ncut = op.cutoff
    for i in range(ncut):
        col = {j + 1: op.block[j, i] for j in range(ncut) if op.block[j, i] != 0}
        if col:
            candidates.append(HVector(col))
    candidates.extend(t.left for t in op.terms)
    basis = _gram_schmidt(candidates, tol, series_tol)
    d = len(basis)
    matrix = np.zeros((d, d), dtype=complex)
    residual = 0.0
    for i, q in enumerate(basis):
        image = op.apply(q, series_tol)
        rest = image
        for j, p in enumerate(basis):
            matrix[j, i] = image.inner(p, series_tol)
            rest = rest - matrix[j, i] * p
        residual = max(residual, rest.norm(series_tol))
    if residual > max(tol * 100.0, np.sqrt(series_tol)):
        raise DegenerateTolerance(
            f"active compression reconstruction defect {residual:.3e} exceeds tolerance"
        )
    return ActiveSpace(basis, matrix, residual, series_tol)


def truncate(op: StructuredOperator, k: int) -> np.ndarray:
    """Dense K x K compression onto coordinates 1..K (brute-force oracle)."""
    if k < op.cutoff:
        raise ValueError(f"truncation size {k} below cutoff {op.cutoff}")
    out = np.zeros((k, k), dtype=complex)
    n = op.cutoff
    out[:n, :n] = op.block
    for t in op.terms:
        lv = t.left.values_up_to(k)
        rv = t.right.values_up_to(k)
        out += np.outer(lv, rv.conj())
    return out
