"""The representable operator class and its algebra.

A ``StructuredOperator`` consists of a finite complex block acting on
coordinates ``1..N`` plus finitely many rank-one terms ``v -> <v, right> left``
whose factors are ``HVector`` values.  Operators of this form always have
finite rank, are bounded whenever every tail factor is square-summable, and
the class is closed under sums, scalar multiples, composition, adjoints and
polynomials with zero constant term.

Structured representations are not unique, so operator equality is
extensional: agreement on a deterministic probe family (basis vectors up to
the cutoff plus every distinct tail pattern) within tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbientMismatch, MalformedBlock, UnboundedTail
from .sequences import SERIES_TOL, is_square_summable
from .vectors import HVector, basis_vector, tail_vector

__all__ = [
    "RankOneTerm",
    "StructuredOperator",
    "operator",
    "rank_one",
    "zero_operator",
    "identity_operator",
    "validate",
    "compact_terms",
    "probe_vectors",
    "op_distance",
    "pairing_residual",
]


@dataclass(frozen=True)
class RankOneTerm:
    """Acts as ``v -> <v, right> * left``."""

    left: HVector
    right: HVector


def _as_block(block) -> np.ndarray:
    arr = np.array(block, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MalformedBlock(f"block must be square, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StructuredOperator:
    block: np.ndarray
    terms: tuple[RankOneTerm, ...] = ()
    ambient: int | None = None  # None = infinite-dimensional ambient space

    def __post_init__(self):
        object.__setattr__(self, "block", _as_block(self.block))
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def cutoff(self) -> int:
        return self.block.shape[0]

    # -- action ------------------------------------------------------------

    def apply(self, v: HVector, tol: float = SERIES_TOL) -> HVector:
        """Operator action; inner products certified to ``tol`` each."""
        n = self.cutoff
        y = self.block @ v.values_up_to(n)
        out = HVector({j + 1: y[j] for j in range(n)})
        for term in self.terms:
            c = v.inner(term.right, tol)
            if c != 0:
                out = out + c * term.left
        return out

    # -- linear algebra ----------------------------------------------------

    def _padded(self, n: int) -> np.ndarray:
        if self.cutoff == n:
            return np.array(self.block)
        out = np.zeros((n, n), dtype=complex)
        out[: self.cutoff, : self.cutoff] = self.block
        return out

    def __add__(self, other: "StructuredOperator") -> "StructuredOperator":
        if self.ambient != other.ambient:
            raise AmbientMismatch(
                f"cannot combine ambients {self.ambient!r} and {other.ambient!r}"
            )
        n = max(self.cutoff, other.cutoff)
        return StructuredOperator(
            self._padded(n) + other._padded(n), self.terms + other.terms, self.ambient
        )

    def __sub__(self, other: "StructuredOperator") -> "StructuredOperator":
        return self + (-1.0) * other

    def __mul__(self, c: complex) -> "StructuredOperator":
        c = complex(c)
        return StructuredOperator(
            c * self.block,
            tuple(RankOneTerm(c * t.left, t.right) for t in self.terms if c != 0),
            self.ambient,
        )

    __rmul__ = __mul__

    def compose(self, other: "StructuredOperator", tol: float = SERIES_TOL) -> "StructuredOperator":
        """Structured representation of ``self o other``."""
        if self.ambient != other.ambient:
            raise AmbientMismatch(
                f"cannot compose ambients {self.ambient!r} and {other.ambient!r}"
            )
        n = max(self.cutoff, other.cutoff)
        b_outer, b_inner = self._padded(n), other._padded(n)
        terms: list[RankOneTerm] = []
        # outer operator applied to the inner operator's left factors
        for t in other.terms:
            left = self.apply(t.left, tol)
            if not left.is_structurally_zero():
                terms.append(RankOneTerm(left, t.right))
        # inner block feeding the outer functionals: <Bx, r> = <x, B^H r>
        for t in self.terms:
            rnew = b_inner.conj().T @ t.right.values_up_to(n)
            fed = HVector({j + 1: rnew[j] for j in range(n)})
            if not fed.is_structurally_zero():
                terms.append(RankOneTerm(t.left, fed))
        return StructuredOperator(b_outer @ b_inner, tuple(terms), self.ambient)

    def adjoint(self) -> "StructuredOperator":
        """Conjugate-transpose block; each term left (x) right becomes right (x) left."""
        return StructuredOperator(
            self.block.conj().T,
            tuple(RankOneTerm(t.right, t.left) for t in self.terms),
            self.ambient,
        )

    def norm_bound(self, tol: float = SERIES_TOL) -> float:
        """Certified upper bound ||block||_F + sum ||left_k|| * ||right_k||."""
        bound = float(np.linalg.norm(self.block, "fro"))
        for t in self.terms:
            bound += t.left.norm(tol) * t.right.norm(tol)
        return bound


def validate(op: StructuredOperator) -> StructuredOperator:
    """Structural validation; raises an OpValidationError subclass on failure.

    Boundedness of the represented operator is equivalent to every tail factor
    being square-summable, which is exactly what is enforced here.
    """
    if not np.all(np.isfinite(op.block.view(float))):
        raise MalformedBlock("block entries must be finite")
    for i, t in enumerate(op.terms):
        for side, vec in (("left", t.left), ("right", t.right)):
            for tail in vec.tails:
                if not is_square_summable(tail):
                    raise UnboundedTail(i, side, repr(tail))
    if op.ambient is not None:
        n = op.ambient
        if n < 1:
            raise AmbientMismatch("finite ambient dimension must be positive")
        if op.cutoff > n:
            raise AmbientMismatch(f"cutoff {op.cutoff} exceeds ambient dimension {n}")
        for i, t in enumerate(op.terms):
            for side, vec in (("left", t.left), ("right", t.right)):
                if vec.tails:
                    raise AmbientMismatch(
                        f"rank-one term {i}: {side} factor has tails in a finite ambient"
                    )
                if vec.max_finite_index > n:
                    raise AmbientMismatch(
                        f"rank-one term {i}: {side} factor has support beyond dimension {n}"
                    )
    return op


def operator(block, terms=(), ambient: int | None = None) -> StructuredOperator:
    """Build and validate a structured operator."""
    return validate(StructuredOperator(_as_block(block), tuple(terms), ambient))


def rank_one(left: HVector, right: HVector, cutoff: int = 1,
             ambient: int | None = None) -> StructuredOperator:
    op = StructuredOperator(np.zeros((cutoff, cutoff)), (RankOneTerm(left, right),), ambient)
    return validate(op)


def zero_operator(cutoff: int = 1, ambient: int | None = None) -> StructuredOperator:
    return StructuredOperator(np.zeros((cutoff, cutoff)), (), ambient)


def identity_operator(n: int) -> StructuredOperator:
    """Identity on a finite ambient space (not representable on the infinite one)."""
    return StructuredOperator(np.eye(n, dtype=complex), (), ambient=n)


def _foldable(v: HVector, n: int) -> bool:
    return not v.tails and v.max_finite_index <= n


def compact_terms(op: StructuredOperator) -> StructuredOperator:
    """Optional normalization: fold block-representable terms into the block
    and merge terms sharing a factor.  Never changes the operator's action."""
    n = op.cutoff
    block = np.array(op.block)
    kept: list[RankOneTerm] = []
    for t in op.terms:
        if t.left.is_structurally_zero() or t.right.is_structurally_zero():
            continue
        if _foldable(t.left, n) and _foldable(t.right, n):
            block += np.outer(t.left.values_up_to(n), t.right.values_up_to(n).conj())
        else:
            kept.append(t)
    merged: list[RankOneTerm] = []
    for t in kept:  # shared right factor: sum the lefts
        for i, m in enumerate(merged):
            if m.right == t.right:
                merged[i] = RankOneTerm(m.left + t.left, m.right)
                break
        else:
            merged.append(t)
    final: list[RankOneTerm] = []
    for t in merged:  # shared left factor: sum the rights
        if t.left.is_structurally_zero():
            continue
        for i, m in enumerate(final):
            if m.left == t.left:
                final[i] = RankOneTerm(m.left, m.right + t.right)
                break
        else:
            final.append(t)
    final = [t for t in final if not t.right.is_structurally_zero()]
    return StructuredOperator(block, tuple(final), op.ambient)


def probe_vectors(*ops: StructuredOperator, extra: int = 8) -> list[HVector]:
    """Deterministic probe family separating operators of this class.

    Basis vectors through the largest cutoff (plus a margin), every distinct
    tail pattern as a vector, one basis vector at each tail start and at every
    finite-support index beyond the margin.
    """
    k = max((op.cutoff for op in ops), default=1) + extra
    probes = [basis_vector(j) for j in range(1, k + 1)]
    seen_tails = set()
    far_indices = set()
    for op in ops:
        for t in op.terms:
            for vec in (t.left, t.right):
                for s in vec.tails:
                    if s not in seen_tails:
                        seen_tails.add(s)
                        probes.append(tail_vector(s))
                        if s.start > k:
                            far_indices.add(s.start)
                far_indices.update(j for j in vec.finite if j > k)
    probes.extend(basis_vector(j) for j in sorted(far_indices))
    return probes


def op_distance(a: StructuredOperator, b: StructuredOperator,
                tol: float = SERIES_TOL, probes=None) -> float:
    """Extensional distance: max over probes of ||a v - b v|| / max(1, ||v||)."""
    if probes is None:
        probes = probe_vectors(a, b)
    worst = 0.0
    for v in probes:
        d = (a.apply(v, tol) - b.apply(v, tol)).norm(tol)
        worst = max(worst, d / max(1.0, v.norm(tol)))
    return worst


def pairing_residual(op: StructuredOperator, adj: StructuredOperator,
                     tol: float = SERIES_TOL, probes=None) -> float:
    """max |<op v, w> - <v, adj w>| over a probe grid, scaled by probe norms."""
    if probes is None:
        probes = probe_vectors(op, adj, extra=5)
    images = [op.apply(v, tol) for v in probes]
    co_images = [adj.apply(w, tol) for w in probes]
    norms = [max(1.0, v.norm(tol)) for v in probes]
    worst = 0.0
    for i, v in enumerate(probes):
        for j, w in enumerate(probes):
            lhs = images[i].inner(w, tol)
            rhs = v.inner(co_images[j], tol)
            worst = max(worst, abs(lhs - rhs) / (norms[i] * norms[j]))
    return worst
