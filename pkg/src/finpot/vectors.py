"""Vectors of the separable Hilbert space: finite support plus tail sequences.

An ``HVector`` is a sparse finite part (index -> coefficient, 1-based) together
with a list of tail sequences; its coefficient at index ``j`` is the finite
entry plus the sum of all tail values there.  The inner product is linear in
the first argument and conjugates the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotSquareSummable
from .sequences import (
    SERIES_TOL,
    GeometricTail,
    PowerTail,
    TailSequence,
    is_square_summable,
    seq_inner,
    seq_scale,
    seq_value,
)

__all__ = ["HVector", "hvector", "basis_vector", "zero_vector", "tail_vector"]


def _merge_tails(tails) -> tuple[TailSequence, ...]:
    # Tails sharing kind, decay parameter and start are combined by summing
    # coefficients; this keeps tail lists bounded under repeated arithmetic.
    merged: dict[tuple, TailSequence] = {}
    for t in tails:
        if isinstance(t, PowerTail):
            key = ("p", t.exponent, t.start)
        else:
            key = ("g", t.ratio, t.start)
        if key in merged:
            old = merged[key]
            merged[key] = old.__class__(old.coeff + t.coeff, key[1], t.start)
        else:
            merged[key] = t
    return tuple(t for t in merged.values() if t.coeff != 0)


@dataclass(frozen=True, eq=True)
class HVector:
    """Finite support plus finitely many square-summable tails.

    Canonical form: the finite map holds no explicit zeros and tails with
    identical pattern are merged.  Instances compare structurally; do not
    mutate the ``finite`` dict.
    """

    finite: dict[int, complex] = field(default_factory=dict)
    tails: tuple[TailSequence, ...] = ()

    def __post_init__(self):
        clean = {int(j): complex(c) for j, c in self.finite.items() if complex(c) != 0}
        for j, c in clean.items():
            if j < 1:
                raise ValueError("indices are 1-based")
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError(f"coefficient at index {j} must be finite, got {c!r}")
        object.__setattr__(self, "finite", clean)
        object.__setattr__(self, "tails", _merge_tails(self.tails))

    # -- pointwise access ------------------------------------------------

    def value(self, j: int) -> complex:
        v = self.finite.get(j, 0j)
        for t in self.tails:
            v += seq_value(t, j)
        return v

    def values_up_to(self, k: int) -> np.ndarray:
        """Dense coefficients on indices 1..k as a complex array."""
        out = np.zeros(k, dtype=complex)
        for j, c in self.finite.items():
            if j <= k:
                out[j - 1] += c
        js = np.arange(1, k + 1, dtype=float)
        for t in self.tails:
            if t.start > k:
                continue
            if isinstance(t, PowerTail):
                vals = t.coeff * js ** (-t.exponent)
            else:
                vals = t.coeff * np.asarray(t.ratio, dtype=complex) ** np.arange(1, k + 1)
            vals[: t.start - 1] = 0
            out += vals
        return out

    @property
    def max_finite_index(self) -> int:
        return max(self.finite, default=0)

    def is_structurally_zero(self) -> bool:
        return not self.finite and not self.tails

    def restrict_beyond(self, n: int) -> "HVector":
        """The part of the vector supported on indices > n.

        Tail patterns are kept whole; explicit finite corrections cancel any
        tail values they produce at indices <= n.
        """
        finite = {j: c for j, c in self.finite.items() if j > n}
        for j in range(1, n + 1):
            v = 0j
            for t in self.tails:
                v += seq_value(t, j)
            if v != 0:
                finite[j] = finite.get(j, 0j) - v
        return HVector(finite, self.tails)

    # -- linear structure -------------------------------------------------

    def __add__(self, other: "HVector") -> "HVector":
        finite = dict(self.finite)
        for j, c in other.finite.items():
            finite[j] = finite.get(j, 0j) + c
        return HVector(finite, self.tails + other.tails)

    def __sub__(self, other: "HVector") -> "HVector":
        return self + (-1.0) * other

    def __mul__(self, c: complex) -> "HVector":
        c = complex(c)
        if c == 0:
            return HVector()
        return HVector(
            {j: c * v for j, v in self.finite.items()},
            tuple(seq_scale(c, t) for t in self.tails),
        )

    __rmul__ = __mul__

    # -- metric structure --------------------------------------------------

    def inner(self, other: "HVector", tol: float = SERIES_TOL) -> complex:
        """<self, other>, linear in self, conjugating other; |error| <= tol."""
        for t in self.tails + other.tails:
            if not is_square_summable(t):
                raise NotSquareSummable(f"tail {t!r} is not square-summable")
        total = 0j
        for j, c in self.finite.items():
            w = other.finite.get(j, 0j)
            for t in other.tails:
                w += seq_value(t, j)
            total += c * w.conjugate()
        # finite part of `other` against tails of `self` (finite x finite done above)
        for j, c in other.finite.items():
            v = 0j
            for t in self.tails:
                v += seq_value(t, j)
            total += v * c.conjugate()
        pairs = [(s, t) for s in self.tails for t in other.tails]
        if pairs:
            each = tol / len(pairs)
            for s, t in pairs:
                total += seq_inner(s, t, each)
        return total

    def norm_sq(self, tol: float = SERIES_TOL) -> float:
        return max(self.inner(self, tol).real, 0.0)

    def norm(self, tol: float = SERIES_TOL) -> float:
        return math.sqrt(self.norm_sq(tol))

    def is_zero(self, tol: float) -> bool:
        return self.norm(min(tol, SERIES_TOL)) <= tol


def hvector(finite: dict[int, complex] | None = None, tails=()) -> HVector:
    return HVector(dict(finite or {}), tuple(tails))


def basis_vector(j: int) -> HVector:
    return HVector({int(j): 1.0 + 0j})


def zero_vector() -> HVector:
    return HVector()


def tail_vector(seq: TailSequence) -> HVector:
    return HVector({}, (seq,))
