"""Square-summable tail sequences and certified inner products.

A tail sequence assigns a coefficient to every basis index ``j >= start``
following one of two closed-form patterns:

* power decay      ``coeff * j**(-exponent)``
* geometric decay  ``coeff * ratio**j``

Both kinds are closed under complex conjugation and scalar multiples, which
keeps the whole operator class closed under adjoints.  Inner products of two
tails are computed by direct summation plus a certified remainder: an
Euler-Maclaurin enclosure for power/power pairs, the closed form for
geometric/geometric pairs, and a geometric remainder bound otherwise.  Every
sum carries an absolute-error guarantee of at most the requested tolerance.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import NotSquareSummable

__all__ = [
    "SERIES_TOL",
    "PowerTail",
    "GeometricTail",
    "TailSequence",
    "power_tail",
    "geometric_tail",
    "seq_value",
    "seq_conj",
    "seq_scale",
    "is_square_summable",
    "seq_inner",
    "seq_norm_sq",
    "power_sum_remainder_bound",
]

SERIES_TOL = 1e-12

_SUM_BASE = 32  # smallest direct-summation cutoff before the certified remainder


def _require_finite(z: complex, what: str) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{what} must be finite, got {z!r}")
    return z


@dataclass(frozen=True)
class PowerTail:
    """Coefficients ``coeff * j**(-exponent)`` for ``j >= start``."""

    coeff: complex
    exponent: float
    start: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coeff", _require_finite(self.coeff, "coeff"))
        object.__setattr__(self, "exponent", float(self.exponent))
        if not math.isfinite(self.exponent):
            raise ValueError("exponent must be finite")
        if int(self.start) < 1 or int(self.start) != self.start:
            raise ValueError("start must be a positive integer")
        object.__setattr__(self, "start", int(self.start))


@dataclass(frozen=True)
class GeometricTail:
    """Coefficients ``coeff * ratio**j`` for ``j >= start``."""

    coeff: complex
    ratio: complex
    start: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coeff", _require_finite(self.coeff, "coeff"))
        object.__setattr__(self, "ratio", _require_finite(self.ratio, "ratio"))
        if int(self.start) < 1 or int(self.start) != self.start:
            raise ValueError("start must be a positive integer")
        object.__setattr__(self, "start", int(self.start))


TailSequence = PowerTail | GeometricTail


def power_tail(coeff: complex, exponent: float, start: int = 1) -> PowerTail:
    return PowerTail(complex(coeff), float(exponent), int(start))


def geometric_tail(coeff: complex, ratio: complex, start: int = 1) -> GeometricTail:
    return GeometricTail(complex(coeff), complex(ratio), int(start))


def seq_value(s: TailSequence, j: int) -> complex:
    """Coefficient of the sequence at index ``j`` (zero below ``start``)."""
    if j < 1:
        raise ValueError("indices are 1-based")
    if j < s.start:
        return 0j
    if isinstance(s, PowerTail):
        return s.coeff * float(j) ** (-s.exponent)
    return s.coeff * s.ratio**j


def seq_conj(s: TailSequence) -> TailSequence:
    """Entry-wise complex conjugate; the catalog is closed under it."""
    if isinstance(s, PowerTail):
        return PowerTail(s.coeff.conjugate(), s.exponent, s.start)
    return GeometricTail(s.coeff.conjugate(), s.ratio.conjugate(), s.start)


def seq_scale(c: complex, s: TailSequence) -> TailSequence:
    if isinstance(s, PowerTail):
        return PowerTail(c * s.coeff, s.exponent, s.start)
    return GeometricTail(c * s.coeff, s.ratio, s.start)


def is_square_summable(s: TailSequence) -> bool:
    """Catalog criterion: power needs exponent > 1/2, geometric |ratio| < 1."""
    if isinstance(s, PowerTail):
        return s.exponent > 0.5
    return abs(s.ratio) < 1.0


def _check_l2(s: TailSequence, which: str) -> None:
    if not is_square_summable(s):
        raise NotSquareSummable(f"{which} sequence {s!r} is not square-summable")


def power_sum_remainder_bound(q: float, cutoff: int) -> float:
    """Certified bound on the Euler-Maclaurin remainder of sum_{j>cutoff} j**-q.

    The enclosure keeps correction terms through the third derivative; the
    remainder of that expansion is bounded by the first omitted term because
    x**-q is completely monotone.  The bound is monotone decreasing in the
    cutoff.
    """
    n = float(cutoff + 1)
    c5 = q * (q + 1) * (q + 2) * (q + 3) * (q + 4) / 30240.0
    return c5 * n ** (-q - 5)


@lru_cache(maxsize=1 << 16)
def _power_sum(q: float, start: int, tol: float) -> float:
    """sum_{j>=start} j**-q for q > 1, absolute error <= tol."""
    m = max(start, _SUM_BASE)
    while power_sum_remainder_bound(q, m) > tol:
        m *= 2
    partial = math.fsum(float(j) ** (-q) for j in range(start, m + 1))
    n = float(m + 1)
    tail = (
        n ** (1.0 - q) / (q - 1.0)
        + 0.5 * n ** (-q)
        + (q / 12.0) * n ** (-q - 1.0)
        - (q * (q + 1) * (q + 2) / 720.0) * n ** (-q - 3.0)
    )
    return partial + tail


@lru_cache(maxsize=1 << 16)
def _power_geo_sum(p: float, rho: complex, start: int, tol: float) -> complex:
    """sum_{j>=start} j**-p * rho**j for |rho| < 1, p > 0, error <= tol."""
    r = abs(rho)
    if r == 0.0:
        return 0j
    m = max(start, _SUM_BASE)
    while (m + 1.0) ** (-p) * r ** (m + 1) / (1.0 - r) > tol:
        m *= 2
    total = 0j
    rho_j = rho**start
    for j in range(start, m + 1):
        total += float(j) ** (-p) * rho_j
        rho_j *= rho
    return total


def seq_inner(s: TailSequence, t: TailSequence, tol: float = SERIES_TOL) -> complex:
    """sum_j s_j * conj(t_j) with certified absolute error <= tol.

    Raises NotSquareSummable if either sequence fails the catalog criterion.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_l2(s, "first")
    _check_l2(t, "second")
    a = max(s.start, t.start)
    c = s.coeff * t.coeff.conjugate()
    if c == 0:
        return 0j
    scaled_tol = tol / abs(c)
    if isinstance(s, PowerTail) and isinstance(t, PowerTail):
        q = s.exponent + t.exponent
        return c * _power_sum(q, a, scaled_tol)
    if isinstance(s, GeometricTail) and isinstance(t, GeometricTail):
        rho = s.ratio * t.ratio.conjugate()
        return c * rho**a / (1.0 - rho)
    if isinstance(s, PowerTail):
        p, rho = s.exponent, t.ratio.conjugate()
    else:
        p, rho = t.exponent, s.ratio
    return c * _power_geo_sum(p, rho, a, scaled_tol)


def seq_norm_sq(s: TailSequence, tol: float = SERIES_TOL) -> float:
    """Squared l2 norm of the sequence, absolute error <= tol."""
    value = seq_inner(s, s, tol)
    return max(value.real, 0.0)
