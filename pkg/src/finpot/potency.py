"""Index, annihilator polynomial, core/nilpotent splitting and Drazin inverse.

Every valid structured operator admits a unique invariant splitting
``H = W (+) U`` with the operator invertible on the finite-dimensional core
``W`` and nilpotent on ``U``.  The split is computed through the active
compression: the core is the stable range of the compression matrix, the
index comes from an image-chain test (the matrix index of the compression
alone can undercount, because vectors outside the active subspace may need
one extra application to land in it), and the projector onto ``W`` along
``U`` is a polynomial in the operator with zero constant term, so it stays
inside the representable class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegenerateTolerance
from .operators import (
    RankOneTerm,
    StructuredOperator,
    compact_terms,
    identity_operator,
    operator,
    zero_operator,
)
from .reduction import RANK_TOL, ActiveSpace, active_space, truncate
from .sequences import SERIES_TOL
from .vectors import HVector, basis_vector

# Polynomial evaluation in the operator algebra multiplies certified series
# errors by the projector coefficients, which can reach ~1e5 for awkward
# spectra; running the pipeline two orders tighter than the public series
# default keeps theorem residuals well under the check tolerance.
ANALYSIS_SERIES_TOL = 1e-14

__all__ = [
    "ANALYSIS_SERIES_TOL",
    "minimal_polynomial",
    "matrix_index",
    "matrix_range",
    "range_and_null",
    "global_index",
    "ASTDecomposition",
    "ast_decompose",
    "poly_eval",
    "drazin_inverse",
    "drazin_polynomial",
    "CNDecomposition",
    "cn_decompose",
    "is_nilpotent",
    "quasi_compact_order",
    "CoreSpace",
    "KernelPower",
    "Degenerate",
    "invariant_subspace",
]


# -- dense matrix helpers ----------------------------------------------------


def _svd_rank(s: np.ndarray, tol: float) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0])))


def matrix_range(a: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column space at relative rank tolerance."""
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    return u[:, : _svd_rank(s, tol)]


def range_and_null(a: np.ndarray, tol: float = RANK_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of column space and kernel from one decomposition."""
    n = a.shape[1]
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex), np.eye(n, dtype=complex)
    u, s, vh = np.linalg.svd(a)
    r = _svd_rank(s, tol)
    return u[:, :r], vh[r:].conj().T


def _normalized_power(a: np.ndarray, k: int) -> np.ndarray:
    """(a / max(1, ||a||))**k; only ranges/kernels of the result matter.

    Scaling once keeps rank decisions scale-free while letting genuinely zero
    powers stay at roundoff size (per-step renormalization would blow their
    noise back up to norm one).
    """
    scaled = a / max(1.0, np.linalg.norm(a))
    return np.linalg.matrix_power(scaled, k)


def _rank_with_floor(s: np.ndarray, tol: float, floor: float) -> int:
    """Singular values above max(tol * s_max, floor) count toward the rank.

    The explicit floor tracks accumulated matmul noise in power chains: a
    relative cutoff alone would resurrect roundoff in genuinely zero powers,
    while an absolute cutoff would silently drop weak but real directions
    once a chain's overall scale has drifted.
    """
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > max(tol * s[0], floor)))


def matrix_index(a: np.ndarray, tol: float = RANK_TOL) -> int:
    """Smallest k >= 0 with rank(a**k) == rank(a**(k+1))."""
    n = a.shape[0]
    if n == 0:
        return 0
    eps = float(np.finfo(float).eps)
    scaled = a / max(1.0, np.linalg.norm(a))
    power = np.eye(n, dtype=complex)
    prev = n
    for k in range(1, n + 2):
        power = power @ scaled
        s = np.linalg.svd(power, compute_uv=False)
        r = _rank_with_floor(s, tol, 32.0 * n * k * eps)
        if r == prev:
            return k - 1
        prev = r
    return n


def minimal_polynomial(a: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Monic minimal polynomial (ascending coefficients) via a power chain.

    The least degree whose power of ``a`` is a combination of lower powers is
    found by least squares on vectorized powers; ambiguity beyond the full
    dimension raises DegenerateTolerance.
    """
    n = a.shape[0]
    if n == 0:
        return np.array([1.0 + 0j])
    powers = [np.eye(n, dtype=complex)]
    for _ in range(n):
        powers.append(powers[-1] @ a)
    vecs = [p.reshape(-1) for p in powers]
    accept = max(tol, 1e-8)
    best = np.inf
    for deg in range(1, n + 1):
        m = np.column_stack(vecs[:deg])
        rhs = vecs[deg]
        coeffs, *_ = np.linalg.lstsq(m, rhs, rcond=None)
        residual = np.linalg.norm(m @ coeffs - rhs)
        scale = max(1.0, np.linalg.norm(rhs))
        best = min(best, residual / scale)
        if residual <= accept * scale:
            return np.concatenate([-coeffs, [1.0 + 0j]])
    raise DegenerateTolerance("minimal polynomial is ambiguous", condition=best)


def _companion(p: np.ndarray) -> np.ndarray:
    w = len(p) - 1
    c = np.zeros((w, w), dtype=complex)
    for i in range(1, w):
        c[i, i - 1] = 1.0
    c[:, w - 1] -= p[:w]
    return c


# -- index of the operator ---------------------------------------------------


def _image_coords(op: StructuredOperator, act: ActiveSpace) -> np.ndarray:
    """Coordinates of spanning probes of Im(op) within the active subspace.

    The image is spanned by the images of the block coordinates together with
    the images of each functional factor restricted beyond the cutoff.  Probes
    are normalized first so that column sizes measure action strength on unit
    vectors; otherwise a weak tail coupling would enter squared and could fall
    below the rank tolerance on one side of an adjoint pair but not the other.
    """
    probes: list[HVector] = [basis_vector(j) for j in range(1, op.cutoff + 1)]
    for t in op.terms:
        rest = t.right.restrict_beyond(op.cutoff)
        scale = rest.norm(act.series_tol)
        if scale > 0:
            probes.append((1.0 / scale) * rest)
    cols = []
    for v in probes:
        c, _ = act.coords(op.apply(v, act.series_tol))
        cols.append(c)
    if not cols:
        return np.zeros((act.dim, 0), dtype=complex)
    return np.column_stack(cols)


def _same_subspace(u: np.ndarray, w: np.ndarray, tol: float) -> bool:
    if u.shape[1] != w.shape[1]:
        return False
    if u.shape[1] == 0:
        return True
    defect = u - w @ (w.conj().T @ u)
    return float(np.linalg.norm(defect, 2)) <= max(100.0 * tol, 1e-8) * np.sqrt(u.shape[0])


def global_index(op: StructuredOperator, tol: float = RANK_TOL,
                 act: ActiveSpace | None = None) -> int:
    """Nilpotency order on the complement of the core.

    Equals the smallest n with Im(op**n) equal to the core; zero exactly for
    an automorphism of a finite ambient space.
    """
    if op.ambient is not None:
        return matrix_index(truncate(op, op.ambient), tol)
    if act is None:
        act = active_space(op, tol)
    d = act.dim
    if d == 0:
        return 1  # zero action: the whole space is the kernel
    b = act.matrix
    k_stab = matrix_index(b, tol)
    w = matrix_range(_normalized_power(b, k_stab), tol)
    b_norm = max(1.0, float(np.linalg.norm(b, 2)))
    eps = float(np.finfo(float).eps)
    j = _image_coords(op, act)
    j = j / max(1.0, np.linalg.norm(j))
    for t in range(0, d + 2):
        # the chain runs unscaled so the invertible part keeps its size; the
        # noise floor grows with the accumulated matmul error bound
        floor = 32.0 * d * (t + 1) * eps * b_norm**t
        u_full, s, _ = np.linalg.svd(j, full_matrices=False) if j.size else (
            np.zeros((d, 0), dtype=complex), np.zeros(0), None)
        u = u_full[:, : _rank_with_floor(s, tol, floor)]
        if _same_subspace(u, w, tol):
            return t + 1
        j = b @ j
    raise DegenerateTolerance("image chain failed to stabilize at the core")


# -- AST decomposition --------------------------------------------------------


@dataclass
class ASTDecomposition:
    """Invariant splitting data: core basis, index, annihilator and projector.

    ``annihilator`` is ``(m, p)`` with ``p`` monic ascending and ``p(0) != 0``;
    the full annihilating polynomial is ``x**m * p(x)``.  ``core_projector``
    projects onto the core along the nilpotent part (an oblique projector,
    never the orthogonal one; the two subspaces need not be perpendicular).
    """

    w_basis: list[HVector]
    index: int
    annihilator: tuple[int, np.ndarray]
    core_projector: StructuredOperator
    active: ActiveSpace
    w_coords: np.ndarray
    u_coords: np.ndarray
    b_w: np.ndarray
    crt_condition: float
    core_poly: np.ndarray = field(repr=False)
    _index_power: StructuredOperator | None = field(default=None, repr=False)

    @property
    def dim_w(self) -> int:
        return len(self.w_basis)

    def u_membership(self, v: HVector, tol: float = 1e-8) -> bool:
        """Whether ||op**index v|| <= tol * ||v|| (kernel-power membership)."""
        scale = v.norm(self.active.series_tol)
        if scale == 0.0:
            return True
        if self._index_power is None:  # index 0: automorphism, kernel is {0}
            return False
        image = self._index_power.apply(v, self.active.series_tol)
        return image.norm(self.active.series_tol) <= tol * scale


def poly_eval(op: StructuredOperator, coeffs: np.ndarray,
              series_tol: float = ANALYSIS_SERIES_TOL) -> StructuredOperator:
    """Evaluate a polynomial at the operator inside the structured class.

    Horner's scheme on pairs (alpha, R) standing for ``alpha*Id + R``: the
    identity is never materialized, and intermediate norms stay near the
    partial evaluations instead of the raw operator powers (monomial powers
    of a large-norm operator would lose digits to cancellation).  A nonzero
    constant term is only representable on a finite ambient space.
    """
    coeffs = npoly.polytrim(np.asarray(coeffs, dtype=complex), tol=0.0)
    if coeffs[0] != 0 and op.ambient is None:
        raise ValueError("nonzero constant term requires a finite ambient space")
    alpha = complex(coeffs[-1])
    rest = zero_operator(op.cutoff, op.ambient)
    for k in range(len(coeffs) - 2, -1, -1):
        rest = compact_terms(alpha * op + op.compose(rest, series_tol))
        alpha = complex(coeffs[k])
    if alpha != 0:
        rest = rest + alpha * identity_operator(op.ambient)
    return compact_terms(rest)


def operator_power(op: StructuredOperator, k: int,
                   series_tol: float = ANALYSIS_SERIES_TOL) -> StructuredOperator:
    if k < 1:
        raise ValueError("power must be >= 1")
    out = op
    for _ in range(k - 1):
        out = compact_terms(out.compose(op, series_tol))
    return out


def ast_decompose(op: StructuredOperator, tol: float = RANK_TOL,
                  series_tol: float = ANALYSIS_SERIES_TOL) -> ASTDecomposition:
    """Compute the invariant core/nilpotent splitting of a valid operator."""
    act = active_space(op, tol, series_tol)
    m = global_index(op, tol, act=act)
    d = act.dim
    b = act.matrix
    if m == 0:
        w_coords = np.eye(d, dtype=complex)
        u_coords = np.zeros((d, 0), dtype=complex)
    else:
        w_coords, u_coords = range_and_null(_normalized_power(b, m), tol)
    b_w = w_coords.conj().T @ b @ w_coords
    p = minimal_polynomial(b_w, tol)
    w = len(p) - 1
    if w > 0 and abs(p[0]) <= max(tol, 1e-12) * max(1.0, np.abs(p).max()):
        raise DegenerateTolerance(
            "annihilator factor has (numerically) vanishing constant term",
            condition=float(abs(p[0])),
        )
    cond = 1.0
    w_basis = [act.lift(w_coords[:, i]) for i in range(w_coords.shape[1])]
    index_power = operator_power(op, m, series_tol) if m >= 1 else None
    if m == 0:
        core_poly = np.array([1.0 + 0j])
        projector = identity_operator(op.ambient)
    elif w == 0:
        core_poly = np.array([0.0 + 0j])
        projector = zero_operator(op.cutoff, op.ambient)
    else:
        comp = _companion(p)
        comp_m = np.linalg.matrix_power(comp, m)
        cond = float(np.linalg.cond(comp_m))
        e1 = np.zeros(w, dtype=complex)
        e1[0] = 1.0
        inv_xm = np.linalg.solve(comp_m, e1)  # x**-m modulo p
        core_poly = np.concatenate([np.zeros(m, dtype=complex), inv_xm])
        # the projector equals s(op) with s = x**m * (x**-m mod p), but is
        # assembled through the core inverse: the polynomial's monomial
        # coefficients can reach 1e10 on awkward spectra and poison the
        # evaluation, while the factored route keeps errors near eps * cond
        dz = _structural_drazin(op, w_basis, b_w, m, index_power, series_tol)
        projector = compact_terms(dz.compose(op, series_tol))
    return ASTDecomposition(
        w_basis=w_basis,
        index=m,
        annihilator=(m, p),
        core_projector=projector,
        active=act,
        w_coords=w_coords,
        u_coords=u_coords,
        b_w=b_w,
        crt_condition=cond,
        core_poly=core_poly,
        _index_power=index_power,
    )


# -- Drazin inverse and core-nilpotent splitting -------------------------------


def _structural_drazin(op: StructuredOperator, w_basis: list[HVector],
                       b_w: np.ndarray, m: int,
                       index_power: StructuredOperator,
                       series_tol: float) -> StructuredOperator:
    """Core inverse extended by zero: L o op**m with L reading coordinates in
    the orthonormal core basis and applying the inverse of b_w**(m+1).

    Inputs from op**m lie inside the core, where orthonormal coordinate
    reading is exact, so this equals the Drazin inverse on the whole space.
    """
    w = len(w_basis)
    coeff = np.linalg.solve(np.linalg.matrix_power(b_w, m + 1), np.eye(w, dtype=complex))
    terms = []
    for j in range(w):
        left = HVector()
        for i in range(w):
            if coeff[i, j] != 0:
                left = left + coeff[i, j] * w_basis[i]
        terms.append(RankOneTerm(left, w_basis[j]))
    reader = StructuredOperator(np.zeros((op.cutoff, op.cutoff)), tuple(terms), op.ambient)
    return compact_terms(reader.compose(index_power, series_tol))


def drazin_inverse(op: StructuredOperator, tol: float = RANK_TOL,
                   series_tol: float = ANALYSIS_SERIES_TOL,
                   ast: ASTDecomposition | None = None) -> StructuredOperator:
    """Inverse on the core extended by zero on the nilpotent part.

    Equals u(op) for the reduced polynomial u = (x**-1 mod p) * s mod x**m p;
    the operator is assembled through the factored core-inverse route for
    numerical stability (see ast_decompose).
    """
    if ast is None:
        ast = ast_decompose(op, tol, series_tol)
    m, p = ast.annihilator
    w = len(p) - 1
    if w == 0:
        return zero_operator(op.cutoff, op.ambient)
    if m == 0:
        return operator(np.linalg.inv(truncate(op, op.ambient)), ambient=op.ambient)
    return _structural_drazin(op, ast.w_basis, ast.b_w, m, ast._index_power, series_tol)


def drazin_polynomial(ast: ASTDecomposition) -> np.ndarray:
    """Coefficients of the zero-constant polynomial u with u(op) = drazin(op).

    u = (x**-1 mod p) * s reduced mod x**m * p, where s is the core projector
    polynomial; exposed for verification, not used in the construction.
    """
    m, p = ast.annihilator
    w = len(p) - 1
    if w == 0:
        return np.array([0.0 + 0j])
    if m == 0:
        raise ValueError("index-zero operators are invertible; no reduction applies")
    comp = _companion(p)
    e1 = np.zeros(w, dtype=complex)
    e1[0] = 1.0
    inv_x = np.linalg.solve(comp, e1)  # x**-1 modulo p
    u = npoly.polymul(inv_x, ast.core_poly)
    annihilator_poly = npoly.polymul(np.concatenate([np.zeros(m), [1.0]]), p)
    if len(u) >= len(annihilator_poly):
        _, u = npoly.polydiv(u, annihilator_poly)
    u = np.asarray(u, dtype=complex)
    u[0] = 0.0  # exact: the reduced polynomial keeps the x**m factor
    return u


@dataclass
class CNDecomposition:
    """Unique splitting into a core part (index <= 1) and a nilpotent part
    with mutually zero products; coincides with the West decomposition."""

    core: StructuredOperator
    nilpotent: StructuredOperator


def cn_decompose(op: StructuredOperator, tol: float = RANK_TOL,
                 series_tol: float = ANALYSIS_SERIES_TOL,
                 ast: ASTDecomposition | None = None) -> CNDecomposition:
    """core = op o drazin(op) o op; nilpotent = op - core."""
    if ast is None:
        ast = ast_decompose(op, tol, series_tol)
    dz = drazin_inverse(op, tol, series_tol, ast=ast)
    core = compact_terms(op.compose(dz.compose(op, series_tol), series_tol))
    nil = compact_terms(op - core)
    return CNDecomposition(core, nil)


def is_nilpotent(op: StructuredOperator, tol: float = RANK_TOL,
                 ast: ASTDecomposition | None = None) -> tuple[bool, int | None]:
    """(True, order) when the core is trivial, else (False, None)."""
    if ast is None:
        ast = ast_decompose(op, tol)
    if ast.dim_w == 0:
        return True, ast.index
    return False, None


def quasi_compact_order(op: StructuredOperator, tol: float = RANK_TOL,
                        ast: ASTDecomposition | None = None) -> int:
    """Smallest n with op**n equal to a power of the compact core part."""
    if ast is not None:
        return ast.index
    return global_index(op, tol)


# -- closed invariant subspace ---------------------------------------------


@dataclass
class CoreSpace:
    """A nontrivial closed invariant subspace: the finite-dimensional core."""

    basis: list[HVector]


@dataclass
class KernelPower:
    """Invariant subspace Ker(op**power) for a nilpotent operator."""

    power: int
    membership: Callable[[HVector], bool]


@dataclass
class Degenerate:
    note: str


def invariant_subspace(op: StructuredOperator, tol: float = RANK_TOL
                       ) -> CoreSpace | KernelPower | Degenerate:
    """A nontrivial closed invariant subspace on the infinite ambient space.

    Non-nilpotent operators contribute their core; nilpotent ones of order
    r >= 2 contribute Ker(op**(r-1)).  The zero operator (order 1) is
    degenerate: every closed subspace is invariant, none is canonical.
    """
    if op.ambient is not None:
        raise ValueError("invariant_subspace expects the infinite ambient space")
    ast = ast_decompose(op, tol)
    nilpotent, order = is_nilpotent(op, tol, ast=ast)
    if not nilpotent:
        return CoreSpace(list(ast.w_basis))
    if order is not None and order >= 2:
        power = operator_power(op, order - 1, ast.active.series_tol)

        def membership(v: HVector, _p=power, _tol=max(tol, 1e-8),
                       _stol=ast.active.series_tol) -> bool:
            scale = v.norm(_stol)
            if scale == 0.0:
                return True
            return _p.apply(v, _stol).norm(_stol) <= _tol * scale

        return KernelPower(order - 1, membership)
    return Degenerate(
        "the operator is zero: every closed subspace is invariant, "
        "so no canonical nontrivial choice exists"
    )
