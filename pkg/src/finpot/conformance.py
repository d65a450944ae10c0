"""Random operator generation and the named theorem suite.

``random_finite_potent`` builds valid operators with a prescribed core
dimension, nilpotent block and tail terms; generation is deterministic per
seed.  ``run_conformance`` evaluates the eight named checks T1..T8 on one
operator, records residuals, and never aborts on an individual failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .adjoint import adjoint_structure
from .operators import (
    RankOneTerm,
    StructuredOperator,
    compact_terms,
    identity_operator,
    op_distance,
    validate,
    zero_operator,
)
from .potency import ast_decompose, cn_decompose, drazin_inverse, operator_power, poly_eval
from .reduction import RANK_TOL
from .sequences import GeometricTail, PowerTail
from .serialization import op_fingerprint
from .spectral import DET_CONVENTION_NOTE, eigen, riesz_trace, spectrum, trace_det_report
from .vectors import HVector, hvector, tail_vector

__all__ = [
    "GenParams",
    "random_finite_potent",
    "paper_example",
    "CheckResult",
    "ConformanceReport",
    "run_conformance",
    "CHECK_TOL",
]

CHECK_TOL = 1e-7


@dataclass(frozen=True)
class GenParams:
    """Deterministic generation parameters for random valid operators.

    Core eigenvalues are sampled in an annulus bounded away from zero with a
    pairwise separation floor, which keeps the polynomial projector solve
    well-conditioned; tail terms map into the nilpotent sector so basis
    vectors beyond the cutoff stay inside the kernel-power subspace.
    ``tail_left_terms`` adds terms whose left factor itself carries a power
    tail; those make finite truncations genuinely approximate (used by the
    truncation-convergence study).
    """

    seed: int
    max_core_dim: int = 5
    max_nilpotent_dim: int = 4
    max_tail_terms: int = 3
    magnitude: float = 1.0
    eigen_band: tuple[float, float] = (0.7, 1.3)
    min_eigen_gap: float = 0.25
    tail_left_terms: int = 0

    def __post_init__(self):
        if not (0 <= self.max_core_dim <= 8):
            raise ValueError("max_core_dim must be within 0..8")
        if not (0 <= self.max_nilpotent_dim <= 8):
            raise ValueError("max_nilpotent_dim must be within 0..8")
        if not (0 <= self.max_tail_terms <= 4):
            raise ValueError("max_tail_terms must be within 0..4")
        if self.magnitude <= 0:
            raise ValueError("magnitude must be positive")


def _random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def _random_complex(rng: np.random.Generator, bound: float) -> complex:
    radius = rng.uniform(0.0, bound)
    angle = rng.uniform(0.0, 2.0 * np.pi)
    return radius * complex(np.cos(angle), np.sin(angle))


def random_finite_potent(params: GenParams) -> StructuredOperator:
    """Seeded valid operator: conjugated invertible-core + strict-nilpotent
    block plus rank-one tail terms mapping into the nilpotent sector."""
    rng = np.random.default_rng(params.seed)
    d = int(rng.integers(0, params.max_core_dim + 1))
    r = int(rng.integers(0, params.max_nilpotent_dim + 1))
    n = max(d + r, 1)
    mag = params.magnitude
    inner = np.zeros((n, n), dtype=complex)
    lams: list[complex] = []
    while len(lams) < d:
        radius = rng.uniform(params.eigen_band[0], params.eigen_band[1]) * mag
        angle = rng.uniform(0.0, 2.0 * np.pi)
        z = radius * complex(np.cos(angle), np.sin(angle))
        if all(abs(z - w) >= params.min_eigen_gap * mag for w in lams):
            lams.append(z)
    for i in range(d):
        inner[i, i] = lams[i]
        for j in range(i + 1, d):
            inner[i, j] = _random_complex(rng, 0.5 * mag)
    for i in range(d, d + r):
        for j in range(i + 1, d + r):
            inner[i, j] = _random_complex(rng, mag)
    sing = rng.uniform(0.8, 1.25, size=n)
    s = _random_unitary(rng, n) @ np.diag(sing) @ _random_unitary(rng, n)
    s_inv = np.linalg.inv(s)
    block = s @ inner @ s_inv
    terms: list[RankOneTerm] = []
    n_tails = int(rng.integers(0, params.max_tail_terms + 1)) if r > 0 else 0
    for _ in range(n_tails):
        start = n + int(rng.integers(1, 6))
        # coupling strengths are kept well above the rank tolerance so index
        # decisions stay stable on both sides of an adjoint pair
        angle = rng.uniform(0.0, 2.0 * np.pi)
        coeff = rng.uniform(0.2, 1.0) * mag * complex(np.cos(angle), np.sin(angle))
        if rng.random() < 0.5:
            seq = PowerTail(coeff, float(rng.uniform(1.0, 3.0)), start)
        else:
            angle = rng.uniform(0.0, 2.0 * np.pi)
            ratio = rng.uniform(0.4, 0.8) * complex(np.cos(angle), np.sin(angle))
            seq = GeometricTail(coeff, ratio, start)
        coords = np.zeros(n, dtype=complex)
        for i in range(d, d + r):
            coords[i] = _random_complex(rng, mag)
        left_vals = s @ coords
        left = hvector({j + 1: left_vals[j] for j in range(n)})
        if left.is_structurally_zero():
            continue
        terms.append(RankOneTerm(left, tail_vector(seq)))
    for _ in range(params.tail_left_terms):
        start = n + int(rng.integers(1, 4))
        cl = 0.4 * mag + 0.4 * mag * rng.random()
        cr = 0.4 * mag + 0.4 * mag * rng.random()
        left = tail_vector(PowerTail(cl, 2.0, start))
        right = tail_vector(PowerTail(cr, 2.0, start))
        terms.append(RankOneTerm(left, right))
    return validate(StructuredOperator(block, tuple(terms), None))


def paper_example() -> StructuredOperator:
    """The built-in worked example: a 4x4 block plus one power tail term.

    Basis actions: u1 -> (1+i)u1 + u2 + u4; u2 -> 2u1 + (5-3i)u3;
    u3 -> u1 - 2u2 + 3u3 - 2u4; u4 -> 0; uj -> j**-2 u4 for j >= 5.
    """
    block = np.zeros((4, 4), dtype=complex)
    block[:, 0] = [1 + 1j, 1, 0, 1]
    block[:, 1] = [2, 0, 5 - 3j, 0]
    block[:, 2] = [1, -2, 3, -2]
    term = RankOneTerm(hvector({4: 1.0}), tail_vector(PowerTail(1.0, 2.0, 5)))
    return validate(StructuredOperator(block, (term,), None))


# -- the named checks -----------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    description: str
    residual: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "residual": self.residual,
            "passed": self.passed,
            "details": self.details,
        }


@dataclass
class ConformanceReport:
    fingerprint: str
    tol: float
    checks: list[CheckResult]
    notes: tuple[str, ...] = (DET_CONVENTION_NOTE,)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 2

    def to_json_obj(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "tol": self.tol,
            "passed": self.passed,
            "checks": [c.to_json_obj() for c in self.checks],
            "notes": list(self.notes),
        }


def _c_pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def run_conformance(op: StructuredOperator, tol: float = CHECK_TOL,
                    rank_tol: float = RANK_TOL) -> ConformanceReport:
    """Evaluate T1..T8 on one operator; failures are recorded, never raised."""
    fingerprint = op_fingerprint(op)
    rng = np.random.default_rng(int(fingerprint[:12], 16))
    checks: list[CheckResult] = []

    def record(name: str, description: str, fn) -> None:
        try:
            residual, passed, details = fn()
        except Exception as exc:  # a failing check must not abort the suite
            checks.append(CheckResult(name, description, float("inf"), False,
                                      {"error": f"{type(exc).__name__}: {exc}"}))
            return
        checks.append(CheckResult(name, description, float(residual), passed, details))

    try:
        ast = ast_decompose(op, rank_tol)
        cn = cn_decompose(op, rank_tol, ast=ast)
        report = trace_det_report(op, rank_tol, ast=ast, cn=cn)
        setup_error = None
    except Exception as exc:
        ast = cn = report = None
        setup_error = f"{type(exc).__name__}: {exc}"

    if setup_error is not None:
        for name, desc in [
            ("T1", "trace equality"), ("T2", "determinant formulas"),
            ("T3", "adjoint structure"), ("T4", "core-nilpotent axioms"),
            ("T5", "spectrum shape"), ("T6", "quasi-compact power identity"),
            ("T7", "commuting-factor trace"), ("T8", "similarity-invariant trace"),
        ]:
            checks.append(CheckResult(name, desc, float("inf"), False,
                                      {"error": setup_error}))
        return ConformanceReport(fingerprint, tol, checks)

    def t1():
        scale = 1.0 + abs(report.tate)
        residual = max(abs(report.tate - report.leray),
                       abs(report.tate - report.riesz),
                       abs(report.tate - report.diagonal)) / scale
        details = {k: _c_pair(v) for k, v in [
            ("tate", report.tate), ("leray", report.leray),
            ("riesz", report.riesz), ("diagonal", report.diagonal)]}
        return residual, residual <= tol, details

    def t2():
        dets = [report.det_restriction, report.det_product,
                report.det_exterior, report.det_dense]
        scale = 1.0 + abs(report.det_restriction)
        residual = max(abs(x - y) for x in dets for y in dets) / scale
        details = {k: _c_pair(v) for k, v in [
            ("restriction", report.det_restriction), ("product", report.det_product),
            ("exterior", report.det_exterior), ("dense", report.det_dense)]}
        return residual, residual <= tol, details

    def t3():
        adj = adjoint_structure(op, rank_tol)
        residual = adj.max_residual()
        ok = adj.passed(tol)
        return residual, ok, adj.to_json_obj()

    def t4():
        dz = drazin_inverse(op, rank_tol, ast=ast)
        m = ast.index
        stol = ast.active.series_tol
        left = compact_terms(op.compose(dz, stol))
        right = compact_terms(dz.compose(op, stol))
        gaps = {
            "commute": op_distance(left, right),
            "inner": op_distance(compact_terms(right.compose(dz, stol)), dz),
            "recompose": op_distance(op, cn.core + cn.nilpotent),
            "products": max(
                op_distance(compact_terms(cn.core.compose(cn.nilpotent, stol)),
                            zero_operator(op.cutoff, op.ambient)),
                op_distance(compact_terms(cn.nilpotent.compose(cn.core, stol)),
                            zero_operator(op.cutoff, op.ambient))),
        }
        if m >= 1:
            power_m = operator_power(op, m, stol)
            power_next = compact_terms(power_m.compose(op, stol))
            gaps["power"] = op_distance(
                compact_terms(power_next.compose(dz, stol)), power_m)
        else:
            gaps["power"] = op_distance(left, identity_operator(op.ambient))
        residual = max(gaps.values())
        return residual, residual <= tol, {k: float(v) for k, v in gaps.items()}

    def t5():
        spec = spectrum(op, rank_tol, ast=ast)
        counts_ok = spec.total_multiplicity == ast.dim_w
        zero_ok = spec.contains_zero == (ast.index >= 1)
        residual = spec.max_residual
        details = {
            "eigenvalues": [[_c_pair(p.value), p.multiplicity] for p in spec.eigenpairs],
            "dim_w": ast.dim_w,
            "contains_zero": spec.contains_zero,
        }
        return residual, counts_ok and zero_ok and residual <= max(tol, 1e-6), details

    def t6():
        m = max(ast.index, 1)
        stol = ast.active.series_tol
        residual = op_distance(operator_power(op, m, stol),
                               operator_power(cn.core, m, stol) if ast.dim_w else
                               zero_operator(op.cutoff, op.ambient))
        return residual, residual <= tol, {"order": m}

    def t7():
        stol = ast.active.series_tol
        # the identity holds for every polynomial factor, so pick one whose
        # composed spectrum is well conditioned: moduli near one and gaps not
        # collapsed (a bad draw would feed the downstream splitting an
        # operator with a needlessly ill-conditioned projector solve)
        lam = np.linalg.eigvals(ast.b_w) if ast.dim_w else np.zeros(0)
        damp = max(1.0, op.norm_bound(stol))
        best_coeffs, best_score = None, -1.0
        for _ in range(8):
            coeffs = np.concatenate(
                [[0.0], 0.5 * (rng.normal(size=3) + 1j * rng.normal(size=3))])
            coeffs = coeffs / damp ** np.arange(len(coeffs))
            if lam.size == 0:
                best_coeffs = coeffs
                break
            mu = sum(coeffs[k] * lam ** (k + 1) for k in range(1, len(coeffs)))
            peak = np.abs(mu).max()
            if peak == 0.0:
                continue
            coeffs, mu = coeffs / peak, mu / peak
            score = float(np.abs(mu).min())
            if mu.size > 1:
                gaps = [abs(a - b) for i, a in enumerate(mu) for b in mu[i + 1:]]
                score = min(score, min(gaps))
            if score > best_score:
                best_coeffs, best_score = coeffs, score
            if score >= 0.12:
                break
        g = poly_eval(op, best_coeffs, stol)
        left = riesz_trace(compact_terms(g.compose(op, stol)), rank_tol)
        right = riesz_trace(compact_terms(op.compose(g, stol)), rank_tol)
        residual = abs(left - right) / (1.0 + abs(left))
        return residual, residual <= tol, {"left": _c_pair(left), "right": _c_pair(right)}

    def t8():
        w = ast.dim_w
        if w == 0:
            return 0.0, True, {"note": "trivial core"}
        f = np.eye(w, dtype=complex) + 0.3 * (rng.normal(size=(w, w))
                                              + 1j * rng.normal(size=(w, w))) / np.sqrt(w)
        conjugated = f @ ast.b_w @ np.linalg.inv(f)
        total = sum(p.value * p.multiplicity for p in eigen(conjugated, rank_tol))
        residual = abs(total - report.riesz) / (1.0 + abs(report.riesz))
        return residual, residual <= tol, {"conjugated_sum": _c_pair(complex(total))}

    record("T1", "trace equality across the four trace paths", t1)
    record("T2", "determinant formulas against the dense oracle", t2)
    record("T3", "adjoint structure suite", t3)
    record("T4", "Drazin and core-nilpotent axioms on probes", t4)
    record("T5", "finite spectrum with matching multiplicities", t5)
    record("T6", "power identity with the compact core part", t6)
    record("T7", "commuting-factor trace identity", t7)
    record("T8", "similarity invariance at the compression level", t8)
    return ConformanceReport(fingerprint, tol, checks)
