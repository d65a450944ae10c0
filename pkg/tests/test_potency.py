import numpy as np
import pytest

from finpot import (
    CoreSpace,
    Degenerate,
    KernelPower,
    PowerTail,
    ast_decompose,
    basis_vector,
    cn_decompose,
    compact_terms,
    drazin_inverse,
    drazin_polynomial,
    global_index,
    hvector,
    identity_operator,
    invariant_subspace,
    is_nilpotent,
    op_distance,
    operator,
    operator_power,
    poly_eval,
    probe_vectors,
    quasi_compact_order,
    rank_one,
    tail_vector,
    zero_operator,
)
from finpot.potency import matrix_index, minimal_polynomial

# ascending coefficients of det(xI - B_W) for the worked example:
# x^3 - (4+i)x^2 + (11-3i)x - (15+i)
EXAMPLE_CHAR_POLY = np.array([-(15 + 1j), 11 - 3j, -(4 + 1j), 1.0])


def nilpotent_rank_one():
    return rank_one(basis_vector(4), tail_vector(PowerTail(1.0, 2.0, 5)), cutoff=4)


# -- matrix helpers -----------------------------------------------------------


def test_minimal_polynomial_diagonal():
    p = minimal_polynomial(np.diag([2.0 + 0j, 3.0]))
    np.testing.assert_allclose(p, [6.0, -5.0, 1.0], atol=1e-10)


def test_minimal_polynomial_detects_repeats():
    # diag(2, 2) has minimal polynomial x - 2 despite dimension 2
    p = minimal_polynomial(np.diag([2.0 + 0j, 2.0]))
    np.testing.assert_allclose(p, [-2.0, 1.0], atol=1e-10)


def test_minimal_polynomial_empty():
    np.testing.assert_allclose(minimal_polynomial(np.zeros((0, 0))), [1.0])


def test_matrix_index_cases():
    assert matrix_index(np.eye(3, dtype=complex)) == 0
    jordan = np.diag([1.0, 1.0], k=1).astype(complex)  # 3x3 nilpotent, order 3
    assert matrix_index(jordan) == 3
    assert matrix_index(np.zeros((2, 2), dtype=complex)) == 1


# -- index of the operator ----------------------------------------------------


def test_global_index_example(example_op):
    assert global_index(example_op) == 2


def test_global_index_zero_infinite():
    assert global_index(zero_operator(3)) == 1


def test_global_index_finite_automorphism():
    block = np.array([[2.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 3.0]])
    assert global_index(operator(block, ambient=3)) == 0


def test_global_index_rank_one_nilpotent():
    assert global_index(nilpotent_rank_one()) == 2


# -- AST decomposition --------------------------------------------------------


def test_ast_example_core_span(example_op, example_ast):
    ast = example_ast
    assert ast.dim_w == 3
    assert ast.index == 2
    expected = [basis_vector(1), basis_vector(2) + basis_vector(4), basis_vector(3)]
    for target in expected:
        coeffs = [target.inner(w, 1e-13) for w in ast.w_basis]
        rebuilt = hvector({})
        for c, w in zip(coeffs, ast.w_basis):
            rebuilt = rebuilt + c * w
        assert (target - rebuilt).norm(1e-13) < 1e-10


def test_ast_example_annihilator(example_ast):
    m, p = example_ast.annihilator
    assert m == 2
    np.testing.assert_allclose(p, EXAMPLE_CHAR_POLY, atol=1e-9)
    assert abs(p[0]) > 1.0


def test_ast_u_membership(example_op, example_ast):
    assert example_ast.u_membership(basis_vector(7))
    assert example_ast.u_membership(basis_vector(4))
    assert example_ast.u_membership(tail_vector(PowerTail(1.0, 2.0, 9)))
    assert not example_ast.u_membership(basis_vector(1))
    assert not example_ast.u_membership(basis_vector(2) + basis_vector(4))


def test_ast_dimension_split(example_ast):
    act_dim = example_ast.active.dim
    assert example_ast.w_coords.shape[1] + example_ast.u_coords.shape[1] == act_dim


def test_ast_nilpotent_rank_one():
    ast = ast_decompose(nilpotent_rank_one())
    assert ast.dim_w == 0
    assert ast.index == 2
    m, p = ast.annihilator
    assert (m, len(p) - 1) == (2, 0)


def test_core_projector_properties(example_op, example_ast):
    proj = example_ast.core_projector
    probes = probe_vectors(example_op)
    assert op_distance(compact_terms(proj.compose(proj)), proj, probes=probes) < 1e-10
    for w in example_ast.w_basis:
        assert (proj.apply(w) - w).norm() < 1e-10
    for u_probe in (basis_vector(4), basis_vector(7),
                    tail_vector(PowerTail(1.0, 2.0, 11))):
        assert proj.apply(u_probe).norm() < 1e-10


def test_core_projector_matches_crt_polynomial(example_op, example_ast):
    # the projector equals s(op) for the polynomial s = x**m * (x**-m mod p)
    via_poly = poly_eval(example_op, example_ast.core_poly)
    assert op_distance(via_poly, example_ast.core_projector) < 1e-9


def test_global_annihilator(example_op, example_ast):
    m, p = example_ast.annihilator
    full = np.polynomial.polynomial.polymul(
        np.concatenate([np.zeros(m), [1.0]]), p)
    annihil = poly_eval(example_op, full)
    assert op_distance(annihil, zero_operator(example_op.cutoff)) < 1e-9


# -- Drazin inverse ----------------------------------------------------------


def test_drazin_zero():
    assert op_distance(drazin_inverse(zero_operator(2)), zero_operator(2)) == 0.0


def test_drazin_scaled_projection():
    op = 2.0 * rank_one(basis_vector(1), basis_vector(1))
    expected = 0.5 * rank_one(basis_vector(1), basis_vector(1))
    assert op_distance(drazin_inverse(op), expected) < 1e-12


def test_drazin_finite_invertible():
    block = np.array([[2.0, 0.0], [0.0, 4.0]])
    dz = drazin_inverse(operator(block, ambient=2))
    np.testing.assert_allclose(dz.block, np.diag([0.5, 0.25]), atol=1e-12)


def test_drazin_axioms(example_op, example_ast):
    dz = drazin_inverse(example_op, ast=example_ast)
    m = example_ast.index
    probes = probe_vectors(example_op)
    left = compact_terms(example_op.compose(dz))
    right = compact_terms(dz.compose(example_op))
    assert op_distance(left, right, probes=probes) < 1e-10
    assert op_distance(compact_terms(right.compose(dz)), dz, probes=probes) < 1e-10
    power_m = operator_power(example_op, m)
    power_m1 = compact_terms(power_m.compose(example_op))
    assert op_distance(compact_terms(power_m1.compose(dz)), power_m,
                       probes=probes) < 1e-10


def test_drazin_polynomial_agrees(example_op, example_ast):
    u = drazin_polynomial(example_ast)
    assert u[0] == 0
    via_poly = poly_eval(example_op, u)
    assert op_distance(via_poly, drazin_inverse(example_op, ast=example_ast)) < 1e-9


def test_drazin_core_action_on_u1(example_op, example_ast):
    dz = drazin_inverse(example_op, ast=example_ast)
    core = example_op.compose(dz.compose(example_op))
    image = core.apply(basis_vector(1))
    expected = {1: 1 + 1j, 2: 1.0, 4: 1.0}
    for j in range(1, 8):
        assert image.value(j) == pytest.approx(expected.get(j, 0), abs=1e-10)


# -- core-nilpotent splitting --------------------------------------------------


def test_cn_example_actions(example_cn):
    nil_u5 = example_cn.nilpotent.apply(basis_vector(5))
    assert nil_u5.value(4) == pytest.approx(1 / 25, abs=1e-11)
    assert (nil_u5 - (1 / 25) * basis_vector(4)).norm() < 1e-10
    assert example_cn.core.apply(basis_vector(5)).norm() < 1e-10
    assert example_cn.nilpotent.apply(basis_vector(3)).norm() < 1e-10


def test_cn_recomposition(example_op, example_cn):
    total = example_cn.core + example_cn.nilpotent
    assert op_distance(total, example_op) < 1e-11


def test_cn_mutual_products(example_op, example_cn):
    zero = zero_operator(example_op.cutoff)
    assert op_distance(compact_terms(
        example_cn.core.compose(example_cn.nilpotent)), zero) < 1e-10
    assert op_distance(compact_terms(
        example_cn.nilpotent.compose(example_cn.core)), zero) < 1e-10


def test_cn_of_nilpotent_is_identity_split():
    op = nilpotent_rank_one()
    cn = cn_decompose(op)
    assert op_distance(cn.core, zero_operator(op.cutoff)) < 1e-12
    assert op_distance(cn.nilpotent, op) < 1e-12


def test_cn_uniqueness_witness(example_cn):
    core_again = cn_decompose(compact_terms(example_cn.core))
    assert op_distance(core_again.core, example_cn.core) < 1e-9
    assert op_distance(core_again.nilpotent,
                       zero_operator(example_cn.core.cutoff)) < 1e-9
    nil_again = cn_decompose(compact_terms(example_cn.nilpotent))
    assert op_distance(nil_again.core,
                       zero_operator(example_cn.nilpotent.cutoff)) < 1e-9
    assert op_distance(nil_again.nilpotent, example_cn.nilpotent) < 1e-9


# -- nilpotency and the invariant subspace -------------------------------------


def test_is_nilpotent(example_op):
    verdict, order = is_nilpotent(example_op)
    assert verdict is False and order is None
    verdict, order = is_nilpotent(nilpotent_rank_one())
    assert verdict is True and order == 2


def test_quasi_compact_order(example_op, example_cn):
    assert quasi_compact_order(zero_operator(2)) == 1
    n = quasi_compact_order(example_op)
    assert n == 2
    assert op_distance(operator_power(example_op, n),
                       operator_power(example_cn.core, n)) < 1e-10


def test_invariant_subspace_core(example_op):
    answer = invariant_subspace(example_op)
    assert isinstance(answer, CoreSpace)
    assert len(answer.basis) == 3


def test_invariant_subspace_kernel_power():
    answer = invariant_subspace(nilpotent_rank_one())
    assert isinstance(answer, KernelPower)
    assert answer.power == 1
    assert answer.membership(basis_vector(4))
    assert not answer.membership(basis_vector(7))


def test_invariant_subspace_zero_degenerate():
    answer = invariant_subspace(zero_operator(2))
    assert isinstance(answer, Degenerate)
    assert "invariant" in answer.note


def test_invariant_subspace_requires_infinite_ambient():
    with pytest.raises(ValueError):
        invariant_subspace(identity_operator(2))


def test_scale_covariance(example_op, example_ast):
    scaled = (2.0 - 1.0j) * example_op
    ast2 = ast_decompose(scaled)
    assert ast2.index == example_ast.index
    assert ast2.dim_w == example_ast.dim_w
