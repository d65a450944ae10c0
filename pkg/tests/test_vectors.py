import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finpot import (
    HVector,
    NotSquareSummable,
    PowerTail,
    basis_vector,
    hvector,
    tail_vector,
    zero_vector,
)

SUM_J4_FROM_5 = 3.5713046987925125e-3  # see test_sequences oracle


def phi_star_u4():
    # u1 - 2 u3 + sum_{h>=5} h**-2 u_h
    return hvector({1: 1.0, 3: -2.0}, [PowerTail(1.0, 2.0, 5)])


def test_canonical_drops_zeros():
    v = hvector({1: 0.0, 2: 1.0})
    assert 1 not in v.finite
    assert v.finite == {2: 1.0 + 0j}


def test_tail_merging_same_pattern():
    v = hvector({}, [PowerTail(1.0, 2.0, 5), PowerTail(2.0, 2.0, 5)])
    assert len(v.tails) == 1
    assert v.tails[0].coeff == pytest.approx(3.0)
    w = hvector({}, [PowerTail(1.0, 2.0, 5), PowerTail(-1.0, 2.0, 5)])
    assert w.is_structurally_zero()


def test_value_mixes_finite_and_tails():
    v = phi_star_u4()
    assert v.value(6) == pytest.approx(1 / 36)
    assert v.value(3) == pytest.approx(-2.0)
    assert v.value(1) == pytest.approx(1.0)
    assert v.value(4) == 0


def test_add_basis_vectors():
    v = basis_vector(2) + basis_vector(4)
    assert v.value(2) == 1 and v.value(4) == 1 and v.value(3) == 0


def test_scale_to_zero():
    assert (0 * phi_star_u4()).is_structurally_zero()


def test_sub_gives_zero():
    v = phi_star_u4()
    assert (v - v).is_zero(1e-12)


def test_inner_orthonormal_basis():
    assert (basis_vector(2) + basis_vector(4)).inner(basis_vector(2)) == 1


def test_inner_w_perp_member():
    # u2 - u4 is orthogonal to u2 + u4
    lhs = basis_vector(2) - basis_vector(4)
    rhs = basis_vector(2) + basis_vector(4)
    assert lhs.inner(rhs) == 0


def test_inner_tail_tail():
    v = tail_vector(PowerTail(1.0, 2.0, 5))
    assert v.inner(v, 1e-12) == pytest.approx(SUM_J4_FROM_5, abs=2e-12)


def test_inner_finite_against_tail_exact():
    v = hvector({6: 2.0})
    t = tail_vector(PowerTail(1.0, 2.0, 5))
    assert v.inner(t) == pytest.approx(2.0 / 36)
    assert t.inner(v) == pytest.approx(2.0 / 36)


def test_norm_examples():
    assert basis_vector(3).norm() == pytest.approx(1.0)
    assert (3 * basis_vector(1) + 4 * basis_vector(2)).norm() == pytest.approx(5.0)


def test_norm_rejects_non_l2():
    bad = hvector({}, [PowerTail(1.0, -1.0, 2)])
    with pytest.raises(NotSquareSummable):
        bad.norm()


def test_values_up_to():
    v = phi_star_u4()
    vals = v.values_up_to(6)
    assert vals[0] == pytest.approx(1.0)
    assert vals[2] == pytest.approx(-2.0)
    assert vals[4] == pytest.approx(1 / 25)
    assert vals[5] == pytest.approx(1 / 36)


def test_restrict_beyond():
    v = phi_star_u4()
    rest = v.restrict_beyond(5)
    assert rest.value(1) == 0
    assert rest.value(5) == 0
    assert rest.value(6) == pytest.approx(1 / 36)
    assert rest.value(9) == pytest.approx(1 / 81)


def test_rejects_nonfinite_coefficients():
    with pytest.raises(ValueError):
        hvector({1: complex(math.inf, 0)})


small = st.floats(-3, 3, allow_nan=False)
vec_st = st.builds(
    lambda a, b, c, j: hvector({1: complex(a, b), j: complex(c, 0)},
                               [PowerTail(complex(b, a), 1.5, 4)]),
    small, small, small, st.integers(2, 12),
)


@settings(max_examples=50, deadline=None)
@given(v=vec_st, w=vec_st)
def test_inner_conjugate_symmetry_and_cauchy_schwarz(v, w):
    tol = 1e-10
    vw = v.inner(w, tol)
    wv = w.inner(v, tol)
    assert abs(vw - wv.conjugate()) <= 2 * tol
    assert abs(vw) <= v.norm(tol) * w.norm(tol) + 1e-8


@settings(max_examples=50, deadline=None)
@given(v=vec_st, w=vec_st, j=st.integers(1, 15))
def test_value_distributes_over_linear_ops(v, w, j):
    c = 1.5 - 2.0j
    assert (v + w).value(j) == pytest.approx(v.value(j) + w.value(j))
    assert (c * v).value(j) == pytest.approx(c * v.value(j))
