import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finpot import (
    GeometricTail,
    NotSquareSummable,
    PowerTail,
    is_square_summable,
    seq_inner,
    seq_norm_sq,
    seq_value,
)
from finpot.sequences import power_sum_remainder_bound


def brute_power_sum(q: float, start: int, terms: int = 10**6) -> float:
    """Independent oracle: exactly-rounded direct summation plus the integral
    enclosure midpoint for the remainder."""
    m = start + terms
    partial = math.fsum(float(j) ** (-q) for j in range(start, m + 1))
    lo = (m + 1) ** (1.0 - q) / (q - 1.0)
    hi = m ** (1.0 - q) / (q - 1.0)
    return partial + 0.5 * (lo + hi)


# frozen from brute_power_sum(4.0, 5); also equals zeta(4) minus the first
# four terms to within 4e-16
SUM_J4_FROM_5 = 3.5713046987925125e-3


def test_power_sum_oracle_freeze():
    assert abs(brute_power_sum(4.0, 5) - SUM_J4_FROM_5) < 1e-15


def test_seq_value_power():
    s = PowerTail(1.0, 2.0, start=5)
    assert seq_value(s, 5) == pytest.approx(1 / 25)
    assert seq_value(s, 3) == 0
    assert seq_value(s, 7) == pytest.approx(1 / 49)


def test_seq_value_geometric():
    s = GeometricTail(1.0, 0.5, start=1)
    assert seq_value(s, 3) == pytest.approx(1 / 8)
    assert seq_value(GeometricTail(1.0, 0.5, start=4), 3) == 0


def test_seq_value_rejects_nonpositive_index():
    with pytest.raises(ValueError):
        seq_value(PowerTail(1.0, 2.0), 0)


def test_square_summable_criterion():
    assert is_square_summable(PowerTail(1.0, 2.0, 5))
    assert is_square_summable(PowerTail(1.0, 0.51, 1))
    assert not is_square_summable(PowerTail(1.0, 0.5, 1))
    # the linear-growth sequence s_j = j of the unbounded counter-example
    assert not is_square_summable(PowerTail(1.0, -1.0, 2))
    assert is_square_summable(GeometricTail(2.0, 0.99, 1))
    assert not is_square_summable(GeometricTail(2.0, 1.0, 1))


def test_seq_inner_power_power():
    s = PowerTail(1.0, 2.0, start=5)
    assert seq_inner(s, s, 1e-12) == pytest.approx(SUM_J4_FROM_5, abs=2e-12)


def test_seq_inner_distinct_starts_positive_and_tiny():
    s = PowerTail(1.0, 2.0, start=5)
    t = PowerTail(1.0, 2.0, start=10**6)
    value = seq_inner(s, t, 1e-6)
    assert value.real > 0
    assert value.real < 1e-17  # bounded by the integral remainder at 1e6


def test_seq_inner_geometric_closed_form():
    s = GeometricTail(1.0, 0.5, start=1)
    assert seq_inner(s, s, 1e-12) == pytest.approx(1 / 3, abs=1e-14)


def test_seq_norm_sq_geometric():
    assert seq_norm_sq(GeometricTail(2.0, 0.5, 1), 1e-12) == pytest.approx(4 / 3)


def test_seq_inner_mixed_kind():
    s = PowerTail(1.0, 2.0, start=1)
    t = GeometricTail(1.0, 0.5, start=1)
    oracle = math.fsum(j ** -2.0 * 0.5 ** j for j in range(1, 200))
    assert seq_inner(s, t, 1e-13) == pytest.approx(oracle, abs=1e-12)
    assert seq_inner(t, s, 1e-13) == pytest.approx(oracle, abs=1e-12)


def test_seq_inner_rejects_non_l2():
    growth = PowerTail(1.0, -1.0, 2)
    fine = PowerTail(1.0, 2.0, 5)
    with pytest.raises(NotSquareSummable):
        seq_inner(growth, fine, 1e-12)
    with pytest.raises(NotSquareSummable):
        seq_inner(fine, growth, 1e-12)
    with pytest.raises(NotSquareSummable):
        seq_norm_sq(growth, 1e-12)


def test_remainder_bound_monotone():
    bounds = [power_sum_remainder_bound(1.2, m) for m in (32, 64, 128, 256, 10**6)]
    assert all(b1 >= b2 for b1, b2 in zip(bounds, bounds[1:]))


complex_st = st.builds(
    complex,
    st.floats(-2, 2, allow_nan=False),
    st.floats(-2, 2, allow_nan=False),
)


@st.composite
def l2_tails(draw):
    if draw(st.booleans()):
        return PowerTail(draw(complex_st), draw(st.floats(0.6, 4.0)),
                         draw(st.integers(1, 30)))
    radius = draw(st.floats(0.0, 0.9))
    angle = draw(st.floats(0.0, 6.28))
    ratio = radius * complex(math.cos(angle), math.sin(angle))
    return GeometricTail(draw(complex_st), ratio, draw(st.integers(1, 30)))


@settings(max_examples=60, deadline=None)
@given(s=l2_tails(), t=l2_tails())
def test_conjugate_symmetry(s, t):
    tol = 1e-11
    forward = seq_inner(s, t, tol)
    backward = seq_inner(t, s, tol)
    assert abs(forward - backward.conjugate()) <= 2 * tol


@settings(max_examples=40, deadline=None)
@given(s=l2_tails())
def test_norm_nonnegative(s):
    assert seq_norm_sq(s, 1e-11) >= 0.0
