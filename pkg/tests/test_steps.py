from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from abctorus.errors import ParamOutOfRange
from abctorus.exact.steps import (
    StepFunction,
    build_trapping_step,
    plateau_target,
    psi1_refine,
    psi2_refine,
    psi3_refine,
    sigma1_interchange,
    sigma2_interchange,
    sigma3_interchange,
    sigma4_band,
    sigma4_rearrange,
    staircase_profile,
)

F = Fraction


def test_breakpoints_must_start_at_zero_and_increase():
    with pytest.raises(ParamOutOfRange):
        StepFunction(F(1), (F(1, 4), F(1, 2)), (F(0), F(1)))
    with pytest.raises(ParamOutOfRange):
        StepFunction(F(1), (F(0), F(1, 2), F(1, 2)), (F(0), F(1), F(2)))
    with pytest.raises(ParamOutOfRange):
        StepFunction(F(1), (F(0), F(2)), (F(0), F(1)))


def test_evaluation_uses_half_open_pieces():
    s = StepFunction(F(1), (F(0), F(1, 2)), (F(3), F(5)))
    assert s(F(0)) == 3
    assert s(F(1, 2)) == 5
    assert s(F(499, 1000)) == 3
    assert s(F(3, 2)) == 5  # periodic continuation
    assert s(F(-1, 4)) == 5


def test_constant_profile():
    c = StepFunction.constant(F(1, 7), F(1, 3))
    assert c(F(123, 456)) == F(1, 7)
    assert c.is_periodic_with(F(1, 5))  # constants admit every period


def test_sigma1_sigma2_split_at_one_half():
    s1 = sigma1_interchange(2, 1)
    s2 = sigma2_interchange(2, 1)
    assert s1(F(1, 4)) == 0 and s1(F(3, 4)) == F(1, 2)
    assert s2(F(1, 4)) == F(1, 2) and s2(F(3, 4)) == 0
    s1b = sigma1_interchange(4, 3)
    assert s1b(F(3, 4)) == F(1, 12)


def test_sigma3_depends_on_fractional_part_of_q_x():
    s3 = sigma3_interchange(2, 3)
    assert s3.period == F(1, 3)
    assert s3(F(1, 12)) == 0  # frac(3x) = 1/4 < 1/2
    assert s3(F(1, 4)) == F(1, 2)  # frac(3x) = 3/4 >= 1/2
    s3b = sigma3_interchange(4, 1)
    assert s3b(F(1, 8)) == 0  # frac = 1/8 < 1/4
    assert s3b(F(1, 2)) == F(1, 2)


def test_sigma4_rearrange_vanishes_for_k_two():
    s = sigma4_rearrange(2, 3)
    assert s.values == (F(0),)
    assert s(F(5, 7)) == 0
    s4 = sigma4_rearrange(4, 1)
    assert s4(F(1, 4)) == 0  # frac = 1/4 < 2/4
    assert s4(F(3, 4)) == F(1, 2)


def test_sigma4_band_lives_on_top_row():
    s = sigma4_band(4, 1, 2)
    assert s(F(1, 4)) == 0
    assert s(F(1, 2)) == F(1, 2)  # 2/(kq) on x in [(l-1)/l, 1)
    s3 = sigma4_band(4, 2, 3)
    assert s3(F(1, 2)) == 0
    assert s3(F(5, 6)) == F(1, 4)


def test_psi_profiles_refine_example():
    # l = 2, q = 1: the profiles that implement one refinement stage
    p1 = psi1_refine(2, 1)
    p2 = psi2_refine(2, 1)
    p3 = psi3_refine(2, 1)
    assert p1(F(3, 5)) == F(1, 4)
    assert p2.period == F(1, 2)
    assert p2(F(7, 20)) == F(1, 2)  # 7/20 mod 1/2 lands in [1/4, 2/4)
    assert p3(F(1, 10)) == 0
    assert p3(F(1, 2)) == F(1, 4)


def test_psi_profiles_general_parameters():
    p1 = psi1_refine(4, 3)
    assert p1(F(1, 8)) == 0  # first cell carries no offset
    assert p1(F(3, 8)) == F(3, 48)  # (l-i)/(l^2 q) with i = 1
    p2 = psi2_refine(4, 3)
    assert p2.period == F(1, 12)
    assert p2(F(5, 48)) == F(1, 4)  # 5/48 mod 1/12 = 1/48, digit 1
    p3 = psi3_refine(4, 3)
    assert p3(F(3, 8)) == F(1, 48)


def test_staircase_profile_values():
    assert staircase_profile(2) == (0, 1, 0, 0)
    assert staircase_profile(3) == (0, 1, 2, 3, 3, 2, 1, 0, 0)
    assert staircase_profile(4) == (0, 1, 2, 3, 4, 5, 6, 7, 6, 5, 4, 3, 2, 1, 0, 0)


def test_trapping_step_small_case():
    s = build_trapping_step(2, 2, 1, 2, F(1, 4))
    assert s.period == F(1, 8)
    # four pieces of width 1/32 with heights (0, 1, 0, 0) * delta/(l*r)
    assert s(F(0)) == 0
    assert s(F(1, 32)) == F(1, 16)
    assert s(F(2, 32)) == 0
    assert s(F(3, 32)) == 0
    assert s(F(1, 8) + F(1, 32)) == F(1, 16)  # periodic


def test_plateau_target_equal_cells():
    s = plateau_target([F(0), F(1, 2)], 1)
    assert s(F(1, 4)) == 0
    assert s(F(3, 4)) == F(1, 2)
    s2 = plateau_target([F(1, 3), F(1, 3), F(2, 3)], 2)
    assert s2.period == F(1, 2)
    assert s2(F(0)) == F(1, 3)
    assert s2(F(5, 12)) == F(2, 3)


def test_denominator_lcm_covers_breakpoints_and_values():
    s = StepFunction(F(1, 3), (F(0), F(1, 12)), (F(1, 5), F(0)))
    L = s.denominator_lcm()
    assert L % 12 == 0 and L % 5 == 0 and L % 3 == 0


def test_is_periodic_with():
    s = sigma3_interchange(2, 3)  # period 1/3
    assert s.is_periodic_with(F(1, 3))
    assert not s.is_periodic_with(F(1, 2))


@st.composite
def step_functions(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    denom = draw(st.integers(min_value=8, max_value=24))
    cuts = draw(
        st.lists(
            st.integers(min_value=1, max_value=denom - 1),
            min_size=n - 1,
            max_size=n - 1,
            unique=True,
        )
    )
    bps = tuple(F(c, denom) for c in sorted([0] + cuts))
    vals = tuple(
        F(draw(st.integers(min_value=-8, max_value=8)), 8) for _ in range(len(bps))
    )
    return StepFunction(F(1), bps, vals)


@given(s=step_functions(), x=st.fractions(min_value=0, max_value=1, max_denominator=97))
def test_evaluation_matches_linear_scan(s, x):
    if x == 1:
        x = F(0)
    expected = s.values[0]
    for b, v in zip(s.breakpoints, s.values):
        if x >= b:
            expected = v
    assert s(x) == expected
