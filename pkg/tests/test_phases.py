import cmath
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistlab import Phase, as_rational, rational_str

rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=60
)


def test_as_rational_accepts_exact_inputs():
    assert as_rational(3) == Fraction(3)
    assert as_rational("-7/12") == Fraction(-7, 12)
    assert as_rational(Fraction(5, 8)) == Fraction(5, 8)


def test_as_rational_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)
    with pytest.raises(ValueError):
        as_rational("1/0")
    with pytest.raises(ValueError):
        as_rational("nope")


@given(rationals)
def test_rational_str_round_trip(t):
    assert as_rational(rational_str(t)) == t


@given(rationals)
def test_phase_turns_reduced_mod_one(t):
    p = Phase(t)
    assert p.exact
    assert 0 <= p.turns < 1
    assert (t - p.turns) % 1 == 0


@given(rationals, rationals)
def test_phase_product_adds_turns(s, t):
    assert Phase(s) * Phase(t) == Phase(s + t)


@given(rationals)
def test_phase_conjugate_inverts(t):
    p = Phase(t)
    assert p * p.conjugate() == Phase.one()
    assert abs(p.conjugate().value - p.value.conjugate()) < 1e-12


@given(rationals, st.integers(min_value=-6, max_value=6))
def test_phase_integer_power(t, n):
    assert Phase(t) ** n == Phase(t * n)


@given(rationals)
def test_phase_value_on_unit_circle(t):
    assert abs(abs(Phase(t).value) - 1.0) < 1e-12


def test_phase_value_at_quarter_turn():
    assert abs(Phase(Fraction(1, 4)).value - 1j) < 1e-15
    assert abs(Phase(Fraction(1, 2)).value + 1.0) < 1e-15


@given(rationals, rationals)
def test_phase_scaled_multiplies_reduced_turns(t, s):
    p = Phase(t)
    assert p.scaled(s) == Phase(p.turns * s)


def test_phase_scaled_requires_exact():
    with pytest.raises(ValueError):
        Phase(0.3, exact=False).scaled("1/2")


def test_from_angle_is_inexact_but_correct():
    p = Phase.from_angle(cmath.pi / 3)
    assert not p.exact
    assert abs(p.value - cmath.exp(1j * cmath.pi / 3)) < 1e-12


def test_exact_and_inexact_phases_compare_by_value():
    assert Phase(Fraction(1, 3)) == Phase(1.0 / 3.0, exact=False)
    assert Phase(Fraction(1, 3)) != Phase(0.25, exact=False)


@given(rationals)
def test_phase_hash_consistent_with_eq(t):
    a, b = Phase(t), Phase(t + 3)
    assert a == b
    assert hash(a) == hash(b)


def test_is_one_flag():
    assert Phase(2).is_one
    assert not Phase(Fraction(1, 7)).is_one
    assert Phase(1e-15, exact=False).is_one
