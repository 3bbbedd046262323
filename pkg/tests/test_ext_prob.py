from fractions import Fraction

import mpmath
import pytest

from services.ext_prob import ExtProb


def test_normalized_representation():
    x = ExtProb(3.0, 4)
    assert x.mantissa == 0.75
    assert x.exp2 == 6
    assert ExtProb.zero().exp2 == 0


def test_pow2_is_exact_far_below_double_range():
    x = ExtProb.pow2(-10 ** 6)
    assert x.log2() == -10 ** 6
    assert x.to_float() == 0.0
    assert ExtProb.zero() < x < ExtProb.pow2(-10 ** 6 + 1) < ExtProb.one()


def test_from_fraction_rounds_correctly():
    assert ExtProb.from_fraction(Fraction(15, 16)).to_fraction() == Fraction(15, 16)
    third = ExtProb.from_fraction(Fraction(1, 3))
    assert third.to_float() == 1 / 3


def test_repeated_squaring_tracks_closed_form():
    x = ExtProb.from_fraction(Fraction(15, 16))
    for _ in range(10):
        x = x.square()
    with mpmath.workprec(200):
        expected = (mpmath.mpf(15) / 16) ** 1024
    assert x.relative_error(expected) < 1e-12
    assert abs(x.to_float() - 1.989e-29) / 1.989e-29 < 1e-3


def test_arithmetic_and_monus():
    half = ExtProb(0.5)
    quarter = ExtProb(0.25)
    assert half + quarter == ExtProb(0.75)
    assert half - quarter == quarter
    assert half * quarter == ExtProb.pow2(-3)
    assert quarter.monus(half).is_zero()
    with pytest.raises(ValueError):
        quarter - half


def test_clamp_and_probability_range():
    big = ExtProb.pow2(34)
    assert not big.is_probability()
    assert big.clamp01() == ExtProb.one()
    assert ExtProb(0.3).is_probability()


def test_rejects_negative_and_nan():
    with pytest.raises(ValueError):
        ExtProb(-0.5)
    with pytest.raises(ValueError):
        ExtProb(float('nan'))
    with pytest.raises(ValueError):
        ExtProb.from_fraction(Fraction(-1, 2))


def test_immutable():
    x = ExtProb(0.5)
    with pytest.raises(AttributeError):
        x.mantissa = 0.75


def test_dict_form_and_decimal():
    x = ExtProb.from_mpf(mpmath.exp(-64))
    data = x.to_dict()
    assert set(data) == {'mantissa', 'exp2', 'decimal'}
    assert ExtProb.from_dict(data) == x
    assert abs(float(data['decimal']) - 1.603811e-28) / 1.603811e-28 < 1e-6


def test_mixed_comparisons():
    assert ExtProb(0.5) == 0.5
    assert ExtProb(0.5) < Fraction(2, 3)
    assert ExtProb.pow2(-60) > 0
    assert hash(ExtProb(0.5)) == hash(ExtProb.pow2(-1))


def test_comparisons_with_values_outside_the_range():
    nan = float('nan')
    x = ExtProb(0.25)
    assert not (x == nan) and x != nan
    assert not (x < nan) and not (x > nan) and not (x <= nan) and not (x >= nan)
    assert x > -1.0 and ExtProb.zero() > -0.5 and x >= -3
    assert not (x < Fraction(-1, 2))
    assert x < float('inf') and x > float('-inf')
    assert ExtProb.pow2(2000) < 10 ** 700
    assert (x == 'a') is False


def test_decimal_of_huge_exponents():
    assert ExtProb.pow2(-5000).decimal() == '7.079811e-1506'
    assert ExtProb.pow2(10000).decimal(4) == '1.995e+3010'
    tiny = ExtProb(0.75, -(1 << 900))
    exp10 = int(tiny.decimal().split('e')[1])
    assert abs(exp10 - tiny.log10()) <= 1e-12 * abs(tiny.log10())
