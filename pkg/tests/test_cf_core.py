from fractions import Fraction

import pytest

from cf_core import (CFError, DigitSequence, Exactness, IndexOutOfRangeError, InsufficientDigitsError,
                     RationalParseError, UndefinedCoefficientError, coefficient_table, coefficients,
                     convergents, d_product, expand, fold, from_bracket, from_json, future_t, normalize,
                     parse_rational, past_v, sample_generic_real, theta, theta_direct)


@pytest.mark.parametrize('text, a0, digits', [
    ('355/113', 3, (7, 16)),
    ('13/8', 1, (1, 1, 1, 2)),
    ('0.5', 0, (2,)),
    ('-7/3', -3, (1, 2)),
    ('5', 5, ()),
])
def test_expand_known_values(text, a0, digits):
    x = expand(text)
    assert x.a0 == a0
    assert x.digits == digits
    assert x.is_exact
    assert x.value == parse_rational(text)


def test_expand_truncates_at_max_digits():
    x = expand('355/113', max_digits=1)
    assert x.exactness is Exactness.TRUNCATED
    assert x.digits == (7,)
    assert x.n_safe == 1


def test_decimal_input_is_exact():
    assert parse_rational('0.1') == Fraction(1, 10)
    assert parse_rational('1.25e2') == 125
    assert parse_rational(' 3/4') == Fraction(3, 4)


@pytest.mark.parametrize('text, position', [
    ('3x', 1),
    ('1/0', 2),
    ('', 0),
    ('1.5/2', 3),
    ('1e999999999', 1),
    (' 2.5E-20001', 4),
])
def test_parse_errors_carry_position(text, position):
    with pytest.raises(RationalParseError) as exc:
        parse_rational(text)
    assert exc.value.position == position


def test_normalize_folds_trailing_one():
    assert normalize(3, [7, 15, 1]).digits == (7, 16)
    assert normalize(0, [1]) == DigitSequence(1, ())
    assert from_bracket('[3;7,15,1]') == expand('355/113')


def test_exact_sequences_must_be_canonical():
    with pytest.raises(CFError):
        DigitSequence(0, (2, 1))
    with pytest.raises(CFError):
        DigitSequence(0, (0, 2))


def test_digit_indexing():
    x = expand('355/113')
    assert x.digit(0) == 3
    assert x.digit(2) == 16
    with pytest.raises(IndexOutOfRangeError):
        x.digit(3)


def test_json_form_restores_truncated_sequence():
    x = expand('355/113', max_digits=1)
    assert from_json(x.to_json()) == x


def test_fold_matches_value():
    assert fold(1, [1, 1, 1, 2]) == Fraction(13, 8)
    assert fold(0, []) == 0


def test_convergents_of_13_over_8():
    pairs = convergents(expand('13/8'), 4)
    assert [(c.p, c.q) for c in pairs] == [(1, 1), (2, 1), (3, 2), (5, 3), (13, 8)]


def test_future_and_past():
    x = expand('13/8')
    assert future_t(x, 1) == Fraction(3, 5)
    assert past_v(x, 1) == 1
    assert past_v(x, 3) == Fraction(2, 3)
    assert past_v(x, 0) == 0
    assert future_t(x, 4) == 0


@pytest.mark.parametrize('text', ['13/8', '355/113', '104348/33215', '0.6180339887'])
def test_theta_agrees_with_convergent_form(text):
    x = expand(text)
    for n in range(len(x) + 1):
        assert theta(x, n) == theta_direct(x, n)


def test_coefficients_of_13_over_8():
    x = expand('13/8')
    first = coefficients(x, 1)
    assert first.theta == Fraction(3, 8)
    assert first.d == Fraction(5, 3)
    assert first.c == Fraction(8, 5)

    second = coefficients(x, 2)
    assert second.d_prev == Fraction(5, 3)
    assert second.d == d_product(x, 2)
    assert first.d_next == second.d


def test_d_product_matches_coefficients():
    x = expand('104348/33215')
    for n in range(1, len(x)):
        assert d_product(x, n) == coefficients(x, n).d


def test_d_product_matches_coefficients_on_random_rationals(rng):
    checked = 0
    for _ in range(1000):
        q = int(rng.integers(2, 10 ** 9))
        p = int(rng.integers(1, q))
        x = expand(Fraction(p, q))
        for n in range(1, len(x)):
            triple = coefficients(x, n)
            assert d_product(x, n) == triple.d
            assert theta_direct(x, n) == triple.theta
            checked += 1
    assert checked > 1000


def test_undefined_coefficients():
    x = expand('13/8')
    with pytest.raises(UndefinedCoefficientError):
        coefficients(x, 0)
    with pytest.raises(UndefinedCoefficientError):
        coefficients(x, 4)


def test_truncated_sequence_refuses_uncertified_digits():
    x = expand('355/113', max_digits=1)
    with pytest.raises(InsufficientDigitsError):
        future_t(x, 0)


def test_coefficient_table_rows():
    rows = coefficient_table(expand('13/8'))
    assert len(rows) == 5
    assert rows[0]['theta'] == Fraction(5, 8)
    assert rows[1]['d'] == coefficients(expand('13/8'), 2).d
    assert rows[-1]['d'] is None


def test_sample_generic_real(rng):
    x = sample_generic_real(rng, bits=256)
    assert x.exactness is Exactness.TRUNCATED
    assert x.n_safe == 256 // 6
    assert 0 < x.value < 1
    assert x.value.denominator <= 2 ** 256


def test_samples_are_reproducible():
    import numpy as np

    first = sample_generic_real(np.random.default_rng(7), bits=128)
    second = sample_generic_real(np.random.default_rng(7), bits=128)
    assert first == second
