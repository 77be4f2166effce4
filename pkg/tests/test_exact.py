from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rhocob.errors import NotInvertible, ZeroInput
from rhocob.exact import (
    Residue,
    as_rational,
    factorize,
    format_rational,
    is_prime,
    mod_inverse,
    normalize_mod,
    padic_valuation,
)

rationals = st.fractions(max_denominator=10**6).filter(lambda q: abs(q) < 10**9)


@pytest.mark.parametrize(
    "q, modulus, expected",
    [(0, 2, 0), (Fraction(-4, 3), 2, Fraction(2, 3)), (Fraction(7, 5), 1, Fraction(2, 5))],
)
def test_normalize_mod_examples(q, modulus, expected):
    assert normalize_mod(q, modulus) == Residue(expected, modulus)
    assert normalize_mod(q, modulus).value == expected


def test_mod_inverse_examples():
    assert mod_inverse(1, 27) == 1
    assert mod_inverse(2, 27) == 14
    with pytest.raises(NotInvertible):
        mod_inverse(3, 27)


def test_padic_valuation_examples():
    assert padic_valuation(27, 3) == 3
    assert padic_valuation(45, 3) == 2
    with pytest.raises(ZeroInput):
        padic_valuation(0, 3)


def test_format_and_parse_rationals():
    assert format_rational(Fraction(3, 1)) == "3"
    assert format_rational(Fraction(-1, 2)) == "-1/2"
    assert as_rational("-4/3") == Fraction(-4, 3)
    assert as_rational("5") == 5


def test_residue_arithmetic_is_closed():
    a = Residue(Fraction(2, 3), 2)
    assert a + a == Residue(Fraction(4, 3), 2)
    assert 3 * a == Residue(0, 2)
    assert -a == Residue(Fraction(4, 3), 2)
    assert str(Residue(Fraction(-1, 3), 1)) == "2/3"


def test_primes_and_factorization():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert factorize(45) == {3: 2, 5: 1}
    assert factorize(1) == {}


@given(rationals, rationals, st.sampled_from([1, 2]))
def test_normalize_is_idempotent_and_additive(a, b, modulus):
    na, nb = normalize_mod(a, modulus), normalize_mod(b, modulus)
    assert normalize_mod(na.value, modulus) == na
    assert 0 <= na.value < modulus
    assert normalize_mod(a + b, modulus) == normalize_mod(na.value + nb.value, modulus)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**5))
def test_mod_inverse_inverts_coprime_pairs(a, m):
    try:
        b = mod_inverse(a, m)
    except NotInvertible:
        from math import gcd

        assert gcd(a, m) != 1
        return
    assert 0 <= b < m
    assert (a * b - 1) % m == 0


@given(st.integers(1, 10**6), st.integers(0, 8), st.sampled_from([2, 3, 5, 7]))
def test_valuation_of_prime_multiple(u, e, p):
    while u % p == 0:
        u //= p
    assert padic_valuation(u * p**e, p) == e
