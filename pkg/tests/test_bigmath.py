import pytest
from hypothesis import given, settings, strategies as st

from wagstaff_bls.bigmath import (digits10, exact_sqrt, from_decimal, is_perfect_square,
                                  is_prime_trial, jacobi, mod_pow, small_primes, to_decimal,
                                  valuation)
from wagstaff_bls.errors import InvalidModulus, UndefinedValuation
from wagstaff_bls.quad_ring import wagstaff

from oracles import jacobi_naive, sieve_primes


@pytest.mark.parametrize("base, exp, mod, want", [
    (3, 42, 43, 1),
    (2, 10, 1000, 24),
    (7, 0, 13, 1),
    (0, 0, 5, 1),
    (10 ** 30, 3, 7, pow(10 ** 30, 3, 7)),
])
def test_mod_pow_examples(base, exp, mod, want):
    assert mod_pow(base, exp, mod) == want


@pytest.mark.parametrize("mod", [1, 0, -5])
def test_mod_pow_rejects_small_modulus(mod):
    with pytest.raises(InvalidModulus):
        mod_pow(2, 3, mod)


def _square_and_multiply(b, e, m):
    r = 1
    for bit in bin(e)[2:]:
        r = r * r % m
        if bit == "1":
            r = r * b % m
    return r % m


@given(st.integers(0, 10 ** 40), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6),
       st.integers(2, 10 ** 40))
def test_mod_pow_multiplicative(a, e1, e2, m):
    assert mod_pow(a, e1 + e2, m) == mod_pow(a, e1, m) * mod_pow(a, e2, m) % m
    assert mod_pow(a, e1, m) == _square_and_multiply(a, e1, m)


@pytest.mark.parametrize("a, n, want", [(2, 11, -1), (2, 7, 1), (15, 9, 0), (0, 3, 0),
                                        (-1, 7, -1), (1001, 9907, -1)])
def test_jacobi_examples(a, n, want):
    assert jacobi(a, n) == want
    assert jacobi(a, n) == jacobi_naive(a, n)


@pytest.mark.parametrize("n", [2, 1, 0, 10, -3])
def test_jacobi_rejects_bad_modulus(n):
    with pytest.raises(InvalidModulus):
        jacobi(3, n)


def test_jacobi_matches_euler_criterion_for_primes_below_10k():
    for q in small_primes(10 ** 4)[1:]:
        for a in range(q):
            e = pow(a, (q - 1) // 2, q)
            want = 0 if e == 0 else (1 if e == 1 else -1)
            assert jacobi(a, q) == want, (a, q)


@given(st.integers(-10 ** 30, 10 ** 30), st.integers(1, 10 ** 6).map(lambda k: 2 * k + 1))
def test_jacobi_matches_factorization_oracle(a, n):
    assert jacobi(a, n) == jacobi_naive(a, n)


@pytest.mark.parametrize("z, root", [(-7, None), (25, 5), (2 ** 128, 2 ** 64), (0, 0), (1, 1),
                                     (2 ** 128 + 1, None), ((10 ** 50 + 3) ** 2, 10 ** 50 + 3)])
def test_exact_sqrt_examples(z, root):
    assert exact_sqrt(z) == root
    assert is_perfect_square(z) == (root is not None)


def test_perfect_square_exhaustive():
    squares = {t * t for t in range(1001)}
    for z in range(-10 ** 6, 10 ** 6 + 1):
        assert is_perfect_square(z) == (z in squares)


@pytest.mark.parametrize("n, q, e", [(10, 2, 1), (54, 3, 3), (7, 5, 0), (2 ** 100, 2, 100),
                                     (3 ** 77 * 5, 3, 77), (-12, 2, 2)])
def test_valuation_examples(n, q, e):
    assert valuation(n, q) == e


def test_valuation_errors():
    with pytest.raises(UndefinedValuation):
        valuation(0, 3)
    with pytest.raises(ValueError):
        valuation(10, 1)


@given(st.integers(1, 10 ** 60), st.integers(2, 1000))
def test_valuation_property(n, q):
    e = valuation(n, q)
    assert n % q ** e == 0 and n % q ** (e + 1) != 0


@pytest.mark.parametrize("p, digits", [(2617, 788), (10501, 3161), (12391, 3730), (5, 2)])
def test_digits10_of_wagstaff(p, digits):
    assert digits10(wagstaff(p)) == digits


@given(st.integers(1, 10 ** 200))
def test_digits10_matches_str(n):
    assert digits10(n) == len(str(n))


@given(st.integers(-10 ** 3000, 10 ** 3000))
@settings(max_examples=50)
def test_decimal_round_trip(n):
    s = to_decimal(n)
    assert s == str(n)
    assert from_decimal(s) == n


def test_decimal_round_trip_beyond_str_limit():
    n = 3 ** 20000 + 12345
    assert from_decimal(to_decimal(n)) == n
    assert len(to_decimal(n)) == digits10(n)


@pytest.mark.parametrize("bad", ["", "-", "+5", "05", "-0", " 5", "5 ", "1e5", "١٢"])
def test_from_decimal_is_strict(bad):
    with pytest.raises(ValueError):
        from_decimal(bad)


def test_small_primes_and_trial_match_sieve():
    flags = sieve_primes(20000)
    assert small_primes(20000) == [i for i in range(20000) if flags[i]]
    assert all(is_prime_trial(i) == bool(flags[i]) for i in range(20000))
