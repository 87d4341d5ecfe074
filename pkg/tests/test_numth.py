import math

import pytest
import sympy
from hypothesis import given, strategies as st

from moddeg.numth import (
    class_number,
    factor,
    integer_root,
    is_prime,
    is_square,
    is_squarefree,
    kronecker,
    least_nonresidue,
    legendre,
    omega,
    primes_up_to,
    reduced_forms,
    sqrt_mod,
    squarefree_part,
    valuation,
)

ODD_PRIMES = [p for p in primes_up_to(400) if p > 2]


def test_factor_examples():
    assert dict(factor(12)) == {2: 2, 3: 1}
    assert dict(factor(1)) == {}
    assert dict(factor(4 * (-1) ** 3 + 27 * 1**2)) == {23: 1}


@given(st.integers(1, 10**18))
def test_factor_matches_sympy(n):
    f = dict(factor(n))
    assert f == sympy.factorint(n)
    assert math.prod(p**e for p, e in f.items()) == n


def test_factor_large_semiprime():
    p, q = 1000000007, 998244353
    assert dict(factor(p * q)) == {q: 1, p: 1}


@given(st.integers(-(10**12), 10**12))
def test_is_prime_matches_sympy(n):
    assert is_prime(n) == (n > 1 and sympy.isprime(n))


def test_primes_up_to():
    assert list(primes_up_to(30)) == list(sympy.primerange(2, 31))
    assert primes_up_to(1) == ()


def test_legendre_examples():
    assert legendre(1, 5) == 1
    assert legendre(2, 5) == -1
    assert legendre(5, 5) == 0
    with pytest.raises(ValueError):
        legendre(1, 9)
    with pytest.raises(ValueError):
        legendre(1, 2)


@given(st.integers(), st.integers(), st.sampled_from(ODD_PRIMES))
def test_legendre_multiplicative(a, b, p):
    assert legendre(a * b, p) == legendre(a, p) * legendre(b, p)


@given(st.integers(-(10**6), 10**6), st.integers(1, 10**4))
def test_kronecker_odd_matches_jacobi(a, n):
    if n % 2:
        assert kronecker(a, n) == sympy.jacobi_symbol(a, n)


def test_kronecker_at_two():
    # (a/2) = 0 for even a, +1 for a = +-1 mod 8, -1 for a = +-3 mod 8
    assert [kronecker(a, 2) for a in (1, 3, 5, 7, 4)] == [1, -1, -1, 1, 0]


@given(st.sampled_from(ODD_PRIMES), st.integers(0, 10**6))
def test_sqrt_mod(p, a):
    if legendre(a, p) >= 0:
        r = sqrt_mod(a, p)
        assert r * r % p == a % p


@pytest.mark.parametrize("p", ODD_PRIMES)
def test_least_nonresidue(p):
    c = least_nonresidue(p)
    assert legendre(c, p) == -1
    assert all(legendre(k, p) == 1 for k in range(1, c))


def test_class_number_examples():
    assert class_number(-3) == 1
    assert class_number(-4) == 1
    assert class_number(-23) == 3
    # frozen from the classical tables
    assert class_number(-47) == 5
    assert class_number(-71) == 7
    assert class_number(-404) == 14
    assert class_number(-163) == 1


def _brute_classes(D):
    """Count SL2(Z)-classes of primitive positive definite forms by orbit search."""
    forms = set()
    bound = int(math.isqrt(-D // 3)) + 1
    for a in range(1, 4 * bound * bound + 2):
        for b in range(-a, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if math.gcd(math.gcd(a, b), c) == 1:
                forms.add((a, b, c))
        if a > -D:
            break
    # reduce every form by the textbook algorithm, independently written
    def red(f):
        a, b, c = f
        while True:
            if c < a:
                a, b, c = c, -b, a
            k = (a - b) // (2 * a)
            b2 = b + 2 * a * k
            c = (b2 * b2 - D) // (4 * a)
            b = b2
            if c > a or (c == a and b >= 0):
                if b == -a:
                    b = a
                return a, b, c

    return len({red(f) for f in forms})


@pytest.mark.parametrize("p", [p for p in ODD_PRIMES if p % 4 == 3])
def test_class_number_against_brute_force(p):
    assert class_number(-p) == _brute_classes(-p)


def test_reduced_forms_are_reduced():
    for a, b, c in reduced_forms(-4 * 101):
        assert abs(b) <= a <= c
        assert b * b - 4 * a * c == -404


def test_valuation_squarefree_omega():
    assert valuation(48, 2) == 4
    with pytest.raises(ValueError):
        valuation(0, 2)
    assert squarefree_part(-12) == -3
    assert squarefree_part(72) == 2
    assert is_squarefree(30) and not is_squarefree(12) and not is_squarefree(0)
    assert omega(1) == 0 and omega(3315) == 4
    assert is_square(0) and is_square(49) and not is_square(-4) and not is_square(50)


@given(st.integers(0, 10**60), st.integers(1, 13))
def test_integer_root(n, k):
    r = integer_root(n, k)
    assert r**k <= n < (r + 1) ** k
