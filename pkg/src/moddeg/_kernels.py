"""Compiled inner loops for point counting and discriminant scans."""

import numpy as np
from numba import njit


@njit(cache=True)
def character_sums(primes, amod, bmod):
    """sum_x (x^3 + A x + B | p) for each (p, A mod p, B mod p).

    f(x) is stepped by finite differences so the loop needs no division.
    """
    out = np.empty(primes.shape[0], np.int64)
    for k in range(primes.shape[0]):
        p = primes[k]
        chi = np.full(p, -1, np.int8)
        chi[0] = 0
        y2 = 0
        step = 1
        for _ in range(1, (p + 1) // 2):
            y2 += step
            if y2 >= p:
                y2 -= p
            chi[y2] = 1
            step += 2
            if step >= p:
                step -= p
        v = bmod[k] % p  # f(0)
        d1 = (1 + amod[k]) % p  # f(1) - f(0)
        d2 = 6 % p  # second difference at 0
        s = 0
        for _ in range(p):
            s += chi[v]
            v += d1
            if v >= p:
                v -= p
            d1 += d2
            if d1 >= p:
                d1 -= p
            d2 += 6
            if d2 >= p:
                d2 -= p
        out[k] = s
    return out


@njit(cache=True)
def stripped_omega_counts(A_lo, A_hi, Bmax, small_primes, trial_primes, cutoffs_A, cutoffs_B):
    """Counters for the pairs |A| <= cutoffs_A[k], |B| <= cutoffs_B[k].

    Pairs with p^4 | A and p^6 | B for some p in small_primes are skipped.
    Returns per-cutoff (total, omega >= 2, singular) for A in [A_lo, A_hi].
    """
    m = cutoffs_A.shape[0]
    out = np.zeros((m, 3), np.int64)
    for A in range(A_lo, A_hi + 1):
        a3 = 4 * A * A * A
        for B in range(-Bmax, Bmax + 1):
            skip = False
            for p in small_primes:
                if A % (p ** 4) == 0 and B % (p ** 6) == 0:
                    skip = True
                    break
            if skip:
                continue
            d = a3 + 27 * B * B
            if d == 0:
                for k in range(m):
                    if abs(A) <= cutoffs_A[k] and abs(B) <= cutoffs_B[k]:
                        out[k, 2] += 1
                continue
            d = abs(d)
            while d % 2 == 0:
                d //= 2
            while d % 3 == 0:
                d //= 3
            many = False
            for q in trial_primes:
                if q * q > d:
                    break
                if d % q == 0:
                    while d % q == 0:
                        d //= q
                    many = d > 1
                    break
            for k in range(m):
                if abs(A) <= cutoffs_A[k] and abs(B) <= cutoffs_B[k]:
                    out[k, 0] += 1
                    if many:
                        out[k, 1] += 1
    return out
