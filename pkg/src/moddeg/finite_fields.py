"""Arithmetic in F_p^2 = F_p[t]/(t^2 - c) and polynomial root finding over it.

``c`` is the least positive quadratic non-residue mod ``p``, so the model (and
with it every ordering derived from (a, b) pairs) is canonical for each p.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

from .numth import is_prime, least_nonresidue, sqrt_mod


@lru_cache(maxsize=None)
def fp2_modulus(p: int) -> int:
    if p < 5 or not is_prime(p):
        raise ValueError(f"F_p^2 model needs a prime p > 3, got {p}")
    return least_nonresidue(p)


class Fp2Elem:
    """Element a + b*t of F_p^2 with t^2 = c (c = least non-residue)."""

    __slots__ = ("a", "b", "p", "c")

    def __init__(self, a: int, b: int, p: int, c: int | None = None):
        self.p = p
        self.c = fp2_modulus(p) if c is None else c
        self.a = a % p
        self.b = b % p

    def _coerce(self, other) -> "Fp2Elem":
        if isinstance(other, Fp2Elem):
            if other.p != self.p:
                raise ValueError("mixing elements of different fields")
            return other
        if isinstance(other, int):
            return Fp2Elem(other, 0, self.p, self.c)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp2Elem(self.a + o.a, self.b + o.b, self.p, self.c)

    __radd__ = __add__

    def __neg__(self):
        return Fp2Elem(-self.a, -self.b, self.p, self.c)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp2Elem(self.a - o.a, self.b - o.b, self.p, self.c)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, x, y = self.a, self.b, o.a, o.b
        return Fp2Elem(a * x + self.c * b * y, a * y + b * x, self.p, self.c)

    __rmul__ = __mul__

    def norm(self) -> int:
        return (self.a * self.a - self.c * self.b * self.b) % self.p

    def inverse(self) -> "Fp2Elem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in F_p^2")
        ninv = pow(n, -1, self.p)
        return Fp2Elem(self.a * ninv, -self.b * ninv, self.p, self.c)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = Fp2Elem(1, 0, self.p, self.c)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def frobenius(self) -> "Fp2Elem":
        """x -> x^p, which is conjugation a + bt -> a - bt."""
        return Fp2Elem(self.a, -self.b, self.p, self.c)

    def in_fp(self) -> bool:
        return self.b == 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def key(self) -> tuple[int, int]:
        return (self.a, self.b)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.b == 0 and self.a == other % self.p
        if isinstance(other, Fp2Elem):
            return self.p == other.p and self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.p))

    def __repr__(self) -> str:
        if self.b == 0:
            return f"{self.a}"
        return f"{self.a}+{self.b}t"

    def is_square(self) -> bool:
        # x is a square in F_p^2 iff its norm is a square in F_p
        n = self.norm()
        return n == 0 or pow(n, (self.p - 1) // 2, self.p) == 1

    def sqrt(self) -> "Fp2Elem":
        """The square root with the smaller (a, b) key."""
        p, c = self.p, self.c
        if self.b == 0:
            if pow(self.a, (p - 1) // 2, p) != p - 1:
                r = Fp2Elem(sqrt_mod(self.a, p), 0, p, c)
            else:
                # a/c is a residue, so sqrt(a) = sqrt(a/c) * t
                r = Fp2Elem(0, sqrt_mod(self.a * pow(c, -1, p), p), p, c)
            return min(r, -r, key=Fp2Elem.key)
        if not self.is_square():
            raise ValueError(f"{self} is not a square in F_{p}^2")
        # (u + v t)^2 = a + b t  =>  u^2 = (a +- sqrt(norm)) / 2, v = b / (2u)
        r = sqrt_mod(self.norm(), p)
        half = pow(2, -1, p)
        for h in ((self.a + r) * half % p, (self.a - r) * half % p):
            if h and pow(h, (p - 1) // 2, p) == 1:
                u = sqrt_mod(h, p)
                root = Fp2Elem(u, self.b * pow(2 * u, -1, p), p, c)
                return min(root, -root, key=Fp2Elem.key)
        raise ArithmeticError(f"square root of {self} not found")

    def one(self) -> "Fp2Elem":
        return Fp2Elem(1, 0, self.p, self.c)

    def zero(self) -> "Fp2Elem":
        return Fp2Elem(0, 0, self.p, self.c)


def fp2(a: int, p: int, b: int = 0) -> Fp2Elem:
    return Fp2Elem(a, b, p)


# Polynomials are lists of Fp2Elem, lowest degree first, without trailing zeros.

Poly = list


def _trim(f: Poly) -> Poly:
    while f and f[-1].is_zero():
        f.pop()
    return f


def poly_from_ints(coeffs: Iterable[int], p: int) -> Poly:
    c = fp2_modulus(p)
    return _trim([Fp2Elem(x, 0, p, c) for x in coeffs])


def poly_mul(f: Poly, g: Poly) -> Poly:
    if not f or not g:
        return []
    out = [f[0].zero() for _ in range(len(f) + len(g) - 1)]
    for i, x in enumerate(f):
        if x.is_zero():
            continue
        for j, y in enumerate(g):
            out[i + j] = out[i + j] + x * y
    return _trim(out)


def poly_divmod(f: Poly, g: Poly) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    if len(f) < len(g):
        return [], _trim(f)
    inv = g[-1].inverse()
    q = [g[0].zero() for _ in range(len(f) - len(g) + 1)]
    for k in range(len(f) - len(g), -1, -1):
        coef = f[k + len(g) - 1] * inv
        q[k] = coef
        if coef.is_zero():
            continue
        for i, y in enumerate(g):
            f[k + i] = f[k + i] - coef * y
    return _trim(q), _trim(f[: len(g) - 1])


def poly_mod(f: Poly, g: Poly) -> Poly:
    return poly_divmod(f, g)[1]


def poly_monic(f: Poly) -> Poly:
    inv = f[-1].inverse()
    return [x * inv for x in f]


def poly_gcd(f: Poly, g: Poly) -> Poly:
    while g:
        f, g = g, poly_mod(f, g)
    return poly_monic(f) if f else f


def poly_powmod(base: Poly, e: int, m: Poly) -> Poly:
    one = m[0].one()
    result: Poly = [one]
    base = poly_mod(base, m)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base), m)
        base = poly_mod(poly_mul(base, base), m)
        e >>= 1
    return result


def poly_eval(f: Sequence[Fp2Elem], x: Fp2Elem) -> Fp2Elem:
    acc = x.zero()
    for coef in reversed(f):
        acc = acc * x + coef
    return acc


def _split_distinct(g: Poly, q: int) -> list[Fp2Elem]:
    """Roots of a monic squarefree g that splits into distinct linear factors."""
    if len(g) == 1:
        return []
    if len(g) == 2:
        return [-g[0]]
    p = g[0].p
    c = g[0].c
    e = (q - 1) // 2
    # deterministic shifts outside F_p: an F_p shift never separates F_p roots,
    # since every element of F_p is a square in F_p^2
    for k in range(q - p):
        delta = Fp2Elem(k % p, 1 + k // p, p, c)
        h = list(poly_powmod([delta, delta.one()], e, g)) or [delta.zero()]
        h[0] = h[0] - 1
        d = poly_gcd(g, _trim(h))
        if 1 < len(d) < len(g):
            rest = poly_divmod(g, d)[0]
            return _split_distinct(d, q) + _split_distinct(poly_monic(rest), q)
    raise ArithmeticError("equal-degree splitting failed")


def poly_roots(f: Poly, p: int) -> tuple[dict[Fp2Elem, int], Poly]:
    """All roots in F_p^2 with multiplicities, plus the residual cofactor.

    The residual is the monic factor of f with no roots in F_p^2.
    """
    f = _trim(list(f))
    if not f:
        raise ValueError("the zero polynomial has no finite root multiset")
    f = poly_monic(f)
    if len(f) == 1:
        return {}, f
    q = p * p
    x = [f[0].zero(), f[0].one()]
    xq = poly_powmod(x, q, f)
    diff = list(xq) + [f[0].zero()] * max(0, 2 - len(xq))
    diff[1] = diff[1] - 1
    g = poly_gcd(f, _trim(diff))
    roots: dict[Fp2Elem, int] = {}
    residual = f
    for r in _split_distinct(g, q):
        lin = [-r, r.one()]
        mult = 0
        while True:
            quo, rem = poly_divmod(residual, lin)
            if rem:
                break
            residual = quo
            mult += 1
        roots[r] = mult
    return roots, residual


def multiplicity_of_root(f: Sequence[Fp2Elem], r: Fp2Elem) -> int:
    """Multiplicity of r as a root of f by repeated synthetic division."""
    coeffs = list(f)
    mult = 0
    while len(coeffs) > 1:
        # synthetic division by (X - r), highest degree first
        acc = coeffs[-1]
        quo = [acc]
        for coef in reversed(coeffs[:-1]):
            acc = acc * r + coef
            quo.append(acc)
        if not quo[-1].is_zero():
            break
        mult += 1
        coeffs = list(reversed(quo[:-1]))
    return mult
