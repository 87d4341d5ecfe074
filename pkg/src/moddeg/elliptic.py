"""Elliptic curves over Q and their reductions mod p.

Point counts use the character sum on the short model
y^2 = x^3 - 27 c4 x - 54 c6, which is isomorphic to the long model over
every F_p with p > 3. For p in {2, 3} the long model is counted directly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from .numth import factor, is_prime, is_squarefree, primes_up_to, valuation
from .finite_fields import Fp2Elem, fp2_modulus
from ._kernels import character_sums


class SingularCurveError(ValueError):
    pass


class BadReductionError(ValueError):
    pass


class NeedsIngestError(ValueError):
    """Local data at 2 or 3 cannot be decided without an ingested conductor."""


class NotSemistableError(ValueError):
    pass


class ConductorMismatchError(ValueError):
    pass


class ReductionType(str, enum.Enum):
    GOOD = "good"
    SPLIT = "split_multiplicative"
    NONSPLIT = "nonsplit_multiplicative"
    ADDITIVE = "additive"

    @property
    def multiplicative(self) -> bool:
        return self in (ReductionType.SPLIT, ReductionType.NONSPLIT)


@dataclass(frozen=True)
class Ingested:
    conductor: Optional[int] = None
    rank: Optional[int] = None
    torsion_order: Optional[int] = None
    modular_degree: Optional[int] = None
    selmer2_rank: Optional[int] = None


@dataclass(frozen=True)
class CurveQ:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    label: str = ""
    ingested: Ingested = field(default_factory=Ingested, compare=False)

    def __post_init__(self):
        if self.discriminant == 0:
            raise SingularCurveError(f"singular curve {self.ainvs}")

    @classmethod
    def from_ainvs(cls, ainvs: Iterable[int], label: str = "", **ingested) -> "CurveQ":
        a1, a2, a3, a4, a6 = (int(a) for a in ainvs)
        return cls(a1, a2, a3, a4, a6, label, Ingested(**ingested))

    @classmethod
    def short(cls, A: int, B: int, label: str = "") -> "CurveQ":
        return cls(0, 0, 0, A, B, label)

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> int:
        a1, a2, a3, a4, a6 = self.ainvs
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    @property
    def c4(self) -> int:
        return self.b2 * self.b2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j_invariant(self) -> Fraction:
        return Fraction(self.c4**3, self.discriminant)

    def short_model(self) -> tuple[int, int]:
        """Integral (A, B) with y^2 = x^3 + A x + B isomorphic over Q."""
        if self.a1 == self.a2 == self.a3 == 0:
            return self.a4, self.a6
        return -27 * self.c4, -54 * self.c6

    def __str__(self) -> str:
        return self.label or f"[{','.join(map(str, self.ainvs))}]"


def invariants(E: CurveQ) -> tuple[int, int, int, Fraction]:
    """(c4, c6, discriminant, j) of the given model."""
    return E.c4, E.c6, E.discriminant, E.j_invariant


# -- minimal invariants --------------------------------------------------


@dataclass(frozen=True)
class MinimalInvariants:
    c4: int
    c6: int
    discriminant: int
    scale: int  # u with c4 = u^4 c4_min, c6 = u^6 c6_min (primes >= 5 only)
    unminimized_23: bool  # model might be non-minimal at 2 or 3


def _vp(n: int, p: int) -> float:
    return math.inf if n == 0 else valuation(n, p)


@lru_cache(maxsize=4096)
def minimal_invariants(E: CurveQ) -> MinimalInvariants:
    c4, c6, disc = E.c4, E.c6, E.discriminant
    u = 1
    for p, e in factor(abs(disc)):
        if p < 5 or e < 12:
            continue
        k = int(min(_vp(c4, p) // 4, _vp(c6, p) // 6, e // 12))
        u *= p**k
    c4m, c6m, dm = c4 // u**4, c6 // u**6, disc // u**12
    flag = any(
        _vp(c4, p) >= 4 and _vp(c6, p) >= 6 and _vp(disc, p) >= 12 for p in (2, 3)
    )
    return MinimalInvariants(c4m, c6m, dm, u, flag)


# -- point counting ------------------------------------------------------


def _count_long_model(E: CurveQ, p: int) -> int:
    """Projective points of the reduced long model over F_p (any p), with inf."""
    a1, a2, a3, a4, a6 = (a % p for a in E.ainvs)
    n = 1
    for x in range(p):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - rhs) % p == 0:
                n += 1
    return n


def count_points_short(A: int, B: int, p: int) -> int:
    """#{(x, y) in F_p^2 : y^2 = x^3 + A x + B} + 1 for an odd prime p."""
    s = character_sums(
        np.array([p], np.int64), np.array([A % p], np.int64), np.array([B % p], np.int64)
    )
    return int(p + 1 + s[0])


def _short_ab_mod(E: CurveQ, p: int) -> tuple[int, int]:
    m = minimal_invariants(E)
    return (-27 * m.c4) % p, (-54 * m.c6) % p


def _is_good(E: CurveQ, p: int) -> bool:
    if p < 5:
        return E.discriminant % p != 0
    return minimal_invariants(E).discriminant % p != 0


def ap(E: CurveQ, p: int) -> int:
    """Trace of Frobenius a_p = p + 1 - #E(F_p) at a prime of good reduction."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not _is_good(E, p):
        if p < 5 and reduction_type(E, p) == ReductionType.GOOD:
            raise NeedsIngestError(f"model not minimal at {p}")
        raise BadReductionError(f"{E} has bad reduction at {p}")
    if p < 5:
        n = _count_long_model(E, p)
    else:
        n = count_points_short(*_short_ab_mod(E, p), p)
    a = p + 1 - n
    assert a * a <= 4 * p, f"Hasse bound violated: a_{p} = {a}"
    return a


def local_ap(E: CurveQ, p: int) -> int:
    """a_p for every prime: trace at good p, +1 split, -1 non-split, 0 additive."""
    rt = reduction_type(E, p)
    if rt == ReductionType.GOOD:
        return ap(E, p)
    return {ReductionType.SPLIT: 1, ReductionType.NONSPLIT: -1}.get(rt, 0)


@lru_cache(maxsize=64)
def good_ap_table(E: CurveQ, bound: int) -> dict[int, int]:
    """a_p for the primes 5 <= p <= bound not dividing the model's discriminant."""
    m = minimal_invariants(E)
    bad = set(factor(abs(E.discriminant)).primes) | {2, 3}
    good = [p for p in primes_up_to(bound) if p not in bad]
    arr = np.array(good, dtype=np.int64)
    A = np.array([(-27 * m.c4) % p for p in good], dtype=np.int64)
    B = np.array([(-54 * m.c6) % p for p in good], dtype=np.int64)
    sums = character_sums(arr, A, B) if good else []
    return {p: -int(s) for p, s in zip(good, sums)}


@lru_cache(maxsize=64)
def ap_table(E: CurveQ, bound: int) -> dict[int, int]:
    """local_ap(E, p) for all primes p <= bound."""
    primes = primes_up_to(bound)
    table = dict(good_ap_table(E, bound))
    for p in primes:
        if p not in table:
            table[p] = local_ap(E, p)
    return table


def count_points_fp2(E: CurveQ, p: int) -> int:
    """#E(F_{p^2}) by direct enumeration of the short model (p > 3, small p)."""
    A, B = _short_ab_mod(E, p)
    c = fp2_modulus(p)
    q = p * p
    # quadratic character on F_p^2 via the norm map
    squares = [False] * p
    for y in range(p):
        squares[y * y % p] = True
    total = 1
    for a in range(p):
        for b in range(p):
            x = Fp2Elem(a, b, p, c)
            f = x * x * x + x * A + B
            if f.is_zero():
                total += 1
            elif squares[f.norm()]:
                total += 2
    assert total <= q + 1 + 2 * p
    return total


# -- reduction types -----------------------------------------------------


def reduction_type(E: CurveQ, p: int) -> ReductionType:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    disc = E.discriminant
    if p >= 5:
        m = minimal_invariants(E)
        if m.discriminant % p:
            return ReductionType.GOOD
        if m.c4 % p:
            return _split_or_not(E, p)
        return ReductionType.ADDITIVE
    if disc % p:
        return ReductionType.GOOD
    if E.c4 % p:
        return _split_or_not(E, p)
    N = E.ingested.conductor
    if N is None:
        raise NeedsIngestError(f"reduction at {p} of {E} needs an ingested conductor")
    e = valuation(N, p) if N % p == 0 else 0
    if e == 0:
        return ReductionType.GOOD
    if e >= 2:
        return ReductionType.ADDITIVE
    raise NeedsIngestError(f"model of {E} is not minimal at {p}")


def _split_or_not(E: CurveQ, p: int) -> ReductionType:
    """Decide split/non-split from the point count of the nodal reduction."""
    if p < 5:
        n = _count_long_model(E, p)
    else:
        n = count_points_short(*_short_ab_mod(E, p), p)
    a = p + 1 - n
    if a == 1:
        return ReductionType.SPLIT
    if a == -1:
        return ReductionType.NONSPLIT
    raise AssertionError(f"nodal reduction of {E} at {p} gave a_p = {a}")


def bad_primes(E: CurveQ) -> tuple[int, ...]:
    return tuple(
        q for q in factor(abs(minimal_invariants(E).discriminant)).primes
    )


def conductor_semistable(E: CurveQ) -> int:
    N = 1
    for q in factor(abs(E.discriminant)).primes:
        rt = reduction_type(E, q)
        if rt == ReductionType.ADDITIVE:
            raise NotSemistableError(f"{E} has additive reduction at {q}")
        if rt.multiplicative:
            N *= q
    ing = E.ingested.conductor
    if ing is not None and ing != N:
        raise ConductorMismatchError(f"{E}: computed N = {N}, ingested {ing}")
    return N


def root_number_semistable(E: CurveQ) -> int:
    """w(E) = -prod w_p with w_p = +1 non-split, -1 split."""
    N = conductor_semistable(E)
    w = -1
    for q in factor(N).primes:
        w *= -local_ap(E, q)
    return w


# -- torsion -------------------------------------------------------------


def integer_roots_cubic(a: int, b: int, c: int) -> list[int]:
    """Distinct integer roots of x^3 + a x^2 + b x + c, ascending."""

    def f(x: int) -> int:
        return ((x + a) * x + b) * x + c

    bound = 1 + max(abs(a), abs(b), abs(c))
    # split Z into monotone stretches at the critical points of f
    cuts = [-bound - 1]
    disc = 4 * a * a - 12 * b
    if disc >= 0:
        r = math.isqrt(disc)
        for num in (-2 * a - r, -2 * a + r):
            cuts.append(num // 6)
    cuts.append(bound + 1)
    cuts.sort()
    found = set()
    for cp in cuts:
        for x in range(cp - 3, cp + 4):
            if f(x) == 0:
                found.add(x)
    for lo, hi in zip(cuts, cuts[1:]):
        lo, hi = lo + 3, hi - 3
        if lo > hi:
            continue
        flo, fhi = f(lo), f(hi)
        if flo == 0:
            found.add(lo)
        if fhi == 0:
            found.add(hi)
        if (flo < 0) == (fhi < 0):
            continue
        while hi - lo > 1:
            mid = (lo + hi) // 2
            fm = f(mid)
            if fm == 0:
                found.add(mid)
                break
            if (fm < 0) == (flo < 0):
                lo, flo = mid, fm
            else:
                hi = mid
    return sorted(found)


def two_torsion_dim(E: CurveQ) -> int:
    A, B = E.short_model()
    n = len(integer_roots_cubic(0, A, B))
    return {0: 0, 1: 1, 3: 2}[n]


def _add(P, Q, A):
    """Group law on y^2 = x^3 + A x + B with exact rationals; None is O."""
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if y1 == -y2:
            return None
        lam = (3 * x1 * x1 + A) / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    return (x3, lam * (x1 - x3) - y1)


def _finite_order(P, A, limit: int = 12) -> Optional[int]:
    Q = P
    for n in range(1, limit + 1):
        if Q is None:
            return n
        if Q[0].denominator != 1 or Q[1].denominator != 1:
            return None
        Q = _add(Q, P, A)
    return None


def torsion_bound(E: CurveQ, count: int = 6) -> int:
    g = 0
    p = 5
    used = 0
    while used < count:
        if is_prime(p) and _is_good(E, p):
            g = math.gcd(g, p + 1 - ap(E, p))
            used += 1
        p += 2
    return g


def torsion_points(E: CurveQ) -> list[tuple[Fraction, Fraction]]:
    """Nonzero rational torsion points on the integral short model (Lutz-Nagell)."""
    A, B = E.short_model()
    D = abs(4 * A**3 + 27 * B * B)
    ys = [1]
    for q, e in factor(D):
        ys = [y * q**f for y in ys for f in range(e // 2 + 1)]
    pts = []
    for x in integer_roots_cubic(0, A, B):
        pts.append((Fraction(x), Fraction(0)))
    for y in ys:
        for x in integer_roots_cubic(0, A, B - y * y):
            pts.append((Fraction(x), Fraction(y)))
            pts.append((Fraction(x), Fraction(-y)))
    return [P for P in pts if _finite_order(P, Fraction(A)) is not None]


def torsion_order(E: CurveQ) -> int:
    bound = torsion_bound(E)
    order = 1 + len(torsion_points(E))
    assert bound % order == 0, f"torsion {order} does not divide bound {bound}"
    return order


# -- twists, heights, discriminants --------------------------------------


def quadratic_twist(E: CurveQ, D: int) -> CurveQ:
    if not is_squarefree(D):
        raise ValueError(f"twist parameter {D} is not squarefree")
    a, b = E.short_model()
    label = f"{E.label}^({D})" if E.label else ""
    return CurveQ(0, 0, 0, a * D * D, b * D**3, label)


def minimal_AB(A: int, B: int) -> tuple[int, int, bool]:
    """Reduce (A, B) until no prime has p^4 | A and p^6 | B."""
    if 4 * A**3 + 27 * B * B == 0:
        raise SingularCurveError(f"singular pair ({A}, {B})")
    g = math.gcd(A, B)
    changed = False
    for p in factor(g).primes if g > 1 else ():
        while A % p**4 == 0 and B % p**6 == 0:
            A //= p**4
            B //= p**6
            changed = True
    return A, B, changed


def is_minimal_AB(A: int, B: int) -> bool:
    return not minimal_AB(A, B)[2]


def height_AB(A: int, B: int) -> tuple[float, bool]:
    """Naive height max(|A|^3, |B|^2)^(1/6) of the minimal pair; flag if normalized."""
    A, B, changed = minimal_AB(A, B)
    return max(abs(A) ** 3, B * B) ** (1.0 / 6.0), changed


def unstable_discriminant(E: CurveQ) -> int:
    """Delta_min divided by the denominator of j (sign kept)."""
    dmin = minimal_invariants(E).discriminant
    den = E.j_invariant.denominator
    assert dmin % den == 0
    return dmin // den


# -- curves over finite fields -------------------------------------------


@dataclass(frozen=True)
class CurveFq:
    """Short Weierstrass curve y^2 = x^3 + a x + b over F_p or F_p^2."""

    a: Fp2Elem
    b: Fp2Elem

    @property
    def p(self) -> int:
        return self.a.p

    @classmethod
    def from_j(cls, j: Fp2Elem) -> "CurveFq":
        if j == 0:
            return cls(j.zero(), j.one())
        if j == 1728:
            return cls(j.one(), j.zero())
        k = j * (1728 - j)
        return cls(k * 3, k * (1728 - j) * 2)

    @classmethod
    def reduction(cls, E: CurveQ, p: int) -> "CurveFq":
        if not _is_good(E, p) or p < 5:
            raise BadReductionError(f"{E} is not good at {p} (or p < 5)")
        A, B = _short_ab_mod(E, p)
        c = fp2_modulus(p)
        return cls(Fp2Elem(A, 0, p, c), Fp2Elem(B, 0, p, c))

    @property
    def discriminant(self) -> Fp2Elem:
        return (self.a * self.a * self.a * 4 + self.b * self.b * 27) * (-16)

    def j_invariant(self) -> Fp2Elem:
        a3 = self.a * self.a * self.a * 4
        return a3 * 1728 / (a3 + self.b * self.b * 27)

    def hasse_invariant(self) -> Fp2Elem:
        """Coefficient of x^(p-1) in (x^3 + a x + b)^((p-1)/2)."""
        p = self.p
        m = (p - 1) // 2
        fact = [1] * (m + 1)
        for i in range(1, m + 1):
            fact[i] = fact[i - 1] * i % p
        total = self.a.zero()
        i = 0
        while 3 * i <= p - 1:
            k = p - 1 - 3 * i
            l = m - i - k
            if l >= 0:
                coef = fact[m] * pow(fact[i] * fact[k] * fact[l], -1, p)
                total = total + (self.a**k) * (self.b**l) * coef
            i += 1
        return total

    def is_supersingular(self) -> bool:
        return self.hasse_invariant().is_zero()


def with_ingested(E: CurveQ, **kw) -> CurveQ:
    return replace(E, ingested=replace(E.ingested, **kw))
