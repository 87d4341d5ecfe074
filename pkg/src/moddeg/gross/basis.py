"""Supersingular j-invariants in characteristic p with their Eichler weights.

The basis is found by a breadth-first walk of the 2-isogeny graph: a seed
supersingular j (a class-number-one CM value at an inert prime, or a Hasse
invariant scan over F_p) is closed under the roots of Phi_2(j, Y). The graph
is connected, so the closure is the full set, and the Eichler mass formula is
checked before anything is returned.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Optional

from ..elliptic import CurveFq
from ..finite_fields import Fp2Elem, fp2_modulus, poly_roots
from ..numth import class_number, is_prime, legendre
from .modpoly import load_modular_polynomial

# j-invariants of the maximal orders of class number one, keyed by |disc|
CM_J = {
    3: 0,
    4: 1728,
    7: -3375,
    8: 8000,
    11: -32768,
    19: -884736,
    43: -884736000,
    67: -147197952000,
    163: -262537412640768000,
}


class EnumerationError(RuntimeError):
    """The 2-isogeny closure disagrees with the mass formula."""


@dataclass(frozen=True)
class BasisEntry:
    j: Fp2Elem
    w: int
    in_fp: bool


def eichler_weight(j: Fp2Elem) -> int:
    """Half the automorphism count: 3 at j = 0, 2 at j = 1728, else 1."""
    if j == 0:
        return 3
    if j == 1728:
        return 2
    return 1


def genus_x0(p: int) -> int:
    """Genus of X_0(p) for a prime p."""
    if p in (2, 3):
        return 0
    nu2 = 1 + legendre(-1, p)
    nu3 = 1 + legendre(-3, p)
    # 12 g = 12 + (p + 1) - 3 nu2 - 4 nu3 - 12 * 2 / 2 (two cusps)
    return (p + 1 - 3 * nu2 - 4 * nu3 - 12) // 12 + 1


def _sort_key(j: Fp2Elem, p: int) -> tuple:
    # F_p first; conjugates share (a, min(b, p - b)) and so sit side by side
    return (0 if j.in_fp() else 1, j.a, min(j.b, p - j.b), j.b)


@dataclass(frozen=True)
class SupersingularBasis:
    p: int
    entries: tuple[BasisEntry, ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def js(self) -> tuple[Fp2Elem, ...]:
        return tuple(e.j for e in self.entries)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(e.w for e in self.entries)

    @cached_property
    def _positions(self) -> dict[tuple[int, int], int]:
        return {e.j.key(): i for i, e in enumerate(self.entries)}

    def index(self, j: Fp2Elem) -> Optional[int]:
        return self._positions.get(j.key())

    def fp_indices(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.entries) if e.in_fp)

    def mass(self) -> Fraction:
        return sum((Fraction(1, e.w) for e in self.entries), Fraction(0))

    def digest(self) -> str:
        h = hashlib.sha256(f"p={self.p}".encode())
        for e in self.entries:
            h.update(f";{e.j.a},{e.j.b},{e.w}".encode())
        return h.hexdigest()

    def as_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "entries": [
                {"j": [e.j.a, e.j.b], "w": e.w, "in_fp": e.in_fp} for e in self.entries
            ],
        }


def _phi2_in_y(j: Fp2Elem) -> list[Fp2Elem]:
    phi = load_modular_polynomial(2)
    return phi.y_coefficients_at(j, j.zero())


def _other_roots(j: Fp2Elem, known: Fp2Elem) -> list[Fp2Elem]:
    """Roots of Phi_2(j, Y) besides one known root, by deflation to a quadratic."""
    c0, c1, c2, c3 = _phi2_in_y(j)
    # monic cubic Y^3 + c2 Y^2 + c1 Y + c0 divided by (Y - known)
    b = c2 + known
    c = c1 + known * b
    disc = b * b - c * 4
    s = disc.sqrt()
    half = Fp2Elem(pow(2, -1, j.p), 0, j.p, j.c)
    return [(s - b) * half, (-s - b) * half]


def _seed(p: int) -> Fp2Elem:
    c = fp2_modulus(p)
    for D in sorted(CM_J):
        if legendre(-D, p) == -1:
            return Fp2Elem(CM_J[D], 0, p, c)
    for a in range(p):
        j = Fp2Elem(a, 0, p, c)
        if CurveFq.from_j(j).is_supersingular():
            return j
    raise EnumerationError(f"no supersingular j in F_{p}")


@lru_cache(maxsize=256)
def enumerate_supersingular(p: int) -> SupersingularBasis:
    """The canonical supersingular basis for a prime 3 < p < 50000."""
    if not is_prime(p) or p <= 3:
        raise ValueError(f"need a prime p > 3, got {p}")
    if p >= 50000:
        raise ValueError(f"p = {p} is beyond the supported range")
    seed = _seed(p)
    roots, residual = poly_roots(_phi2_in_y(seed), p)
    if len(residual) > 1:
        raise EnumerationError(f"Phi_2({seed}, Y) does not split over F_{p}^2")
    seen = {seed.key(): seed}
    queue: deque[tuple[Fp2Elem, Fp2Elem]] = deque()
    for r in roots:
        if r.key() not in seen:
            seen[r.key()] = r
        queue.append((r, seed))
    while queue:
        j, parent = queue.popleft()
        for r in _other_roots(j, parent):
            if r.key() not in seen:
                seen[r.key()] = r
                queue.append((r, j))
    js = sorted(seen.values(), key=lambda j: _sort_key(j, p))
    entries = tuple(BasisEntry(j, eichler_weight(j), j.in_fp()) for j in js)
    basis = SupersingularBasis(p, entries)
    if basis.mass() != Fraction(p - 1, 12):
        raise EnumerationError(f"mass {basis.mass()} != {(p - 1)}/12 at p = {p}")
    return basis


def verify_hasse(basis: SupersingularBasis) -> bool:
    """Every entry has vanishing Hasse invariant (O(n p), meant for tests)."""
    return all(CurveFq.from_j(e.j).is_supersingular() for e in basis.entries)


@dataclass(frozen=True)
class SpCount:
    s_p: int
    predicted: int  # standard formula via h(-4p) and h(-p)
    literal: Optional[int]  # the three-case formula read verbatim; None if h(-p) is undefined
    h_p: Optional[int]
    h_4p: int


def sp_count(basis: SupersingularBasis) -> SpCount:
    """Number of supersingular j in F_p against the class-number predictions."""
    p = basis.p
    s = len(basis.fp_indices())
    h4 = class_number(-4 * p)
    if p % 4 == 1:
        return SpCount(s, h4 // 2, None, None, h4)
    hp = class_number(-p)
    literal = 2 * hp if p % 8 == 3 else hp
    return SpCount(s, literal, literal, hp, h4)


def frobenius_perm(basis: SupersingularBasis) -> tuple[int, ...]:
    """i -> index of j_i^p; an involution fixing exactly the F_p entries."""
    perm = []
    for e in basis.entries:
        k = basis.index(e.j.frobenius())
        if k is None:
            raise EnumerationError(f"conjugate of {e.j} missing from the basis")
        perm.append(k)
    return tuple(perm)


def cm_support_index(basis: SupersingularBasis, D: int) -> Optional[int]:
    """Index of the CM j of discriminant -D when p is inert in Q(sqrt(-D))."""
    if D not in CM_J:
        raise ValueError(f"D = {D} is not a class-number-one discriminant")
    p = basis.p
    if p == D or legendre(-D, p) != -1:
        return None
    k = basis.index(Fp2Elem(CM_J[D], 0, p))
    if k is None:
        raise EnumerationError(f"CM j for D = {D} is not supersingular mod {p}")
    return k
