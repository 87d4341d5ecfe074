"""Periods, Faltings height and the symmetric-square modular degree estimate.

Periods are those of the invariant differential dx / (2y + a1 x + a3),
computed by the arithmetic-geometric mean on the roots of
4x^3 + b2 x^2 + 2 b4 x + b6.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from .elliptic import (
    CurveQ,
    ReductionType,
    ap_table,
    conductor_semistable,
    local_ap,
    minimal_invariants,
    reduction_type,
)
from .numth import is_squarefree, primes_up_to

DEFAULT_PRIME_BOUND = 10**5
# N L(Sym^2, 2) / (pi vol) comes out at 2 m_E on 11a1, 37a1, 43a1 and 389a1
# with vol the covolume of the Neron lattice, so the pi Vol(E) of the
# identity corresponds to 2 pi vol here.
ESTIMATOR_CONSTANT = 2 * math.pi
_DPS = 40


class PrecisionError(ArithmeticError):
    pass


class OutOfScopeError(ValueError):
    """The estimator needs squarefree conductor (no fudge factors at p^2 | N)."""


@dataclass(frozen=True)
class PeriodLattice:
    omega1: float  # least positive real period
    omega2: complex
    tau: complex
    vol: float
    components: int

    @property
    def real_period(self) -> float:
        """Integral of |omega| over E(R): components times the least real period."""
        return self.components * self.omega1


def _agm(a, b):
    val = mpmath.agm(a, b)
    if not mpmath.isfinite(val) or val == 0:
        raise PrecisionError(f"AGM({a}, {b}) did not converge")
    return val


def period_lattice(E: CurveQ, minimal: bool = True) -> PeriodLattice:
    """Period lattice of the given model, rescaled to the model minimal at p >= 5."""
    with mpmath.workdps(_DPS):
        b2, b4, b6 = (mpmath.mpf(x) for x in (E.b2, E.b4, E.b6))
        roots = mpmath.polyroots([4, b2, 2 * b4, b6], maxsteps=200, extraprec=200)
        if E.discriminant > 0:
            e3, e2, e1 = sorted(mpmath.re(r) for r in roots)
            w1 = mpmath.pi / _agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e1 - e2))
            w2 = mpmath.mpc(0, 1) * mpmath.pi / _agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e2 - e3))
            comps = 2
        else:
            e1 = max((r for r in roots), key=lambda r: -abs(mpmath.im(r)))
            e1 = mpmath.re(e1)
            a = 3 * e1 + b2 / 4
            b = mpmath.sqrt(3 * e1 * e1 + b2 * e1 / 2 + b4 / 2)
            w1 = 2 * mpmath.pi / _agm(2 * mpmath.sqrt(b), mpmath.sqrt(2 * b + a))
            w2 = -w1 / 2 + mpmath.mpc(0, 1) * mpmath.pi / _agm(
                2 * mpmath.sqrt(b), mpmath.sqrt(2 * b - a)
            )
            comps = 1
        if minimal:
            # the minimal model's Neron differential is u * omega
            u = minimal_invariants(E).scale
            w1, w2 = w1 * u, w2 * u
        tau = w2 / w1
        vol = w1 * mpmath.im(w2)
        if vol <= 0:
            raise PrecisionError("non-positive covolume")
        return PeriodLattice(float(w1), complex(w2), complex(tau), float(vol), comps)


def _log_abs_delta_tau(tau: complex) -> float:
    """log |q prod (1 - q^n)^24| with q = exp(2 pi i tau), summed until |q^n| < 1e-17."""
    with mpmath.workdps(_DPS):
        q = mpmath.exp(2j * mpmath.pi * mpmath.mpc(tau))
        total = mpmath.log(abs(q))
        qn = q
        while abs(qn) > mpmath.mpf(10) ** -17:
            total += 24 * mpmath.log(abs(1 - qn))
            qn *= q
        return float(total)


def _reduce_tau(tau: complex) -> complex:
    """Move tau to the standard fundamental domain (speeds up the q-product)."""
    for _ in range(1000):
        tau = complex(tau.real - round(tau.real), tau.imag)
        if abs(tau) >= 1 - 1e-15:
            return tau
        tau = -1 / tau
    raise PrecisionError("tau reduction did not terminate")


def faltings_height(E: CurveQ, minimal: bool = True) -> float:
    """(1/12)(log|Delta| - log|Delta(tau) Im(tau)^6|) - log(2 pi).

    Delta(tau) = q prod (1 - q^n)^24 is the normalized cusp form, so with
    minimal=True (Delta = Delta_min) this equals -1/2 log Vol of the Neron
    lattice. With minimal=False the model's own discriminant is used, so
    rescaling (A, B) -> (u^4 A, u^6 B) shifts the value by log u.
    """
    lat = period_lattice(E, minimal=True)
    tau = _reduce_tau(lat.tau)
    disc = minimal_invariants(E).discriminant if minimal else E.discriminant
    log_delta_tau = _log_abs_delta_tau(tau) + 6 * math.log(tau.imag)
    return (math.log(abs(disc)) - log_delta_tau) / 12 - math.log(2 * math.pi)


# -- symmetric square ----------------------------------------------------


class LocalKind(str, enum.Enum):
    GOOD = "good"
    MULTIPLICATIVE = "multiplicative"
    ADDITIVE = "additive"


@dataclass(frozen=True)
class Sym2LocalFactor:
    """Inverse local factor 1 + c1 X + c2 X^2 + c3 X^3 in X = p^(-s)."""

    p: int
    kind: LocalKind
    coefficients: tuple[int, ...]  # (1, c1, c2, c3), trailing zeros dropped

    def inverse_at(self, s: float) -> float:
        x = self.p ** (-s)
        return sum(c * x**k for k, c in enumerate(self.coefficients))

    def dirichlet_coefficients(self, kmax: int) -> list[int]:
        """Coefficients of p^(-ks), k = 0..kmax, in the local factor itself."""
        inv = list(self.coefficients)
        out = [1] + [0] * kmax
        for k in range(1, kmax + 1):
            out[k] = -sum(inv[i] * out[k - i] for i in range(1, min(k, len(inv) - 1) + 1))
        return out


def _good_inverse_coeffs(a: int, p: int) -> tuple[int, ...]:
    # (1 - pX)(1 - (a^2 - 2p) X + p^2 X^2), expanded
    t = a * a - 2 * p
    return (1, -(t + p), p * t + p * p, -(p**3))


def sym2_local_factor(E: CurveQ, p: int, N: Optional[int] = None) -> Sym2LocalFactor:
    """Local factor at p; the kind comes from N when given, else from E."""
    if N is not None:
        e = 0
        while N % p ** (e + 1) == 0:
            e += 1
        kind = (LocalKind.GOOD, LocalKind.MULTIPLICATIVE)[e] if e < 2 else LocalKind.ADDITIVE
    else:
        rt = reduction_type(E, p)
        if rt == ReductionType.GOOD:
            kind = LocalKind.GOOD
        elif rt.multiplicative:
            kind = LocalKind.MULTIPLICATIVE
        else:
            kind = LocalKind.ADDITIVE
    if kind == LocalKind.GOOD:
        return Sym2LocalFactor(p, kind, _good_inverse_coeffs(local_ap(E, p), p))
    if kind == LocalKind.MULTIPLICATIVE:
        return Sym2LocalFactor(p, kind, (1, -1))
    return Sym2LocalFactor(p, kind, (1,))


@dataclass(frozen=True)
class Sym2Value:
    s: float
    prime_bound: int
    value: float
    partials: tuple[tuple[int, float], ...]  # (P/4, .), (P/2, .), (P, .)

    def as_json(self) -> dict:
        return {
            "s": self.s,
            "prime_bound": self.prime_bound,
            "value": self.value,
            "partials": [list(x) for x in self.partials],
        }


def _squarefree_conductor(E: CurveQ) -> int:
    N = E.ingested.conductor or conductor_semistable(E)
    if not is_squarefree(N):
        raise OutOfScopeError(f"{E}: conductor {N} is not squarefree")
    return N


def _log_terms(E: CurveQ, s: float, P: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Primes <= P and log of each local factor at s."""
    primes = np.array(primes_up_to(P), dtype=np.int64)
    if primes.size == 0:
        return primes, np.zeros(0)
    table = ap_table(E, P)
    a = np.array([table[int(p)] for p in primes], dtype=np.float64)
    pf = primes.astype(np.float64)
    x = pf ** (-s)
    good = (N % primes) != 0
    # inverse factor (1 - pX)(1 - (a^2 - 2p) X + p^2 X^2)
    t = a * a - 2 * pf
    inv_good = np.log1p(-pf * x) + np.log1p(-t * x + (pf * x) ** 2)
    inv_mult = np.log1p(-x)
    return primes, -np.where(good, inv_good, inv_mult)


def sym2_L_truncated(E: CurveQ, s: float, prime_bound: int = DEFAULT_PRIME_BOUND) -> Sym2Value:
    """prod_{p <= P} L_p(Sym^2 E, s), with partial products at P/4 and P/2."""
    N = _squarefree_conductor(E)
    primes, logs = _log_terms(E, s, prime_bound, N)
    partials = []
    for cut in (prime_bound // 4, prime_bound // 2, prime_bound):
        partials.append((cut, math.exp(math.fsum(logs[primes <= cut].tolist()))))
    return Sym2Value(s, prime_bound, partials[-1][1], tuple(partials))


@dataclass(frozen=True)
class ModdegEstimate:
    label: str
    conductor: int
    estimate: float
    rounded: int
    vol: float
    sym2: Sym2Value

    def diagnostic(self) -> list[tuple[int, float]]:
        """Estimator value at each truncation point."""
        scale = self.estimate / self.sym2.value
        return [(cut, v * scale) for cut, v in self.sym2.partials]

    def as_json(self) -> dict:
        return {
            "label": self.label,
            "conductor": self.conductor,
            "estimate": self.estimate,
            "rounded": self.rounded,
            "vol": self.vol,
            "sym2": self.sym2.as_json(),
            "diagnostic": [list(x) for x in self.diagnostic()],
        }


def moddeg_estimate(E: CurveQ, prime_bound: int = DEFAULT_PRIME_BOUND) -> ModdegEstimate:
    """N L(Sym^2 E, 2) / (2 pi vol) with Manin constant 1 (semistable E)."""
    N = _squarefree_conductor(E)
    L = sym2_L_truncated(E, 2.0, prime_bound)
    vol = period_lattice(E).vol
    est = N * L.value / (ESTIMATOR_CONSTANT * vol)
    return ModdegEstimate(E.label, N, est, max(1, round(est)), vol, L)
