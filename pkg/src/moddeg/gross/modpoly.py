"""Classical modular polynomials Phi_l(X, Y) for small primes l.

The shipped data files under ``data/`` were produced by
:func:`compute_modular_polynomial`, which works purely from the q-expansion of
j: the power sums of the l+1 roots j(l*tau), j((tau+k)/l) are polynomials in
j(tau), and Newton's identities in Z[j] give the elementary symmetric
functions, i.e. the coefficients of Phi_l in X.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

SUPPORTED_ELLS = (2, 3, 5, 7, 11, 13)


class ModularPolynomialError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModularPolynomial:
    ell: int
    coefficients: tuple[tuple[int, int, int], ...]  # (deg_X, deg_Y, coeff)

    def as_dict(self) -> dict[tuple[int, int], int]:
        return {(i, j): c for i, j, c in self.coefficients}

    def evaluate(self, x: int, y: int, modulus: int | None = None) -> int:
        total = 0
        for i, j, c in self.coefficients:
            if modulus is None:
                total += c * x**i * y**j
            else:
                total = (total + c * pow(x, i, modulus) * pow(y, j, modulus)) % modulus
        return total

    def y_coefficients_at(self, x_val, zero):
        """Coefficients (lowest degree first) of Phi(x_val, Y) as a polynomial in Y.

        ``x_val`` may be any ring element supporting + and *, ``zero`` the
        additive identity of that ring.
        """
        powers = [zero + 1]
        for _ in range(self.ell + 1):
            powers.append(powers[-1] * x_val)
        out = [zero for _ in range(self.ell + 2)]
        for i, j, c in self.coefficients:
            out[j] = out[j] + powers[i] * c
        return out

    def checksum(self) -> str:
        return _checksum(self.coefficients)


def _checksum(triples) -> str:
    h = hashlib.sha256()
    for i, j, c in sorted(triples):
        h.update(f"{i} {j} {c}\n".encode())
    return h.hexdigest()


# -- q-expansion machinery ------------------------------------------------


def _j_coefficients(count: int) -> list[int]:
    """Coefficients c_{-1}, c_0, ..., c_{count-2} of j(q) = sum c_n q^n."""
    n_terms = count + 1
    sigma3 = [0] * n_terms
    for d in range(1, n_terms):
        for m in range(d, n_terms, d):
            sigma3[m] += d**3
    e4 = [1] + [240 * sigma3[n] for n in range(1, n_terms)]
    # Delta / q = prod (1 - q^n)^24
    eta24 = [0] * n_terms
    eta24[0] = 1
    for n in range(1, n_terms):
        for _ in range(24):
            for k in range(n_terms - 1, n - 1, -1):
                eta24[k] -= eta24[k - n]
    e4cubed = _series_mul(_series_mul(e4, e4, n_terms), e4, n_terms)
    # j * q = E4^3 / (Delta/q); eta24[0] = 1 so the division is exact over Z
    quot = [0] * n_terms
    for k in range(n_terms):
        acc = e4cubed[k] - sum(quot[i] * eta24[k - i] for i in range(k))
        quot[k] = acc
    return quot[:count]


def _series_mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for k, y in enumerate(b[: n - i]):
                out[i + k] += x * y
    return out


def _truncated_j_powers(kmax: int) -> list[list[int]]:
    """pows[k][e + k] = coefficient of q^e in j^k, for -k <= e <= 0."""
    c = _j_coefficients(kmax + 2)  # c[i] is the coefficient of q^(i-1)
    # j^k is carried up to exponent kmax - k so that later products stay exact
    full = [[1] + [0] * kmax]
    for k in range(1, kmax + 1):
        prev = full[-1]  # exponents -(k-1) .. kmax-k+1
        top = kmax - k
        cur = [0] * (top + k + 1)
        for e in range(-k, top + 1):
            acc = 0
            for n in range(-1, e + k):  # j exponent n, prev exponent e - n
                ep = e - n
                if ep < -(k - 1):
                    break
                acc += c[n + 1] * prev[ep + k - 1]
            cur[e + k] = acc
        full.append(cur)
    return [row[: k + 1] for k, row in enumerate(full)]


def _series_to_j_poly(series: dict[int, int], pows: list[list[int]]) -> list[int]:
    """Express a q-series with principal part of order d as a polynomial in j."""
    work = dict(series)
    d = -min(work) if work else 0
    d = max(d, 0)
    poly = [0] * (d + 1)
    for k in range(d, -1, -1):
        coef = work.get(-k, 0)
        if coef:
            poly[k] = coef
            row = pows[k]
            for e in range(-k, 1):
                work[e] = work.get(e, 0) - coef * row[e + k]
    return poly


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for k, y in enumerate(b):
                out[i + k] += x * y
    return out


def compute_modular_polynomial(ell: int) -> ModularPolynomial:
    """Compute Phi_ell exactly from q-expansions (ell prime)."""
    top = ell * (ell + 1)
    pows = _truncated_j_powers(top)
    power_sums: list[list[int]] = [[]]
    for m in range(1, ell + 2):
        jm = pows[m]  # exponents -m..0
        series: dict[int, int] = {}
        # j(q^ell)^m contributes at exponents ell*t, t in [-m, 0]
        for t in range(-m, 1):
            if jm[t + m]:
                series[ell * t] = series.get(ell * t, 0) + jm[t + m]
        # sum over k of j(zeta^k q^(1/ell))^m keeps exponents divisible by ell
        for t in range(-(m // ell), 1):
            e = ell * t
            if e >= -m and jm[e + m]:
                series[t] = series.get(t, 0) + ell * jm[e + m]
        power_sums.append(_series_to_j_poly(series, pows))
    elem: list[list[int]] = [[1]]
    for m in range(1, ell + 2):
        acc: list[int] = [0]
        for i in range(1, m + 1):
            term = _poly_mul(elem[m - i], power_sums[i])
            sign = 1 if i % 2 == 1 else -1
            if len(term) > len(acc):
                acc += [0] * (len(term) - len(acc))
            for k, v in enumerate(term):
                acc[k] += sign * v
        for k, v in enumerate(acc):
            if v % m:
                raise ModularPolynomialError(f"non-integral Newton step at m={m}")
            acc[k] = v // m
        while len(acc) > 1 and acc[-1] == 0:
            acc.pop()
        elem.append(acc)
    triples = []
    for m in range(ell + 2):
        sign = 1 if m % 2 == 0 else -1
        for deg_y, v in enumerate(elem[m]):
            if v:
                triples.append((ell + 1 - m, deg_y, sign * v))
    return ModularPolynomial(ell, tuple(sorted(triples)))


# -- data files -----------------------------------------------------------


def format_data_file(phi: ModularPolynomial) -> str:
    lines = [
        f"# classical modular polynomial Phi_{phi.ell}(X, Y) = sum c X^i Y^j",
        f"# ell {phi.ell}",
        f"# sha256 {phi.checksum()}",
        "# columns: i j c",
    ]
    lines += [f"{i} {j} {c}" for i, j, c in sorted(phi.coefficients)]
    return "\n".join(lines) + "\n"


def parse_data_file(text: str) -> ModularPolynomial:
    ell = None
    digest = None
    triples = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "ell":
                ell = int(parts[1])
            elif len(parts) == 2 and parts[0] == "sha256":
                digest = parts[1]
            continue
        i, j, c = line.split()
        triples.append((int(i), int(j), int(c)))
    if ell is None or digest is None:
        raise ModularPolynomialError("data file missing ell/sha256 header")
    phi = ModularPolynomial(ell, tuple(sorted(triples)))
    if phi.checksum() != digest:
        raise ModularPolynomialError(f"checksum mismatch for Phi_{ell}")
    return phi


def validate(phi: ModularPolynomial) -> None:
    """Structural checks: symmetry, bidegree, monic leading term, Velu pairs."""
    coeffs = phi.as_dict()
    for (i, j), c in coeffs.items():
        if coeffs.get((j, i)) != c:
            raise ModularPolynomialError(f"Phi_{phi.ell} not symmetric at ({i},{j})")
    deg = max(i for i, _ in coeffs)
    if deg != phi.ell + 1 or coeffs.get((phi.ell + 1, 0)) != 1:
        raise ModularPolynomialError(f"Phi_{phi.ell} has wrong degree/leading term")
    if phi.ell == 2:
        for p, a, b, x0 in _velu_pairs():
            j1, j2 = _two_isogenous_j(p, a, b, x0)
            if phi.evaluate(j1, j2, p) != 0:
                raise ModularPolynomialError("Phi_2 fails on a Velu 2-isogenous pair")


def _velu_pairs():
    """Short curves y^2 = x^3 + a x + b over F_p with a rational 2-torsion x0."""
    out = []
    for p in (101, 1009):
        for x0 in (3, 7, 11):
            for a in (1, 5, 17):
                b = (-(x0**3) - a * x0) % p
                if (4 * a**3 + 27 * b * b) % p:
                    out.append((p, a, b, x0))
    return out


def _two_isogenous_j(p: int, a: int, b: int, x0: int) -> tuple[int, int]:
    """j-invariants of E and its Velu 2-isogenous image E/<(x0, 0)> mod p."""

    def j_of(a_: int, b_: int) -> int:
        num = 1728 * 4 * pow(a_, 3, p)
        den = (4 * pow(a_, 3, p) + 27 * b_ * b_) % p
        return num * pow(den, -1, p) % p

    t = (3 * x0 * x0 + a) % p
    w = x0 * t % p
    return j_of(a, b), j_of((a - 5 * t) % p, (b - 7 * w) % p)


def data_path(ell: int) -> Path:
    return Path(str(resources.files("moddeg.gross") / "data" / f"phi_{ell}.txt"))


@lru_cache(maxsize=None)
def load_modular_polynomial(ell: int) -> ModularPolynomial:
    if ell not in SUPPORTED_ELLS:
        raise ModularPolynomialError(f"no modular polynomial data for l={ell}")
    phi = parse_data_file(data_path(ell).read_text())
    validate(phi)
    return phi


@lru_cache(maxsize=None)
def reduced_coefficients(ell: int, p: int) -> tuple[tuple[int, int, int], ...]:
    """Phi_ell coefficients reduced mod p (zero entries dropped)."""
    phi = load_modular_polynomial(ell)
    return tuple((i, j, c % p) for i, j, c in phi.coefficients if c % p)
