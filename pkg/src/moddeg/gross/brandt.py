"""Brandt matrices from root multiplicities of Phi_l(j_i, X) over F_p^2.

M[i][k] is the multiplicity of j_k as a root of Phi_l(j_i, X), i.e. the
number of cyclic l-subgroups of E_i with quotient isomorphic to E_k. Rows sum
to l + 1 by construction; w_k M[i][k] = w_i M[k][i] is checked by tests.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from filelock import FileLock

from ..finite_fields import multiplicity_of_root
from .basis import SupersingularBasis, enumerate_supersingular
from .modpoly import SUPPORTED_ELLS, load_modular_polynomial

CACHE_ENV = "MODDEG_CACHE_DIR"


class BrandtError(RuntimeError):
    """Roots of Phi_l(j_i, X) fall outside the supersingular basis."""


@dataclass(frozen=True)
class BrandtMatrix:
    p: int
    ell: int
    M: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.M)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.M]

    def row_sums(self) -> list[int]:
        return [sum(r) for r in self.M]

    def is_self_adjoint(self, weights) -> bool:
        n = self.n
        return all(
            weights[k] * self.M[i][k] == weights[i] * self.M[k][i]
            for i in range(n)
            for k in range(n)
        )

    def as_json(self) -> dict:
        return {"p": self.p, "ell": self.ell, "n": self.n, "matrix": self.rows()}


def default_cache_dir() -> Optional[Path]:
    """Cache directory from $MODDEG_CACHE_DIR (empty string disables caching)."""
    env = os.environ.get(CACHE_ENV)
    if env is not None:
        return Path(env) if env else None
    return Path.home() / ".cache" / "moddeg"


def _cache_file(cache_dir: Path, p: int, ell: int) -> Path:
    return cache_dir / f"brandt_p{p}_l{ell}.txt"


def _format(B: BrandtMatrix, digest: str) -> str:
    head = [f"# p {B.p}", f"# ell {B.ell}", f"# n {B.n}", f"# basis {digest}"]
    return "\n".join(head + [" ".join(map(str, r)) for r in B.M]) + "\n"


def _parse(text: str, p: int, ell: int, basis: SupersingularBasis) -> Optional[BrandtMatrix]:
    header: dict[str, str] = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(" ")
            header[key] = val
        elif line.strip():
            rows.append(tuple(int(x) for x in line.split()))
    expected = {"p": str(p), "ell": str(ell), "n": str(basis.n), "basis": basis.digest()}
    if header != expected or len(rows) != basis.n:
        return None
    return BrandtMatrix(p, ell, tuple(rows))


def _fp2_horner(coeffs, xa, xb, p: int, c: int):
    """Evaluate a polynomial over F_p^2 at many points at once."""
    ra = np.zeros_like(xa)
    rb = np.zeros_like(xa)
    for coef in reversed(coeffs):
        ra, rb = (ra * xa + c * (rb * xb % p) + coef.a) % p, (ra * xb + rb * xa + coef.b) % p
    return ra, rb


def compute_brandt(basis: SupersingularBasis, ell: int) -> BrandtMatrix:
    p = basis.p
    if ell == p:
        raise ValueError("l = p: use the Frobenius permutation instead")
    phi = load_modular_polynomial(ell)
    js = basis.js
    xa = np.array([j.a for j in js], dtype=np.int64)
    xb = np.array([j.b for j in js], dtype=np.int64)
    c = js[0].c
    M = []
    for i, ji in enumerate(js):
        f = phi.y_coefficients_at(ji, ji.zero())
        va, vb = _fp2_horner(f, xa, xb, p, c)
        row = [0] * basis.n
        for k in np.flatnonzero((va == 0) & (vb == 0)):
            row[k] = multiplicity_of_root(f, js[k])
        if sum(row) != ell + 1:
            raise BrandtError(
                f"Phi_{ell}({ji}, X) has {sum(row)} of {ell + 1} roots in the basis mod {p}"
            )
        M.append(tuple(row))
    return BrandtMatrix(p, ell, tuple(M))


def brandt_matrix(
    p: int,
    ell: int,
    basis: Optional[SupersingularBasis] = None,
    cache_dir: Optional[Path] = None,
    use_cache: bool = True,
) -> BrandtMatrix:
    """B(l) in the canonical basis, read from or written to the disk cache."""
    if ell not in SUPPORTED_ELLS:
        raise ValueError(f"l must be one of {SUPPORTED_ELLS}")
    if ell == p:
        raise ValueError("l = p: use the Frobenius permutation instead")
    basis = basis or enumerate_supersingular(p)
    if use_cache and cache_dir is None:
        cache_dir = default_cache_dir()
    if not use_cache or cache_dir is None:
        return compute_brandt(basis, ell)
    path = _cache_file(cache_dir, p, ell)
    if path.exists():
        cached = _parse(path.read_text(), p, ell, basis)
        if cached is not None:
            return cached
    B = compute_brandt(basis, ell)
    cache_dir.mkdir(parents=True, exist_ok=True)
    with FileLock(str(path) + ".lock"):
        fd, tmp = tempfile.mkstemp(dir=cache_dir, prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(_format(B, basis.digest()))
        os.replace(tmp, path)
    return B
