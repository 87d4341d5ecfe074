"""The Hecke eigenvector v_E in the Gross module and the modular degree.

v_E = sum v_i e_i is the eigenvector of t_l acting by
t_l(e_i) = sum_k B_ik(l) e_k, so in coordinates v B(l) = a_l v, i.e. v lies
in the kernel of B(l)^T - a_l I. Mestre's identity then gives
m_E * |E(Q)_tors| = <v, v> = sum w_i v_i^2 for optimal E of prime conductor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..elliptic import CurveQ, conductor_semistable, local_ap, torsion_order
from ..numth import is_prime
from .basis import SupersingularBasis, enumerate_supersingular, frobenius_perm
from .brandt import brandt_matrix
from .linalg import kernel, primitive, vec_mat
from .modpoly import SUPPORTED_ELLS


class NeedsMoreHeckeError(RuntimeError):
    """The joint eigenspace is still more than one-dimensional at l = 13."""


class InconsistentEigenvalueError(RuntimeError):
    """No common eigenvector: the a_l do not belong to a form of level p."""


class InvariantError(RuntimeError):
    """A structural identity (sum zero, Frobenius, exact division) failed."""


@dataclass(frozen=True)
class EigenvectorRecord:
    label: str
    p: int
    v: tuple[int, ...]
    eigenvalues_used: tuple[tuple[int, int], ...]
    pairing: int
    torsion: int
    modular_degree: int

    def as_json(self) -> dict:
        return {
            "label": self.label,
            "p": self.p,
            "v": list(self.v),
            "eigenvalues_used": [list(x) for x in self.eigenvalues_used],
            "pairing": self.pairing,
            "torsion": self.torsion,
            "modular_degree": self.modular_degree,
        }


def gross_pairing(v: Sequence[int], basis: SupersingularBasis) -> int:
    """<v, v> = sum w_i v_i^2."""
    if len(v) != basis.n:
        raise ValueError(f"vector of length {len(v)} for a basis of size {basis.n}")
    return sum(w * x * x for w, x in zip(basis.weights, v))


def prime_conductor(E: CurveQ) -> int:
    N = E.ingested.conductor or conductor_semistable(E)
    if not is_prime(N) or N <= 3:
        raise ValueError(f"{E} has conductor {N}, not a prime > 3")
    return N


def hecke_eigenvector(
    E: CurveQ,
    basis: Optional[SupersingularBasis] = None,
    check_all: bool = True,
) -> EigenvectorRecord:
    """Primitive integral v_E with first nonzero entry positive."""
    p = prime_conductor(E)
    basis = basis or enumerate_supersingular(p)
    if basis.p != p:
        raise ValueError(f"basis is for p = {basis.p}, curve has conductor {p}")
    n = basis.n
    ells = [ell for ell in SUPPORTED_ELLS if ell != p]
    rows: list[list[int]] = []
    used = []
    vecs: list[list[int]] = []
    for ell in ells:
        a = local_ap(E, ell)
        B = brandt_matrix(p, ell, basis)
        for k in range(n):
            rows.append([B.M[i][k] - (a if i == k else 0) for i in range(n)])
        used.append((ell, a))
        vecs = kernel(rows, n)
        if len(vecs) <= 1:
            break
    if not vecs:
        raise InconsistentEigenvalueError(f"{E}: a_l {used} admit no common eigenvector mod {p}")
    if len(vecs) > 1:
        raise NeedsMoreHeckeError(f"{E}: eigenspace of dimension {len(vecs)} after l <= 13")
    v = primitive(vecs[0])
    if sum(v):
        raise InvariantError(f"{E}: eigenvector coordinates sum to {sum(v)}")
    if check_all:
        for ell in ells[len(used):]:
            a = local_ap(E, ell)
            if vec_mat(v, brandt_matrix(p, ell, basis).M) != [a * x for x in v]:
                raise InconsistentEigenvalueError(f"{E}: a_{ell} = {a} fails on v")
    # t_p permutes e_i -> e_conj(i) and acts on v_E by a_p = -w_p
    ap_p = local_ap(E, p)
    perm = frobenius_perm(basis)
    if any(v[perm[i]] != ap_p * v[i] for i in range(n)):
        raise InvariantError(f"{E}: v is not a t_p-eigenvector with a_p = {ap_p}")
    pairing = gross_pairing(v, basis)
    tors = E.ingested.torsion_order or torsion_order(E)
    if pairing % tors:
        raise InvariantError(f"{E}: <v,v> = {pairing} not divisible by torsion {tors}")
    return EigenvectorRecord(
        E.label, p, tuple(v), tuple(used), pairing, tors, pairing // tors
    )


class DegreeMismatchError(RuntimeError):
    pass


def modular_degree_prime(E: CurveQ, basis: Optional[SupersingularBasis] = None) -> int:
    """m_E = <v_E, v_E> / |E(Q)_tors| for an optimal curve of prime conductor."""
    rec = hecke_eigenvector(E, basis)
    known = E.ingested.modular_degree
    if known is not None and known != rec.modular_degree:
        raise DegreeMismatchError(f"{E}: computed m_E = {rec.modular_degree}, table {known}")
    return rec.modular_degree
