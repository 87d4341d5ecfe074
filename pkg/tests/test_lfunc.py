import math
import random

import pytest
from hypothesis import given, strategies as st

from moddeg.elliptic import CurveQ, count_points_fp2, local_ap
from moddeg.lfunc import (
    DEFAULT_PRIME_BOUND,
    LocalKind,
    OutOfScopeError,
    faltings_height,
    moddeg_estimate,
    period_lattice,
    sym2_L_truncated,
    sym2_local_factor,
)
from moddeg.numth import primes_up_to

# periods and L(Sym^2 E, 2) from PARI (ellperiods / lfunsympow), frozen
PARI = {
    "11a1": ([0, -1, 1, -10, -20], 11, 1.2692093042795534217, 1.4588166169384952, 1.0575992445909579),
    "37a1": ([0, 0, 1, -1, 0], 37, 2.993458646231959630, 2.451389381986790061, 2.492262044273650774),
    "43a1": ([0, 1, 1, 0, 0], 43, 5.468689529967583825, 1.3631824181704336, 2.178605786011312360),
    "389a1": ([0, 1, 1, -2, 0], 389, 2.490212560855055075, 1.9717377015516482045, 3.172311447707172235),
}
DEGREES = {"11a1": 1, "37a1": 2, "43a1": 2, "389a1": 40}
CONG_PERIODS = (2.622057554292119811, 2.622057554292119811)


def curve(label):
    ainvs, N, *_ = PARI[label]
    return CurveQ.from_ainvs(ainvs, label, conductor=N)


@pytest.mark.parametrize("label", sorted(PARI))
def test_periods_against_pari(label):
    _, _, w1, im2, _ = PARI[label]
    lat = period_lattice(curve(label))
    assert lat.omega1 == pytest.approx(w1, rel=1e-12)
    assert abs(lat.omega2.imag) == pytest.approx(im2, rel=1e-12)
    assert lat.vol == pytest.approx(w1 * im2, rel=1e-12)


def test_periods_rectangular():
    lat = period_lattice(CurveQ.from_ainvs([0, 0, 0, -1, 0]))
    assert lat.omega1 == pytest.approx(CONG_PERIODS[0], rel=1e-12)
    assert lat.omega2.imag == pytest.approx(CONG_PERIODS[1], rel=1e-12)
    assert lat.components == 2


@pytest.mark.parametrize("label", sorted(PARI))
def test_components_and_lattice_type(label):
    E = curve(label)
    lat = period_lattice(E)
    assert lat.components == (2 if E.discriminant > 0 else 1)
    ratio = lat.vol * lat.components / lat.omega1
    if lat.components == 2:
        assert ratio == pytest.approx(2 * abs(lat.omega2.imag), rel=1e-12)
        assert lat.omega2.real == pytest.approx(0, abs=1e-12)
    else:
        # omega2 = -omega1 / 2 + i y for a non-rectangular lattice
        assert abs(lat.omega2.real) == pytest.approx(lat.omega1 / 2, rel=1e-12)
        assert ratio == pytest.approx(abs(lat.omega2.imag), rel=1e-12)


def scaled(E, u, label=""):
    """The model with a_i -> u^i a_i, isomorphic to E and non-minimal at p | u."""
    return CurveQ.from_ainvs([a * u**i for a, i in zip(E.ainvs, (1, 2, 3, 4, 6))], label,
                             conductor=E.ingested.conductor)


@pytest.mark.parametrize("u", [5, 7, 35])
def test_period_lattice_model_independent(u):
    E = curve("11a1")
    assert period_lattice(scaled(E, u)).vol == pytest.approx(period_lattice(E).vol, rel=1e-10)
    # without rescaling the lattice shrinks by u
    raw = period_lattice(scaled(E, u), minimal=False)
    assert raw.omega1 * u == pytest.approx(period_lattice(E).omega1, rel=1e-10)


@pytest.mark.parametrize("label", sorted(PARI))
def test_faltings_height_against_pari_volume(label):
    _, _, w1, im2, _ = PARI[label]
    assert faltings_height(curve(label)) == pytest.approx(-0.5 * math.log(w1 * im2), abs=1e-10)


@pytest.mark.parametrize("u", [2, 3, 7])
def test_faltings_height_scaling(u):
    A, B = curve("37a1").short_model()
    h0 = faltings_height(CurveQ.short(A, B), minimal=False)
    h1 = faltings_height(CurveQ.short(A * u**4, B * u**6), minimal=False)
    assert h1 - h0 == pytest.approx(math.log(u), abs=1e-9)


@pytest.mark.parametrize("u", [5, 11])
def test_faltings_height_minimal_is_model_independent(u):
    E = curve("37a1")
    assert faltings_height(scaled(E, u)) == pytest.approx(faltings_height(E), abs=1e-9)


# -- local factors -----------------------------------------------------------


def sym2_coefficients_brute(E, p):
    """h1, h2 of (alpha^2, p, beta^2) from point counts over F_p and F_p^2."""
    a = local_ap(E, p)
    a2 = p * p + 1 - count_points_fp2(E, p)
    assert a2 == a * a - 2 * p
    h1 = a2 + p
    e2 = p * a2 + p * p  # alpha^2 p + alpha^2 beta^2 + p beta^2
    return h1, h1 * h1 - e2


@pytest.mark.parametrize("label", ["11a1", "37a1", "389a1"])
def test_local_factor_vs_point_counts(label):
    E = curve(label)
    N = PARI[label][1]
    rng = random.Random(label)
    good = [p for p in primes_up_to(400) if p > 3 and N % p]
    for p in rng.sample(good, 20):
        lf = sym2_local_factor(E, p)
        assert lf.kind == LocalKind.GOOD
        c = lf.dirichlet_coefficients(2)
        assert (c[1], c[2]) == sym2_coefficients_brute(E, p)


def test_bad_factors():
    E = curve("11a1")
    lf = sym2_local_factor(E, 11)
    assert lf.kind == LocalKind.MULTIPLICATIVE
    assert lf.coefficients == (1, -1)
    assert lf.inverse_at(2.0) == pytest.approx(1 - 11**-2)
    add = sym2_local_factor(E, 3, N=9 * 11)
    assert add.kind == LocalKind.ADDITIVE and add.coefficients == (1,)
    assert add.inverse_at(2.0) == 1


@given(st.integers(-40, 40), st.sampled_from([5, 7, 11, 101, 997]), st.floats(2, 4))
def test_good_factor_is_product_form(a, p, s):
    """Inverse factor = (1 - alpha^2 X)(1 - p X)(1 - beta^2 X) with X = p^-s."""
    from moddeg.lfunc import _good_inverse_coeffs, Sym2LocalFactor

    lf = Sym2LocalFactor(p, LocalKind.GOOD, _good_inverse_coeffs(a, p))
    x = p ** (-s)
    t = a * a - 2 * p
    assert lf.inverse_at(s) == pytest.approx((1 - p * x) * (1 - t * x + p * p * x * x), rel=1e-12)


# -- truncated products --------------------------------------------------------


def test_empty_product():
    assert sym2_L_truncated(curve("11a1"), 2.0, 1).value == 1.0


def test_out_of_scope():
    E = CurveQ.from_ainvs([0, 0, 0, -1, 0], conductor=32)
    with pytest.raises(OutOfScopeError):
        sym2_L_truncated(E, 2.0, 100)
    with pytest.raises(OutOfScopeError):
        moddeg_estimate(E, 100)


@pytest.mark.parametrize("label", ["11a1", "37a1"])
def test_s3_partials_within_tail_bound(label):
    # each good log-factor is at most about 4 p^(1-s), so the tail past Q is below 16/Q at s = 3
    P = DEFAULT_PRIME_BOUND
    L = sym2_L_truncated(curve(label), 3.0, P)
    for cut, v in L.partials:
        assert abs(v - L.value) <= L.value * 16 / cut


@pytest.mark.parametrize("label", ["11a1", "37a1"])
def test_s3_successive_differences_decrease(label):
    """|L(P/2) - L(P/4)| > |L(P) - L(P/2)| at s = 3.

    Fails for 11a1: the tail terms change sign, so the increments are not monotone.
    """
    L = sym2_L_truncated(curve(label), 3.0, DEFAULT_PRIME_BOUND)
    (_, a), (_, b), (_, c) = L.partials
    assert abs(c - b) < abs(b - a)


def test_s25_cauchy_within_1e6():
    """Partial products at s = 2.5 agree to 1e-6 by P = 10^5.

    Expected to fail: the tail beyond P/4 fluctuates at order 1/P.
    """
    L = sym2_L_truncated(curve("11a1"), 2.5, DEFAULT_PRIME_BOUND)
    vals = [v for _, v in L.partials]
    assert max(vals) - min(vals) < 1e-6, vals


# -- estimator ------------------------------------------------------------------


@pytest.mark.parametrize("label", sorted(PARI))
def test_estimator_identity_with_exact_L(label):
    """With the exact L-value in place of the truncation the identity is sharp."""
    est = moddeg_estimate(curve(label), 5000)
    exact = est.estimate * PARI[label][4] / est.sym2.value
    assert exact == pytest.approx(DEGREES[label], rel=1e-8)


def test_11a1_within_quarter_of_identity():
    E = curve("11a1")
    L = sym2_L_truncated(E, 2.0, DEFAULT_PRIME_BOUND).value
    vol = period_lattice(E).vol
    target = 2 * math.pi * vol * 1 / 11
    assert abs(L - target) <= 0.25 * target


@pytest.mark.parametrize("label, m", [("11a1", 1), ("37a1", 2)])
def test_estimator_rounds(label, m):
    est = moddeg_estimate(curve(label))
    assert est.rounded == m
    assert abs(est.estimate - m) < 0.05
    for _, v in est.diagnostic():
        assert abs(v - est.estimate) <= 0.25 * est.estimate
    assert est.as_json()["rounded"] == m


def test_estimator_model_invariant():
    E = curve("37a1")
    other = scaled(E, 5, "37a1'")
    e1, e2 = moddeg_estimate(E, 3000), moddeg_estimate(other, 3000)
    assert e2.estimate == pytest.approx(e1.estimate, rel=1e-9)


@pytest.mark.slow
def test_estimator_rounds_for_prime_conductor_up_to_100(curves):
    from moddeg.gross import modular_degree_prime
    from moddeg.numth import is_prime

    checked = 0
    for E in curves:
        N = E.ingested.conductor
        if N > 100 or not is_prime(N) or E.ingested.modular_degree is None:
            continue
        assert moddeg_estimate(E).rounded == modular_degree_prime(E), E.label
        checked += 1
    assert checked == 14
