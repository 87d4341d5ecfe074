import json
import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from moddeg.experiments import (
    MAX_HEIGHT,
    avg_rank_vs_avg_nu2,
    density_omega_scan,
    growth_scan,
    height_cutoffs,
    squarefree_range,
    twist_family_scan,
)

# (nonsingular pairs, omega >= 2, singular) from a sympy brute force over minimal pairs
ORACLE = {1: (8, 0, 0), 2: (150, 24, 2), 4: (4244, 2196, 4), 8: (132066, 93540, 6)}


def brute(x):
    pairs = hits = sing = 0
    for A in range(-x * x, x * x + 1):
        for B in range(-x**3, x**3 + 1):
            # (0, 0) is divisible by every p^4, p^6 and never minimal
            if A == B == 0 or any(A % p**4 == 0 and B % p**6 == 0 for p in sympy.primerange(2, math.isqrt(x) + 1)):
                continue
            d = abs(4 * A**3 + 27 * B * B)
            if d == 0:
                sing += 1
                continue
            pairs += 1
            while d % 2 == 0:
                d //= 2
            while d % 3 == 0:
                d //= 3
            if d > 1 and len(sympy.factorint(d)) >= 2:
                hits += 1
    return pairs, hits, sing


@pytest.mark.parametrize("x", [1, 2])
def test_oracle_reproduces(x):
    assert brute(x) == ORACLE[x]


@pytest.mark.parametrize("x", sorted(ORACLE))
def test_density_matches_oracle(x):
    s = density_omega_scan(x)
    assert (s.counters["pairs"], s.counters["omega_ge_2"], s.counters["singular"]) == ORACLE[x]
    assert s.ratios["proportion"] == Fraction(ORACLE[x][1], ORACLE[x][0])


def test_trend_rows_match_smaller_scans():
    s = density_omega_scan(8)
    rows = {r["x"]: r for r in s.trend}
    assert sorted(rows) == [2, 4, 8]
    for x in (2, 4):
        assert (rows[x]["pairs"], rows[x]["omega_ge_2"], rows[x]["singular"]) == ORACLE[x]


def test_parallel_equals_serial():
    a, b = density_omega_scan(4, workers=1), density_omega_scan(4, workers=2)
    assert json.dumps(a.as_json(), sort_keys=True) == json.dumps(b.as_json(), sort_keys=True)


def test_height_bounds():
    for bad in (0, MAX_HEIGHT + 1):
        with pytest.raises(ValueError):
            density_omega_scan(bad)


@given(st.integers(1, 1000))
def test_cutoffs(x):
    c = height_cutoffs(x)
    assert c == sorted(set(c)) and c[-1] == x and c[0] >= 1


def test_ratio_json():
    out = density_omega_scan(2).as_json()
    assert out["ratios"]["proportion"] == {"exact": "4/25", "decimal": "0.160000"}


# -- averages ---------------------------------------------------------------------


def test_avg_scan_on_table(curves):
    s = avg_rank_vs_avg_nu2(curves)
    assert s.verdict == "pass"
    assert s.ratios["avg_rank"] <= s.ratios["avg_nu2"]
    assert len(s.trend) == 10
    assert sum(r["records"] for r in s.trend) == s.counters["records"]
    lows = [r["conductor_min"] for r in s.trend]
    assert lows == sorted(lows)


def test_avg_scan_small_slices_not_decisive(curves):
    # slices under the minimum size are reported but do not decide the verdict
    s = avg_rank_vs_avg_nu2(curves, slices=100)
    assert all(r["records"] < 100 for r in s.trend)
    assert s.verdict == "pass"


def test_avg_scan_needs_records():
    with pytest.raises(ValueError):
        avg_rank_vs_avg_nu2([])


# -- growth ---------------------------------------------------------------------------


def test_growth_on_table(curves):
    s = growth_scan(curves)
    assert s.verdict == "pass"
    assert 0.9 <= s.statistics["slope"] <= 2.1
    assert s.counters["above_upper"] == 0
    recs = [E for E in curves if E.ingested.modular_degree and E.ingested.rank is not None]
    top = max(recs, key=lambda E: math.log(E.ingested.modular_degree) / math.log(E.ingested.conductor))
    assert s.extra["max_exponent_attained_by"] == top.label
    floor = min(E.ingested.modular_degree / E.ingested.conductor ** (7 / 6) for E in recs)
    assert s.statistics["floor_constant"] == pytest.approx(floor, rel=1e-5)


def test_growth_flags_excess():
    from moddeg.elliptic import CurveQ

    a = CurveQ.from_ainvs([0, -1, 1, -10, -20], "a", conductor=11, rank=0, modular_degree=1)
    b = CurveQ.from_ainvs([0, 0, 1, -1, 0], "b", conductor=37, rank=1, modular_degree=37**3)
    s = growth_scan([a, b])
    assert s.verdict == "fail"
    assert s.extra["above_upper"] == ["b"]


# -- twist families -------------------------------------------------------------------


def test_squarefree_range():
    assert squarefree_range(-10, 10) == [-10, -7, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10]


def test_twist_family(by_label, curves):
    s = twist_family_scan(by_label["11a1"], -30, 30, curves)
    assert s.counters["twists"] == len(squarefree_range(-30, 30))
    row = {r["D"]: r for r in s.trend}
    assert row[1]["twist"] == "11a1" and row[1]["bound"] == 0
    assert row[-11]["twist"] == "121d2"
    assert s.counters["bound_covers_rank"] <= s.counters["matched_with_rank"]
