import math
import random
from fractions import Fraction

import gmpy2
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from adaptive_ocdma.ber import (
    InterferenceModel,
    SystemSpec,
    approx_ber,
    approx_ber_single,
    bracket_polynomial,
    ber_single,
    exact_ber,
    miss_counts,
    worst_case_model,
)
from adaptive_ocdma.combinatorics import CodeParams, binomial
from oracles import (
    ber_multi_rational,
    ber_single_rational,
    cross_bracket_coeffs,
    self_bracket_coeffs,
    trim,
)

# exact value for N=10, M=1, L=100, W=4, lam=2 from the rational oracle
FROZEN_V = Fraction(12357234879121379, 2562890625000000000)


def _frac(x):
    return Fraction(*x.as_integer_ratio()) if hasattr(x, "as_integer_ratio") else Fraction(x)


def _rel(a, b):
    a, b = _frac(a), _frac(b)
    if b == 0:
        return abs(a)
    return abs(a - b) / abs(b)


def valid_single():
    # keep the worst-case hit probability W^2 / (2 M lam L) <= 1
    @st.composite
    def build(draw):
        M = draw(st.integers(1, 3))
        lam = draw(st.integers(1, 3))
        W = draw(st.integers(lam, 10))
        L = draw(st.integers(max(1, -(-W * W // (2 * M * lam)), -(-W // M)), 300))
        N = draw(st.integers(1, 20))
        return N, CodeParams(M, L, W, lam)
    return build()


# ---- worst-case model ------------------------------------------------------

def test_worst_case_model_values():
    spec = SystemSpec.single(2, CodeParams(1, 5, 1, 1))
    assert worst_case_model(spec).P[(0, 0)] == (Fraction(1, 10),)
    spec = SystemSpec.single(2, CodeParams(1, 40, 3, 1))
    assert worst_case_model(spec).P[(0, 0)] == (Fraction(3, 80),)  # 0.0375
    spec = SystemSpec.single(2, CodeParams(1, 40, 6, 3))
    P = worst_case_model(spec).P[(0, 0)]
    assert P[:2] == (0, 0) and P[2] == Fraction(36, 2 * 3 * 40 * binomial(6, 3))


def test_worst_case_model_rejects_overloaded_code():
    with pytest.raises(ValueError):
        worst_case_model(SystemSpec.single(2, CodeParams(1, 4, 4, 1)))


def test_interference_model_validation():
    with pytest.raises(ValueError):
        InterferenceModel({(0, 0): (-0.1,)})
    with pytest.raises(ValueError):
        InterferenceModel({(0, 0): (0.6, 0.5)})


def test_system_spec_validation():
    base = dict(M=1, N=(3, 4), L=(40, 60), W=(5, 6), Gamma=((2, 2), (2, 3)))
    SystemSpec(**base)
    with pytest.raises(ValueError):
        SystemSpec(**{**base, "L": (40,)})
    with pytest.raises(ValueError):
        SystemSpec(**{**base, "Gamma": ((0, 2), (2, 3))})
    with pytest.raises(ValueError):
        SystemSpec(**{**base, "C": ((2, 1), (1, 1))})
    with pytest.raises(ValueError):
        SystemSpec(**{**base, "C": ((1, 0), (1, 1))})
    with pytest.raises(ValueError):
        SystemSpec(**{**base, "B": (1, 0)})
    with pytest.raises(ValueError):
        SystemSpec(**{**base, "W": (1, 6)})  # lam_11 = 2 > W_1
    s = SystemSpec(**{**base, "Rc": 2.0})
    assert s.rate(1) == 2.0 / 60 and s.K == 2 and s.interferers(0, 0) == 2


# ---- bracket polynomials ---------------------------------------------------

@given(st.integers(0, 12), st.integers(1, 5), st.integers(0, 12))
def test_miss_counts_identity(W, m, i):
    assume(i <= W)
    assert miss_counts(W, m, i) == binomial(W - i, m) - binomial(W, m)


def test_self_bracket_matches_symbolic_expansion():
    for W in range(1, 9):
        for lam in range(1, min(W, 3) + 1):
            L = max(W, -(-W * W // (2 * lam))) + 3
            spec = SystemSpec.single(3, CodeParams(1, L, W, lam))
            got = trim(bracket_polynomial(spec, worst_case_model(spec), 0, 0))
            assert got == self_bracket_coeffs(1, L, W, lam)


def test_cross_bracket_matches_hit_avoidance_form():
    for W1 in range(1, 9):
        for lam in range(1, min(W1, 3) + 1):
            W2, L2 = W1 + 1, 50
            spec = SystemSpec(M=1, N=(2, 3), L=(40, L2), W=(W1, W2),
                              Gamma=((1, lam), (lam, 1)))
            got = trim(bracket_polynomial(spec, worst_case_model(spec), 0, 1))
            assert got == cross_bracket_coeffs(1, W1, W2, L2, lam)


# ---- exact BER -------------------------------------------------------------

def test_exact_ber_trivial_anchors():
    # W = 1: (f(0) - f(1)) / 2 with f(1) = 1 - 1/(2 M L)
    assert _rel(ber_single(2, CodeParams(1, 5, 1, 1)), Fraction(1, 20)) <= 1e-70
    for p in [CodeParams(1, 50, 4, 1), CodeParams(2, 30, 7, 2), CodeParams(1, 1, 1, 1)]:
        assert ber_single(1, p) == 0


def test_exact_ber_frozen_value():
    got = ber_single(10, CodeParams(1, 100, 4, 2))
    assert ber_single_rational(10, 1, 100, 4, 2) == FROZEN_V
    assert _rel(got, FROZEN_V) <= 1e-20


@given(valid_single())
def test_exact_ber_matches_rational_oracle(case):
    N, p = case
    got = ber_single(N, p, precision=60)
    want = ber_single_rational(N, p.M, p.L, p.W, p.lam)
    assert _rel(got, min(max(want, 0), Fraction(1, 2))) <= 1e-15


def test_two_class_exact_matches_oracle():
    rng = random.Random(7)
    for _ in range(40):
        W = (rng.randint(2, 7), rng.randint(2, 7))
        g = [[rng.randint(1, min(W[k], 3)) for _ in range(2)] for k in range(2)]
        g[1][0] = g[0][1] = min(g[0][1], W[0], W[1])
        L = tuple(max(W[k], max(W[k] * W[q] for q in range(2))) + rng.randint(0, 40) for k in range(2))
        N = (rng.randint(1, 6), rng.randint(0, 6))
        spec = SystemSpec(M=1, N=N, L=L, W=W, Gamma=g)
        for k in range(2):
            if N[k] == 0:
                continue
            want = ber_multi_rational(1, N, L, W, g, k)
            assert _rel(exact_ber(spec, k, precision=60), want) <= 1e-15


def test_exact_ber_precision_converged():
    for N, p in [(60, CodeParams(1, 1139, 28, 2)), (60, CodeParams(1, 1466, 33, 2)),
                 (20, CodeParams(1, 365, 54, 4)), (50, CodeParams(1, 1196, 77, 3))]:
        lo = ber_single(N, p, precision=60)
        hi = ber_single(N, p, precision=120)
        assert _rel(lo, hi) <= 1e-25


def test_double_precision_would_not_do():
    # the same alternating sum in doubles is off by tens of percent at this design point
    N, W, L, lam = 60, 33, 1466, 2
    hit = W * W / (2 * lam * L)
    s = sum((-1) ** i * math.comb(W, i) * (1 - hit * (1 - math.comb(W - i, lam) / math.comb(W, lam))) ** (N - 1)
            for i in range(W + 1)) / 2
    exact = float(ber_single(N, CodeParams(1, L, W, lam)))
    assert abs(s - exact) > 0.1 * exact


def test_exact_ber_rejects_bad_inputs():
    p = CodeParams(1, 100, 4, 2)
    with pytest.raises(ValueError):
        ber_single(5, p, precision=29)
    spec = SystemSpec(M=1, N=(3,), L=(100,), W=(4,), Gamma=((2,),), C=((1,),), B=(2,))
    with pytest.raises(ValueError):
        exact_ber(spec, 0)
    # a model whose bracket leaves [0, 1]
    spec = SystemSpec.single(3, p)
    bad = InterferenceModel({(0, 0): (Fraction(0), Fraction(1))})
    with pytest.raises(ValueError):
        exact_ber(spec, 0, bad)


def test_custom_model_accepted():
    spec = SystemSpec.single(5, CodeParams(1, 100, 4, 2))
    model = InterferenceModel({(0, 0): (Fraction(1, 100), Fraction(1, 400))})
    v = exact_ber(spec, 0, model)
    assert 0 <= v <= 0.5


@given(valid_single(), st.integers(1, 5))
def test_exact_ber_nondecreasing_in_users(case, extra):
    N, p = case
    a = ber_single(N, p, precision=40)
    b = ber_single(N + extra, p, precision=40)
    assert b >= a - gmpy2.mpfr("1e-20")
    assert 0 <= a <= 0.5


# ---- approximation ---------------------------------------------------------

def test_approx_single_examples():
    assert approx_ber_single(2, CodeParams(1, 4, 4, 1)) == 0.5
    assert approx_ber_single(1, CodeParams(1, 4, 2, 1)) == 0.03125
    assert approx_ber_single(5, CodeParams(1, 300, 3, 3)) == pytest.approx(0.5 * 15 / 1800, rel=1e-15)
    # unit base N W = 2 M L lam
    assert approx_ber_single(20, CodeParams(2, 25, 5, 1)) == 0.5


def test_approx_two_class_example():
    spec = SystemSpec(M=1, N=(10, 10), L=(200, 500), W=(4, 6), Gamma=((2, 2), (2, 2)))
    want = 0.5 * ((40 / 800) ** 0.5 + (60 / 2000) ** 0.5) ** 4
    assert approx_ber(spec, 0) == pytest.approx(want, rel=1e-14)


def test_approx_power_and_diversity():
    spec = SystemSpec(M=1, N=(10, 4), L=(200, 500), W=(4, 6), Gamma=((2, 2), (2, 2)),
                      C=((1, 2), (1, 1)), B=(2, 1))
    want = 0.5 * ((40 / 800) ** 0.5 + (24 / 2000) ** 1.0) ** 8
    assert approx_ber(spec, 0) == pytest.approx(want, rel=1e-14)


def test_approx_reduces_to_single_class_bit_identically():
    rng = random.Random(1)
    for _ in range(1000):
        M, lam = rng.randint(1, 4), rng.randint(1, 5)
        W = rng.randint(lam, 120)
        L = rng.randint(-(-W // M), 5000)
        N = rng.randint(1, 200)
        p = CodeParams(M, L, W, lam)
        assert approx_ber(SystemSpec.single(N, p), 0) == approx_ber_single(N, p)


@given(st.integers(1, 3), st.integers(1, 60), st.integers(50, 2000), st.integers(1, 50))
def test_approx_strictly_increasing_in_users(lam, W, L, N):
    assume(lam <= W <= L)
    p = CodeParams(1, L, W, lam)
    assert approx_ber_single(N + 1, p) > approx_ber_single(N, p) >= 0
