import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gkp_crosstalk.errors import NotInvertibleError
from gkp_crosstalk.modular import (
    bezout,
    classify_eta,
    enumerate_admissible_etas,
    eta_for,
    extended_gcd,
    inadmissibility_reason,
    mod_inverse,
)


def brute_force_representations(eta, d1, d2, bound):
    """All (q, p) up to ``bound`` with q / (q + p*d1*d2) == eta."""
    dd = d1 * d2
    return [
        (q, p)
        for q in range(1, bound + 1)
        for p in range(1, bound + 1)
        if Fraction(q, q + p * dd) == eta
    ]


@pytest.mark.parametrize(
    "args, expected",
    [
        ((1, 1, 2, 2), Fraction(1, 5)),
        ((1, 1, 1, 1), Fraction(1, 2)),
        ((2, 1, 2, 3), Fraction(1, 4)),
    ],
)
def test_eta_for(args, expected):
    assert eta_for(*args) == expected


@pytest.mark.parametrize("bad", [(0, 1, 2, 2), (1, 0, 2, 2), (1, 1, 0, 2), (1, 1, 2, -1)])
def test_eta_for_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        eta_for(*bad)


def test_classify_paper_example():
    assert classify_eta(Fraction(1, 5), 2, 2) == (1, 1, 5)


def test_classify_qunaught():
    assert classify_eta(Fraction(1, 2), 1, 1) == (1, 1, 2)


def test_classify_one_third_is_inadmissible_for_qubits():
    assert classify_eta(Fraction(1, 3), 2, 2) is None
    assert "gcd" in inadmissibility_reason(Fraction(1, 3), 2, 2)
    # no representation at all is coprime
    reps = brute_force_representations(Fraction(1, 3), 2, 2, 20)
    assert reps and all(gcd(q, 4 * p) != 1 for q, p in reps)


def test_classify_accepts_strings_and_floats():
    assert classify_eta("1/5", 2, 2) == (1, 1, 5)
    assert classify_eta(0.2, 2, 2) == (1, 1, 5)


@pytest.mark.parametrize("eta", [Fraction(0), Fraction(1), Fraction(3, 2), Fraction(-1, 4)])
def test_classify_rejects_out_of_range(eta):
    with pytest.raises(ValueError):
        classify_eta(eta, 2, 2)


@pytest.mark.parametrize("d1", [1, 2, 3])
@pytest.mark.parametrize("d2", [1, 2, 3])
def test_classify_agrees_with_brute_force(d1, d2):
    for num in range(1, 12):
        for den in range(num + 1, 13):
            eta = Fraction(num, den)
            coprime = [
                (q, p)
                for q, p in brute_force_representations(eta, d1, d2, 60)
                if gcd(q, p * d1 * d2) == 1
            ]
            got = classify_eta(eta, d1, d2)
            if coprime:
                assert got is not None
                assert (got.q, got.p) == coprime[0]
            else:
                assert got is None


def test_enumerate_paper_example():
    assert enumerate_admissible_etas(2, 2, 1, 1) == [(Fraction(1, 5), 1, 1, 5)]


def test_enumerate_small_grid_matches_brute_force():
    expected = [
        (Fraction(1, 3), 1, 2, 3),
        (Fraction(1, 2), 1, 1, 2),
        (Fraction(2, 3), 2, 1, 3),
    ]
    assert enumerate_admissible_etas(1, 1, 2, 2) == expected


@pytest.mark.parametrize("d1, d2, qm, pm", [(2, 2, 5, 5), (1, 3, 4, 6), (3, 2, 7, 2)])
def test_enumerate_sorted_unique_inside_unit_interval(d1, d2, qm, pm):
    table = enumerate_admissible_etas(d1, d2, qm, pm)
    etas = [t.eta for t in table]
    assert etas == sorted(set(etas))
    assert all(0 < e < 1 for e in etas)
    for t in table:
        assert eta_for(t.q, t.p, d1, d2) == t.eta
        assert gcd(t.q, t.p * d1 * d2) == 1


def test_extended_gcd_examples():
    assert extended_gcd(1, 4) == (1, 1, 0)
    g, x, y = extended_gcd(3, 4)
    assert g == 1 and 3 * x + 4 * y == 1
    assert extended_gcd(2, 4) == (2, 1, 0)


def test_extended_gcd_zero_zero():
    with pytest.raises(ValueError):
        extended_gcd(0, 0)


def test_extended_gcd_rejects_oversized():
    with pytest.raises(OverflowError):
        extended_gcd(1 << 130, 3)


def test_extended_gcd_identity_random_64bit():
    rng = random.Random(20261016)
    for _ in range(10_000):
        a = rng.randrange(-(2**63), 2**63)
        b = rng.randrange(-(2**63), 2**63)
        g, x, y = extended_gcd(a, b)
        assert g == gcd(a, b) > 0
        assert a * x + b * y == g


@given(st.integers(-(2**63), 2**63 - 1), st.integers(-(2**63), 2**63 - 1))
def test_extended_gcd_identity(a, b):
    if a == 0 and b == 0:
        return
    g, x, y = extended_gcd(a, b)
    assert g == gcd(a, b) > 0
    assert a * x + b * y == g


@pytest.mark.parametrize("r, n, inv", [(4, 5, 4), (2, 5, 3)])
def test_mod_inverse_examples(r, n, inv):
    assert mod_inverse(r, n) == inv


def test_mod_inverse_not_invertible():
    with pytest.raises(NotInvertibleError):
        mod_inverse(2, 4)


@given(st.integers(-(10**6), 10**6), st.integers(2, 10**6))
def test_mod_inverse_property(r, n):
    if gcd(r % n, n) != 1:
        with pytest.raises(NotInvertibleError):
            mod_inverse(r, n)
        return
    t = mod_inverse(r, n)
    assert 0 <= t < n
    assert (r * t) % n == 1


@given(st.integers(1, 50), st.integers(1, 50), st.integers(1, 6), st.integers(1, 6))
def test_classify_roundtrip(q, p, d1, d2):
    eta = eta_for(q, p, d1, d2)
    assert eta.denominator > 0 and gcd(eta.numerator, eta.denominator) == 1
    got = classify_eta(eta, d1, d2)
    if got is None:
        assert gcd(q, p * d1 * d2) != 1
    else:
        assert eta_for(got.q, got.p, d1, d2) == eta
        assert got.n == got.q + got.p * d1 * d2


def test_bezout_pair():
    pair = bezout(3, 8)
    assert pair.alpha * 3 + pair.beta * 8 == 1
    with pytest.raises(NotInvertibleError):
        bezout(2, 8)
