from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hecke3 import dyadic as dy
from hecke3 import repaudit as ra
from hecke3.cyclolinalg import GaussRat
from hecke3.errors import InsufficientPrecision, NilpotentRisk, NotMember

two_adic = st.builds(lambda n, k: Fraction(n, 2 ** k), st.integers(-10 ** 6, 10 ** 6), st.integers(0, 8))
odd = st.integers(-999, 999).map(lambda n: 2 * n + 1)


def test_psi_values():
    assert dy.psi(1).to_gauss() == GaussRat(-1)
    assert dy.psi(Fraction(1, 2)).to_gauss() == GaussRat(0, 1)
    assert dy.psi(Fraction(1, 2), conjugate=True).to_gauss() == GaussRat(0, -1)
    assert dy.psi(2) == dy.ONE
    assert dy.psi(Fraction(1, 3)) == dy.psi(Fraction(1, 3) + 2)


@given(two_adic, two_adic)
def test_psi_additive(x, y):
    assert dy.psi(x + y) == dy.psi(x) * dy.psi(y)


@given(two_adic, st.integers(-999, 999), odd)
def test_psi_trivial_on_2Z2(x, n, u):
    assert dy.psi(x + Fraction(2 * n, u)) == dy.psi(x)


@given(two_adic, two_adic)
def test_dyadic_matches_fractions(x, y):
    X, Y = dy.Dyadic.from_rational(x, 40), dy.Dyadic.from_rational(y, 40)
    assert dy.psi(X + Y) == dy.psi(x + y)
    assert dy.psi(X * Y) == dy.psi(x * y)
    if y:
        assert dy.psi(X / Y) == dy.psi(x / y)
    assert dy.valuation(X) == dy.valuation(x)


def test_unknown_valuation_and_retry():
    o = dy.Dyadic.big_o(3)
    with pytest.raises(InsufficientPrecision):
        dy.valuation(o)
    assert dy.at_least(o, 2)
    with pytest.raises(InsufficientPrecision):
        o.inverse()
    calls = []

    def needs(k):
        calls.append(k)
        if k < 128:
            raise InsufficientPrecision("more")
        return k

    assert dy.with_precision_retry(needs) == 128 and calls == [32, 64, 128]


def test_filtration_patterns():
    assert dy.filtration_pattern(0) == ((0, 0), (1, 0))
    assert dy.filtration_pattern(3) == ((2, 1), (2, 2))
    pi = ((0, 1), (2, 0))
    assert dy.filtration_level(pi) == 1
    assert dy.in_U(((5, 2), (4, 5)), 3)
    assert not dy.in_U(((3, 0), (0, 1)), 3)


def test_psi_alpha_closed_form_agrees():
    rng = random.Random(5)
    for _ in range(300):
        x = ra.random_U3(rng)
        for D in (1, -1):
            for t in (0, 1):
                a = dy.AlphaDatum(D, t)
                assert dy.psi_alpha(a, x) == dy.psi_alpha_closed_form(a, x)


def test_psi_alpha_needs_U3():
    with pytest.raises(NotMember):
        dy.psi_alpha((1, 0), ((3, 0), (0, 1)))


@given(st.integers(-50, 50), odd, odd, st.integers(-50, 50))
def test_normal_form_conjugation(a, b, c, d):
    alpha = dy.m2(Fraction(2 * a, 8), Fraction(b, 8), Fraction(2 * c, 8), Fraction(2 * d, 8))
    g = dy.conjugator(a, b, c, d)
    conj = dy.m2_mul(dy.m2_mul(dy.m2_inv(g), alpha), g)
    assert conj == dy.m2(0, Fraction(1, 8), Fraction(b * c - 2 * a * d, 4), Fraction(a + d, 4))
    nf = dy.alpha_normal_form(a, b, c, d)
    x = ra.random_U3(random.Random(a * 1000 + d))
    assert dy.psi_trace(conj, x) == dy.psi_alpha(nf, x)


def test_normal_form_nilpotent_risk():
    with pytest.raises(NilpotentRisk):
        dy.alpha_normal_form(0, 2, 1, 0)


def test_E_units():
    D = -1
    g = dy.m2(Fraction(3), Fraction(5), Fraction(2 * D * 5), Fraction(3))
    n, x, y = dy.in_E_units(g, D)
    assert (n, x, y) == (0, 3, 5)
    with pytest.raises(NotMember):
        dy.in_E_units(((1, 1), (0, 1)), D)


def test_J_alpha_closed_under_products():
    rng = random.Random(11)
    a = dy.AlphaDatum(-1, 0)
    pi = a.pi()
    elems = [dy.m2_mul(e, ra.random_U3(rng)) for e in dy.E_unit_classes(-1) for _ in range(5)]
    elems.append(pi)
    for g in elems:
        assert dy.in_J_alpha(g, a)
        for h in elems[:6]:
            assert dy.in_J_alpha(dy.m2_mul(g, h), a)
    assert not dy.in_J_alpha(((3, 0), (0, 1)), a)
