from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hecke3 import dyadic as dy
from hecke3 import heckeops as ho
from hecke3 import repaudit as ra
from hecke3.cyclolinalg import GaussRat
from hecke3.errors import InconsistentInputs

seeds = st.integers(0, 10 ** 9)


def test_s2_has_trivial_witness():
    w = ra.pqk_normal_form(ra.S2)
    assert w.rep == "s2" and ra.check_witness(ra.S2, w)


@pytest.mark.parametrize("i", range(1, 7))
def test_conjugated_representative_roundtrip(i):
    rng = random.Random(i)
    p, q = ra.random_P(rng, 128), ra.random_Q(rng, 128)
    g = ra.mul_mod(ra.mul_mod(p, ra.M(i), 128), q, 128)
    w = ra.pqk_normal_form(g)
    assert w.rep == f"M{i}" and ra.check_witness(g, w)


@given(seeds)
def test_normal_form_is_idempotent(seed):
    g = ra.random_invertible(random.Random(seed), 128)
    w = ra.pqk_normal_form(g)
    rep = ra.representatives()[w.rep]
    assert ra.pqk_normal_form(rep).rep == w.rep
    assert ra.in_P(w.left, 128) and ra.in_Q(w.right, 128)


def test_representatives_pairwise_inequivalent_mod_8():
    assert ra.audit_inequivalence(3).passed


def test_mod2_structure():
    res = ra.audit_mod2()
    assert res.passed
    assert res.counts["group_order"] == 168
    assert res.counts["classes"] == {"1": 72, "s2": 96}


def test_k7_examples():
    a = ra.ALPHA
    assert dy.in_J_alpha(ra.k7_conjugate(1, 0, 0, 1), a)
    assert not dy.in_J_alpha(ra.k7_conjugate(1, 0, 0, 3), a)
    assert dy.in_J_alpha(ra.k7_conjugate(1, 1, 0, 1), a)
    assert ra.k7_psi_factor(1, 1, 0, 1) == dy.ONE


def test_k7_characterization():
    assert ra.verify_k7_characterization(2000, 3).passed


def test_sign_test_and_r_sum():
    assert ra.alpha_sign_test(1) == GaussRat(-2)
    assert ra.alpha_sign_test(-1) == GaussRat(2)
    with pytest.raises(ValueError):
        ra.alpha_sign_test(3)
    terms = ra.r_sum_terms()
    assert terms[1] == dy.psi(Fraction(2, 15)) == dy.ONE
    assert ra.r_sum_check() == GaussRat(4) == ra.r_sum_via_psi_alpha()


def test_r_sum_matrices_lie_in_U3():
    for r in (1, 3, 5, 7):
        assert dy.in_U(ra.r_sum_matrix(r), 3)


def test_lambda_chain():
    ch = ra.lambda_chain(ho.EXPECTED_EIGENVALUES)
    assert ch.chi2 == GaussRat(0, -2)
    assert ch.D == -1
    assert ch.lambda_u == GaussRat(0, 1)
    assert ch.lambda_w == GaussRat(Fraction(1, 2), Fraction(1, 2))
    assert ch.lambda_w * ch.lambda_w == GaussRat(1) / ch.chi2


def test_lambda_chain_conjugated():
    vals = [v.conjugate() for v in ho.EXPECTED_EIGENVALUES.values()]
    ch = ra.lambda_chain(vals, conjugate=True)
    assert ch.chi2 == GaussRat(0, 2)
    assert ch.lambda_u == GaussRat(0, -1)
    assert ch.lambda_w == GaussRat(Fraction(1, 2), Fraction(-1, 2))


def test_lambda_chain_rejects_bad_inputs():
    vals = list(ho.EXPECTED_EIGENVALUES.values())
    with pytest.raises(InconsistentInputs):
        ra.lambda_chain(vals[:-1] + [GaussRat(2)])
    with pytest.raises(InconsistentInputs):
        ra.lambda_chain(vals[:3] + [GaussRat(7)] + vals[4:])
    with pytest.raises(InconsistentInputs):
        ra.lambda_chain(vals[:5] + [GaussRat(8, 8)] + vals[6:])
    with pytest.raises(InconsistentInputs):
        ra.lambda_chain(vals[:6])


def test_identity_examples():
    assert ra.upper_identity_check(1, 0, 0, 0, 1, 1, 1, 1, 1)
    assert ra.upper_identity_check(2, 1, 1, 1, 1, 0, 1, 0, 1)
    with pytest.raises(ValueError):
        ra.upper_identity_check(2, 1, 2, 0, 0, 0, 0, 0, 0)


@given(st.integers(1, 6), st.data())
def test_identities_hold_for_all_integers(n, data):
    i = data.draw(st.integers(0, n))
    j = data.draw(st.integers(0, i))
    args = [data.draw(st.integers(-40, 40)) for _ in range(6)]
    assert ra.upper_identity_check(n, i, j, *args)


def test_recursion_multiplicities():
    assert ra.recursion_sweep(2).passed


def test_recursion_negative_control():
    # swapping the multiplicities in the i > j case must break the identity
    n, i, j = 2, 1, 0
    X, Y, Z = ra.coordinate_ranges(n, i, j)
    lhs = Counter(ho.local_key(ho.mat_mul(t, ra.s_term(n, i, j, x, y, z)), 128)
                  for t in ra.T_REPS for x in range(X) for y in range(Y) for z in range(Z))
    a, b = ra.s_labels(n + 1, i, j + 1), ra.s_labels(n + 1, i + 1, j)
    assert lhs == a + a + b
    assert lhs != a + b + b
