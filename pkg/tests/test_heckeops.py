from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from hecke3 import cli
from hecke3 import cyclolinalg as cl
from hecke3 import heckeops as ho
from hecke3 import projspace as ps
from hecke3 import relspace as rs

ops = ho.LEVEL128_OPERATORS


@pytest.mark.parametrize("name", ["diag(2,2,1)", "diag(2,1,1)", "lower(64)", "central(2)"])
def test_small_counts_both_routes(name):
    g = ho.enumerate_decomposition(ops[name], 128)
    loc = ho.enumerate_decomposition(ops[name], 128, local=True)
    assert g.verified and loc.verified
    assert len(g) == len(loc) == cli.COSET_COUNTS[name]


@pytest.mark.parametrize("name", sorted(cli.HAND_WRITTEN))
def test_hand_written_lists(name):
    reps = cli.HAND_WRITTEN[name]()
    dec = ho.CosetDecomposition(ops[name], ps.Level(128), reps, local=True)
    assert ho.verify_decomposition(dec)
    assert len(reps) == cli.COSET_COUNTS[name]


@pytest.mark.parametrize("name", sorted(cli.HAND_WRITTEN))
def test_hand_written_list_missing_one_is_rejected(name):
    reps = cli.HAND_WRITTEN[name]()[1:]
    dec = ho.CosetDecomposition(ops[name], ps.Level(128), reps, local=True)
    assert not ho.verify_decomposition(dec)


def test_sl2_oracles():
    sl2_4 = sum(1 for a, b, c, d in itertools.product(range(4), repeat=4) if (a * d - b * c) % 4 == 1)
    assert sl2_4 == 48 == len(ho.reps_sl2_mod4())


def test_diag311_matches_hyperplane_count():
    lines = {min(tuple(u * x % 3 for x in v) for u in (1, 2))
             for v in itertools.product(range(3), repeat=3) if any(v)}
    dec = ho.enumerate_decomposition(ho.ANCHOR_ALPHA, 128)
    assert len(dec) == len(lines) == 13
    # locally 3 is a unit at 2, so the double coset is a single coset
    assert len(ho.enumerate_decomposition(ho.ANCHOR_ALPHA, 128, local=True)) == 1


small = st.integers(-5, 5)


@given(st.lists(small, min_size=9, max_size=9), st.lists(small, min_size=9, max_size=9))
def test_local_key_agrees_with_membership(a, b):
    g = [a[0:3], a[3:6], a[6:9]]
    h = [b[0:3], b[3:6], b[6:9]]
    assume(ho.mat_det(ho.rat_matrix(g)) != 0 and ho.mat_det(ho.rat_matrix(h)) != 0)
    same = ho.local_key(g, 8) == ho.local_key(h, 8)
    assert same == ho.in_K(ho.mat_mul(ho.mat_inv(ho.rat_matrix(g)), ho.rat_matrix(h)), 8)


@given(st.lists(small, min_size=9, max_size=9), st.lists(small, min_size=9, max_size=9))
def test_global_key_agrees_with_membership(a, b):
    g = [a[0:3], a[3:6], a[6:9]]
    h = [b[0:3], b[3:6], b[6:9]]
    assume(ho.mat_det(ho.rat_matrix(g)) != 0 and ho.mat_det(ho.rat_matrix(h)) != 0)
    same = ho.global_key(g, 4) == ho.global_key(h, 4)
    assert same == ho.in_gamma0(ho.mat_mul(ho.mat_inv(ho.rat_matrix(g)), ho.rat_matrix(h)), 4)


def test_parse_and_format_alpha():
    a = ho.parse_alpha("36,1,0;128,4,0;0,0,4")
    assert a == ops["(36,1;128,4;;4)"]
    assert ho.parse_alpha(ho.format_matrix(ho.rat_matrix([[Fraction(1, 2), 0, 0], [0, 1, 0], [0, 0, 1]])))[0][0] == Fraction(1, 2)
    with pytest.raises(ValueError):
        ho.parse_alpha("1,0;0,1")


def test_commutation_at_level_16():
    basis = rs.solve_model(16)
    A = ho.hecke_matrix(((3, 0, 0), (0, 1, 0), (0, 0, 1)), basis).matrix
    B = ho.hecke_matrix(((3, 0, 0), (0, 3, 0), (0, 0, 1)), basis).matrix
    C = ho.hecke_matrix(((5, 0, 0), (0, 1, 0), (0, 0, 1)), basis).matrix
    assert cl.matmul(A, B) == cl.matmul(B, A)
    assert cl.matmul(A, C) == cl.matmul(C, A)


def test_hecke_matrix_json_roundtrip():
    basis = rs.solve_model(12)
    hm = ho.hecke_matrix(((5, 0, 0), (0, 1, 0), (0, 0, 1)), basis)
    again = ho.HeckeMatrix.from_json(hm.to_json())
    assert again.matrix == hm.matrix and again.cosets == hm.cosets == 31


def test_local_decomposition_is_refused_for_hecke():
    basis = rs.solve_model(8)
    dec = ho.enumerate_decomposition(((2, 0, 0), (0, 1, 0), (0, 0, 1)), 8, local=True)
    with pytest.raises(ValueError):
        ho.hecke_matrix(dec, basis)


@pytest.mark.slow
def test_eigenreport_at_level_128(report128):
    assert report128.level.N == 128
    assert [v for _, _, v in report128.lines] == [ho.EXPECTED_EIGENVALUES[n] for n in ho.EXPECTED_EIGENVALUES]
    assert report128.coset_counts == cli.COSET_COUNTS


def test_membership_examples():
    assert ho.in_K(((1, 0, 0), (0, 1, 0), (0, 0, 1)), 128)
    assert not ho.in_K(((1, 0, 0), (64, 1, 0), (0, 0, 1)), 128)
    # only the conditions at 2 apply at level 128
    assert ho.in_K(((Fraction(1, 3), 0, 0), (0, 1, 0), (0, 0, 3)), 128)
    assert not ho.in_gamma0(((Fraction(1, 3), 0, 0), (0, 1, 0), (0, 0, 3)), 128)
