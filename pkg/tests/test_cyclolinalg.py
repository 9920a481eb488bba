from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import given, strategies as st

from hecke3 import cyclolinalg as cl
from hecke3.cyclolinalg import GaussRat

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=20)
gauss = st.builds(GaussRat, fracs, fracs)


@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if a != 0:
        assert a * a.inverse() == GaussRat(1)
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()


@given(gauss)
def test_format_roundtrip(a):
    assert cl.parse_gauss(cl.format_gauss(a)) == a


def _cofactor_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum(((-1) ** j) * m[0][j] * _cofactor_det([row[:j] + row[j + 1:] for row in m[1:]])
               for j in range(n) if m[0][j])


def _charpoly_oracle(m, x):
    n = len(m)
    return _cofactor_det([[(x if i == j else 0) - m[i][j] for j in range(n)] for i in range(n)])


def test_charpoly_matches_cofactor_expansion():
    rng = random.Random(3)
    for n in range(1, 6):
        m = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        p = cl.charpoly(m)
        assert p[-1] == 1 and len(p) == n + 1
        for x in range(-3, 4):
            assert cl.poly_eval(p, Fraction(x)) == _charpoly_oracle(m, Fraction(x))
        # Cayley-Hamilton
        assert all(v == 0 for row in cl.poly_eval_matrix(p, m) for v in row)


def test_gaussian_roots_and_eigenspace():
    # block diag of [[1,-2],[2,1]] (eigenvalues 1 +- 2i) and 3
    m = [[Fraction(1), Fraction(-2), Fraction(0)], [Fraction(2), Fraction(1), Fraction(0)],
         [Fraction(0), Fraction(0), Fraction(3)]]
    roots = cl.gaussian_integer_roots(cl.charpoly(m))
    assert set(map(cl.format_gauss, roots)) == {"1+2*i", "1-2*i", "3+0*i"}
    v, = cl.eigenspace(m, GaussRat(1, 2))
    Mv = [sum((GaussRat.coerce(a) * b for a, b in zip(row, v)), GaussRat(0)) for row in m]
    assert Mv == [GaussRat(1, 2) * x for x in v]


def test_kernel_modular_matches_dense():
    rng = random.Random(7)
    for trial in range(10):
        cols = rng.randint(4, 30)
        rows = []
        for _ in range(rng.randint(1, cols)):
            rows.append({j: Fraction(rng.randint(-3, 3)) for j in rng.sample(range(cols), rng.randint(1, 3))})
        rows = [{j: v for j, v in r.items() if v} for r in rows]
        rows = [r for r in rows if r]
        dense = [[r.get(j, Fraction(0)) for j in range(cols)] for r in rows]
        exact = cl.kernel(dense)
        fast = cl.kernel_modular(rows, cols, seed=trial)
        assert len(fast) == len(exact)
        assert cl.rank(exact + fast) == len(exact) if exact else not fast
        assert cl.verify_kernel(rows, fast)


def test_sparse_json_roundtrip():
    m = cl.SparseMat.from_dense([[Fraction(1, 2), 0], [0, GaussRat(1, -1)]])
    assert cl.SparseMat.from_json(m.to_json()).to_dense() == m.to_dense()


def test_gaussian_roots_with_large_coefficients():
    # (x - 31)^7 (x^2 - 2x + 5): the coefficients are far beyond any naive box
    p = [Fraction(1)]
    for root in [31] * 7:
        p = [Fraction(0)] + p
        p = [a - root * b for a, b in zip(p, p[1:] + [Fraction(0)])]
    quad = [Fraction(5), Fraction(-2), Fraction(1)]
    prod = [Fraction(0)] * (len(p) + 2)
    for i, a in enumerate(p):
        for j, b in enumerate(quad):
            prod[i + j] += a * b
    roots = cl.gaussian_integer_roots(prod)
    assert set(map(cl.format_gauss, roots)) == {"31+0*i", "1+2*i", "1-2*i"}
    assert cl.gaussian_integer_roots([Fraction(0), Fraction(0), Fraction(1)]) == [GaussRat(0)]
