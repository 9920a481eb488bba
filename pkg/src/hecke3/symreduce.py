"""Modular symbols for SL_3 and their reduction to unimodular symbols.

A symbol ``[R]`` is given by a 3x3 integer matrix whose *rows* are the three
defining vectors.  Symbols are projective in each row, alternating in the
rows, vanish when the rows are dependent, and satisfy the four-term relation

    [r1; r2; r3] = [v; r2; r3] + [r1; v; r3] + [r1; r2; v]

for any vector v.  ``Gamma_0(N)`` acts on the right, so a unimodular symbol
pairs with a function F on P^2(Z/N) through its first column:
``<F, [U]> = F(U e1)`` when det U = 1.

Reduction picks v so that the three new determinants are all strictly
smaller in absolute value.  Write M for the transpose of R and D = det R.
For y in Z^3 let a = adj(M) y reduced symmetrically modulo |D| and
v = M a / D.  Then v is integral and the new determinants are exactly the
entries of a, each at most |D|/2 in size, so any y outside M Z^3 makes
progress.  Strategies differ only in which such y they take.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .errors import NonUnimodular, ReductionStall
from .projspace import Level, PointTable, enumerate_points, normalize

log = logging.getLogger(__name__)

Matrix = tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise ValueError("a symbol needs a 3x3 matrix")
    return tuple(tuple(int(x) for x in r) for r in rows)  # type: ignore[return-value]


def det3(m: Sequence[Sequence[int]]) -> int:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def adjugate(m: Sequence[Sequence[int]]) -> list[list[int]]:
    """adj(m), so that m @ adj(m) = det(m) * I."""
    def minor(i, j):
        r = [k for k in range(3) if k != i]
        c = [k for k in range(3) if k != j]
        return m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]]
    return [[(-1) ** (i + j) * minor(j, i) for j in range(3)] for i in range(3)]


def matmul3(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    return [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


@dataclass(frozen=True)
class ModularSymbol:
    rows: Matrix

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "ModularSymbol":
        return cls(as_matrix(rows))

    @property
    def det(self) -> int:
        return det3(self.rows)

    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    def right(self, g: Sequence[Sequence[int]]) -> "ModularSymbol":
        return ModularSymbol(as_matrix(matmul3(self.rows, g)))


def symbol_det(rows: Sequence[Sequence[int]] | ModularSymbol) -> int:
    if isinstance(rows, ModularSymbol):
        return rows.det
    return det3(rows)


class SymbolSum(Counter):
    """Formal Z-combination of unimodular symbols with determinant +1."""

    def add(self, m: Matrix, c: int = 1) -> None:
        s = self.get(m, 0) + c
        if s:
            self[m] = s
        else:
            self.pop(m, None)

    def points(self, level: Level | int) -> dict[tuple[int, int, int], int]:
        """Collapse to a combination of points of P^2(Z/N)."""
        N = level.N if isinstance(level, Level) else level
        out: dict[tuple[int, int, int], int] = {}
        for m, c in self.items():
            q = normalize(m[0][0], m[1][0], m[2][0], N)
            s = out.get(q, 0) + c
            if s:
                out[q] = s
            else:
                out.pop(q, None)
        return out


def _positive(m: Matrix) -> Matrix:
    """Flip the sign of the first row when det is negative (projectively free)."""
    if det3(m) > 0:
        return m
    return (tuple(-x for x in m[0]), m[1], m[2])  # type: ignore[return-value]


def _candidates(m: Matrix, D: int) -> list[tuple[int, int, int]]:
    """All a = adj(M) y mod |D| in symmetric range, y running over Z^3 / M Z^3."""
    M = [list(col) for col in zip(*m)]  # transpose: columns are the rows of m
    adj = adjugate(M)
    d = abs(D)
    gens = [tuple(adj[i][j] % d for i in range(3)) for j in range(3)]
    seen = {(0, 0, 0)}
    frontier = [(0, 0, 0)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = ((a[0] + g[0]) % d, (a[1] + g[1]) % d, (a[2] + g[2]) % d)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    half = d // 2
    out = []
    for a in seen:
        if a == (0, 0, 0):
            continue
        out.append(tuple(x - d if x > half else x for x in a))
    out.sort()
    return out


def _score_maxabs(a):
    return (max(abs(x) for x in a), sum(abs(x) for x in a), a)


def _score_sumabs(a):
    return (sum(abs(x) for x in a), max(abs(x) for x in a), a)


def _score_zeros(a):
    # favour many vanishing determinants (fewer children)
    return (sum(1 for x in a if x), max(abs(x) for x in a), a)


STRATEGIES: dict[str, Callable] = {
    "minmax": lambda cands: min(cands, key=_score_maxabs),
    "minsum": lambda cands: min(cands, key=_score_sumabs),
    "fewest": lambda cands: min(cands, key=_score_zeros),
    "first": lambda cands: cands[0],
    "last": lambda cands: cands[-1],
}


def reducing_vector(m: Matrix, strategy: str = "minmax") -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    """(v, a): a reducing vector for the symbol and its three sub-determinants."""
    D = det3(m)
    if abs(D) <= 1:
        raise ValueError("symbol is already unimodular or degenerate")
    cands = _candidates(m, D)
    if not cands:
        raise ReductionStall(f"no reducing vector for {m}")
    a = STRATEGIES[strategy](cands)
    # v = M a / D with M = m^T, i.e. v = sum_i a_i * row_i / D
    num = [sum(a[i] * m[i][j] for i in range(3)) for j in range(3)]
    if any(x % D for x in num):
        raise ReductionStall(f"non-integral reducing vector for {m}")
    v = tuple(x // D for x in num)
    return v, a  # type: ignore[return-value]


def _children(m: Matrix, v) -> list[Matrix]:
    r1, r2, r3 = m
    return [(v, r2, r3), (r1, v, r3), (r1, r2, v)]


@lru_cache(maxsize=200_000)
def _reduce_cached(m: Matrix, strategy: str) -> tuple[tuple[Matrix, int], ...]:
    return tuple(_reduce(m, strategy, None).items())


def _reduce(m: Matrix, strategy: str, trace: list | None, depth: int = 0) -> SymbolSum:
    out = SymbolSum()
    D = det3(m)
    if D == 0:
        return out
    if abs(D) == 1:
        out.add(_positive(m))
        return out
    v, a = reducing_vector(m, strategy)
    if trace is not None:
        trace.append({"depth": depth, "symbol": [list(r) for r in m], "det": D,
                      "v": list(v), "subdets": list(a)})
    for child, d in zip(_children(m, v), a):
        if d == 0:
            continue
        if abs(d) >= abs(D):  # pragma: no cover - excluded by construction
            raise ReductionStall(f"determinant did not drop at {m}")
        if trace is None:
            sub = dict(_reduce_cached(child, strategy))
        else:
            sub = _reduce(child, strategy, trace, depth + 1)
        for k, c in sub.items():
            out.add(k, c)
    return out


def reduce(rows: Sequence[Sequence[int]] | ModularSymbol, strategy: str = "minmax",
           trace: list | None = None) -> SymbolSum:
    """Write a symbol as a Z-combination of unimodular symbols of det +1.

    Pass a list as ``trace`` to receive one record per reduction step.
    """
    m = rows.rows if isinstance(rows, ModularSymbol) else as_matrix(rows)
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {sorted(STRATEGIES)}")
    if trace is not None:
        return _reduce(m, strategy, trace)
    return SymbolSum(dict(_reduce_cached(m, strategy)))


def unimodular_point(rows: Sequence[Sequence[int]], level: Level | int) -> tuple[int, int, int]:
    """The point of P^2(Z/N) paired with a unimodular symbol."""
    m = as_matrix(rows)
    if abs(det3(m)) != 1:
        raise NonUnimodular(f"symbol {m} has determinant {det3(m)}")
    m = _positive(m)
    N = level.N if isinstance(level, Level) else level
    return normalize(m[0][0], m[1][0], m[2][0], N)


def pairing(F: Mapping[int, Fraction], rows: Sequence[Sequence[int]] | ModularSymbol | SymbolSum,
            level: Level | int, table: PointTable | None = None, strategy: str = "minmax") -> Fraction:
    """<F, symbol> for F given sparsely by point index."""
    level = level if isinstance(level, Level) else Level(level)
    table = table or enumerate_points(level)
    s = rows if isinstance(rows, SymbolSum) else reduce(rows, strategy)
    total = Fraction(0)
    for q, c in s.points(level).items():
        total += c * F.get(table.index[q], 0)
    return total


def point_functional(rows: Sequence[Sequence[int]], level: Level | int,
                     table: PointTable | None = None, strategy: str = "minmax") -> dict[int, int]:
    """The symbol as a linear functional on functions: {point index: coefficient}."""
    level = level if isinstance(level, Level) else Level(level)
    table = table or enumerate_points(level)
    return {table.index[q]: c for q, c in reduce(rows, strategy).points(level).items()}


def clear_cache() -> None:
    _reduce_cached.cache_clear()


def pair_rational(F: Mapping[int, Fraction], rows: Iterable[Sequence[Fraction | int]],
                  level: Level | int, **kw) -> Fraction:
    """Pair with a symbol given by rational rows; each row is scaled to be integral."""
    ints = []
    for r in rows:
        fr = [Fraction(x) for x in r]
        den = 1
        for x in fr:
            den = den * x.denominator // _gcd(den, x.denominator)
        ints.append([int(x * den) for x in fr])
    return pairing(F, ints, level, **kw)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)
