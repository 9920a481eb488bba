"""Double cosets, Hecke matrices on the model space and the eigensystem report.

Two flavours of coset equivalence are used.  The *global* one is the
arithmetic group Gamma_0(N) inside SL_3(Z): g ~ g' iff g^-1 g' is integral,
has determinant 1 and lower-left entries divisible by N.  It drives the
Hecke operators.  The *local* one is the compact open subgroup of GL_3 of
the completion at each prime of N (entries integral, determinant a unit,
(2,1) and (3,1) entries divisible by the level); it is the group in which
hand-written representative lists live.  Both are decided by canonical
lattice keys, so coset lookups are hash lookups.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Iterable, Sequence

from . import cyclolinalg as cl
from . import symreduce as sr
from .cyclolinalg import GaussRat
from .errors import AnchorNotFound, BudgetExceeded, ProbeRankDeficient
from .projspace import Level, _prime_factors, enumerate_points, lift_point
from .relspace import ModelBasis

log = logging.getLogger(__name__)

RatMatrix = tuple[tuple[Fraction, ...], ...]

DEFAULT_BUDGET = 10_000
DEFAULT_CONVENTION = "lift*rep"
CONVENTIONS = ("lift*rep", "rep*lift", "lift*rep^T", "rep^T*lift")


def parse_alpha(text: str) -> RatMatrix:
    """``"r11,r12,r13;r21,...;..."`` with rational entries (``/`` allowed)."""
    rows = [r for r in text.replace(" ", "").split(";")]
    m = tuple(tuple(Fraction(x) for x in r.split(",")) for r in rows)
    if len(m) != 3 or any(len(r) != 3 for r in m):
        raise ValueError(f"alpha must be 3x3, got {text!r}")
    return m


def rat_matrix(m: Sequence[Sequence]) -> RatMatrix:
    return tuple(tuple(Fraction(x) for x in row) for row in m)


def format_matrix(m: Sequence[Sequence]) -> str:
    return ";".join(",".join(str(Fraction(x)) for x in row) for row in m)


def mat_mul(a, b) -> RatMatrix:
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(3)), Fraction(0)) for j in range(3))
                 for i in range(3))


def mat_det(m) -> Fraction:
    return Fraction(sr.det3(m)) if all(isinstance(x, int) for r in m for x in r) else (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def mat_inv(m) -> RatMatrix:
    d = mat_det(m)
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    adj = sr.adjugate(m)
    return tuple(tuple(Fraction(adj[i][j]) / d for j in range(3)) for i in range(3))


def transpose(m) -> RatMatrix:
    return tuple(tuple(m[j][i] for j in range(3)) for i in range(3))


def _vp(x: Fraction, p: int) -> int | float:
    if x == 0:
        return math.inf
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _vp_int(n: int, p: int) -> int:
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


def in_K(g: Sequence[Sequence], level: Level | int, primes: Iterable[int] | None = None) -> bool:
    """Membership in the level-N compact open subgroup at the given primes.

    At each prime p: entries p-integral, det a p-adic unit, and the (2,1),
    (3,1) entries divisible by p^{v_p(N)}.  ``primes`` defaults to the primes
    dividing N, so conditions at other primes are ignored.
    """
    N = level.N if isinstance(level, Level) else level
    g = rat_matrix(g)
    ps = sorted(_prime_factors(N)) if primes is None else sorted(set(primes))
    d = mat_det(g)
    if d == 0:
        return False
    for p in ps:
        if any(_vp(x, p) < 0 for row in g for x in row):
            return False
        if _vp(d, p) != 0:
            return False
        e = _vp_int(N, p)
        if _vp(g[1][0], p) < e or _vp(g[2][0], p) < e:
            return False
    return True


def in_gamma0(g: Sequence[Sequence], level: Level | int) -> bool:
    """Membership in Gamma_0(N) inside SL_3(Z)."""
    N = level.N if isinstance(level, Level) else level
    g = rat_matrix(g)
    if any(x.denominator != 1 for row in g for x in row):
        return False
    if mat_det(g) != 1:
        return False
    return g[1][0] % N == 0 and g[2][0] % N == 0


# ---------------------------------------------------------------------------
# lattice keys


def _hnf_columns(cols: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    """Canonical Hermite normal form of the Z-span of integer column vectors in Z^3.

    Returns a lower-triangular basis (as rows of the transposed form) that is
    unique for the lattice; the lattice must have full rank.
    """
    vecs = [list(c) for c in cols if any(c)]
    basis = []
    for i in range(3):
        # gcd-combine all vectors on coordinate i
        piv = None
        rest = []
        for v in vecs:
            if v[i] == 0:
                rest.append(v)
                continue
            if piv is None:
                piv = v
                continue
            a, b = piv[i], v[i]
            g, s, t = _xgcd(a, b)
            new_piv = [s * x + t * y for x, y in zip(piv, v)]
            other = [(b // g) * x - (a // g) * y for x, y in zip(piv, v)]
            piv = new_piv
            if any(other):
                rest.append(other)
        if piv is None:
            raise ValueError("lattice is not of full rank")
        if piv[i] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
        vecs = rest
    # reduce above-diagonal entries: basis[i] has zeros before i
    for i in range(3):
        for j in range(i):
            q = basis[j][i] // basis[i][i]
            if q:
                basis[j] = [x - q * y for x, y in zip(basis[j], basis[i])]
    return tuple(tuple(v) for v in basis)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def global_key(g: Sequence[Sequence], level: Level | int) -> tuple:
    """Key with global_key(g) == global_key(h) iff g Gamma_0(N) = h Gamma_0(N)."""
    N = level.N if isinstance(level, Level) else level
    g = rat_matrix(g)
    L = tuple(tuple(g[i][j] * (1 if j == 0 else N) for j in range(3)) for i in range(3))
    return (mat_det(g), _canon(g), _canon(L))


def _canon(m: RatMatrix) -> tuple:
    den = 1
    for row in m:
        for x in row:
            den = math.lcm(den, x.denominator)
    cols = [[int(m[i][j] * den) for i in range(3)] for j in range(3)]
    h = _hnf_columns(cols)
    return tuple(tuple(Fraction(x, den) for x in v) for v in h)


def local_key(g: Sequence[Sequence], level: Level | int, primes: Iterable[int] | None = None) -> tuple:
    """Key with local_key(g) == local_key(h) iff g K = h K at the given primes."""
    N = level.N if isinstance(level, Level) else level
    g = rat_matrix(g)
    ps = sorted(_prime_factors(N)) if primes is None else sorted(set(primes))
    parts = []
    for p in ps:
        s = max(0, -min(_vp(x, p) for row in g for x in row if x))
        scale = Fraction(p) ** s
        e = _vp_int(N, p)
        d = mat_det(g) * scale**3
        E = int(_vp(d, p)) + 2 * e + 1
        mod = p**E
        G = [[_mod_rat(g[i][j] * scale, mod) for j in range(3)] for i in range(3)]
        GL = [[G[i][j] * (1 if j == 0 else p**e) % mod for j in range(3)] for i in range(3)]
        keys = []
        for M in (G, GL):
            cols = [[M[i][j] for i in range(3)] for j in range(3)]
            cols += [[mod if i == j else 0 for i in range(3)] for j in range(3)]
            keys.append(_hnf_columns(cols))
        parts.append((p, s, keys[0], keys[1]))
    return tuple(parts)


def _mod_rat(x: Fraction, mod: int) -> int:
    return x.numerator * pow(x.denominator, -1, mod) % mod


# ---------------------------------------------------------------------------
# generators


def _unit_block(u: int, N: int, pos: tuple[int, int]) -> RatMatrix:
    d = pow(u, -1, N) if N > 1 else 1
    i, j = pos
    m = [[Fraction(int(a == b)) for b in range(3)] for a in range(3)]
    m[i][i], m[i][j], m[j][i], m[j][j] = Fraction(u), Fraction(1), Fraction(u * d - 1), Fraction(d)
    return rat_matrix(m)


def _elem(i: int, j: int, x: int) -> RatMatrix:
    m = [[Fraction(int(a == b)) for b in range(3)] for a in range(3)]
    m[i][j] = Fraction(x)
    return rat_matrix(m)


def gamma0_generators(level: Level | int) -> list[RatMatrix]:
    """Elements of Gamma_0(N) whose closure orbit is the full group orbit."""
    N = level.N if isinstance(level, Level) else level
    gens = [_elem(0, 1, 1), _elem(0, 2, 1), _elem(1, 2, 1), _elem(2, 1, 1),
            _elem(1, 0, N), _elem(2, 0, N),
            rat_matrix([[-1, 0, 0], [0, -1, 0], [0, 0, 1]]),
            rat_matrix([[1, 0, 0], [0, 0, -1], [0, 1, 0]])]
    if N > 2:
        units = [u for u in (N - 1, 3, 5, 7, 11, 13) if math.gcd(u, N) == 1 and u < N]
        for u in units:
            gens.append(_unit_block(u, N, (0, 1)))
            gens.append(_unit_block(u, N, (0, 2)))
    return gens


def local_generators(level: Level | int) -> list[RatMatrix]:
    """Topological generators of the local level-N group at primes of N."""
    N = level.N if isinstance(level, Level) else level
    gens = [_elem(0, 1, 1), _elem(0, 2, 1), _elem(1, 2, 1), _elem(2, 1, 1),
            _elem(1, 0, N), _elem(2, 0, N)]
    units = {-1}
    for p in _prime_factors(N):
        units.add(5 if p == 2 else _primitive_root_sq(p))
    for u in sorted(units):
        for k in range(3):
            m = [[Fraction(int(a == b)) for b in range(3)] for a in range(3)]
            m[k][k] = Fraction(u)
            gens.append(rat_matrix(m))
    return gens


def _primitive_root_sq(p: int) -> int:
    """A primitive root modulo p^2; it generates Z_p^x topologically."""
    order = p * (p - 1)
    factors = _prime_factors(order)
    return next(g for g in range(2, p * p) if g % p
                and all(pow(g, order // q, p * p) != 1 for q in factors))


# ---------------------------------------------------------------------------
# decompositions


@dataclass
class CosetDecomposition:
    alpha: RatMatrix
    level: Level
    reps: list[RatMatrix]
    verified: bool = False
    local: bool = False

    def __len__(self) -> int:
        return len(self.reps)

    def to_json(self) -> str:
        return json.dumps({"alpha": format_matrix(self.alpha), "level": self.level.N,
                           "count": len(self.reps), "verified": self.verified,
                           "local": self.local,
                           "reps": [format_matrix(r) for r in self.reps]}, indent=1)


def _key(g, level: Level, local: bool):
    return local_key(g, level) if local else global_key(g, level)


def enumerate_decomposition(alpha: Sequence[Sequence], level: Level | int, *, local: bool = False,
                            budget: int = DEFAULT_BUDGET) -> CosetDecomposition:
    """Closure search for the left cosets g Gamma in Gamma alpha Gamma.

    Starts from alpha and left-multiplies by generators until no new coset
    appears.  ``local=True`` uses the local group at the primes of N.
    """
    level = level if isinstance(level, Level) else Level(level)
    alpha = rat_matrix(alpha)
    if mat_det(alpha) == 0:
        raise ValueError("alpha must be invertible")
    gens = local_generators(level) if local else gamma0_generators(level)
    reps = [alpha]
    seen = {_key(alpha, level, local)}
    i = 0
    while i < len(reps):
        g = reps[i]
        i += 1
        for s in gens:
            h = mat_mul(s, g)
            k = _key(h, level, local)
            if k not in seen:
                seen.add(k)
                reps.append(h)
                if len(reps) > budget:
                    raise BudgetExceeded(f"more than {budget} cosets for alpha={format_matrix(alpha)}")
    dec = CosetDecomposition(alpha, level, reps, local=local)
    dec.verified = verify_decomposition(dec, gens)
    return dec


def verify_decomposition(dec: CosetDecomposition, generators: Sequence[Sequence[Sequence]] | None = None) -> bool:
    """(a) reps pairwise inequivalent, (b) closed under the generators,
    (c) alpha lies in one of the cosets.
    """
    level = dec.level
    if generators is None:
        generators = local_generators(level) if dec.local else gamma0_generators(level)
    keys = [_key(g, level, dec.local) for g in dec.reps]
    keyset = set(keys)
    if len(keyset) != len(keys):
        return False
    for g in dec.reps:
        for s in generators:
            if _key(mat_mul(rat_matrix(s), g), level, dec.local) not in keyset:
                return False
    return _key(dec.alpha, level, dec.local) in keyset


def pairwise_inequivalent(reps: Sequence[Sequence[Sequence]], level: Level | int) -> bool:
    """Direct check that g_i^-1 g_j lies outside the local group for i != j."""
    reps = [rat_matrix(r) for r in reps]
    invs = [mat_inv(r) for r in reps]
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if in_K(mat_mul(invs[i], reps[j]), level):
                return False
    return True


# representative lists written out by hand for level 128

def reps_diag221() -> list[RatMatrix]:
    out = [rat_matrix([[2, 0, i], [0, 2, j], [0, 0, 1]]) for i in (0, 1) for j in (0, 1)]
    out += [rat_matrix([[2, i, 0], [0, 1, 0], [0, 0, 2]]) for i in (0, 1)]
    return out


def reps_diag211() -> list[RatMatrix]:
    return [rat_matrix([[2, j, k], [0, 1, 0], [0, 0, 1]]) for j in (0, 1) for k in (0, 1)]


def reps_lower64() -> list[RatMatrix]:
    return [rat_matrix([[1, 0, 0], [64 * a, 1, 0], [64 * b, 0, 1]]) for a, b in ((1, 0), (0, 1), (1, 1))]


def reps_sl2_mod4() -> list[RatMatrix]:
    rng = (-1, 0, 1, 2)
    return [rat_matrix([[4, u, -s], [128 * r, 4, 0], [128 * t, 0, 4]])
            for r in rng for s in rng for t in rng for u in rng if (r * u - s * t) % 4 == 1]


def reps_sl2_mod8() -> list[RatMatrix]:
    rng = range(8)
    return [rat_matrix([[8, u, -s], [128 * r, 8, 0], [128 * t, 0, 8]])
            for r in rng for s in rng for t in rng for u in rng if (r * u - s * t) % 8 == 1]


def reps_atkin_lehner() -> list[RatMatrix]:
    out = [rat_matrix([[0, 1, 0], [-128, 0, i], [0, 0, 1]]) for i in range(128)]
    out += [rat_matrix([[0, 1, 0], [0, 0, 1], [-128, 0, 2 * i]]) for i in range(64)]
    return out


# ---------------------------------------------------------------------------
# Hecke matrices


def _int_rows(m: RatMatrix) -> list[list[int]]:
    # scale each row to a primitive integer row (symbols are projective in rows)
    out = []
    for row in m:
        den = 1
        for x in row:
            den = math.lcm(den, x.denominator)
        ints = [int(x * den) for x in row]
        g = 0
        for x in ints:
            g = math.gcd(g, x)
        out.append([x // g for x in ints] if g else ints)
    return out


def _symbol(lift: Sequence[Sequence[int]], rep: RatMatrix, convention: str) -> list[list[int]]:
    U = rat_matrix(lift)
    if convention == "lift*rep":
        m = mat_mul(U, rep)
    elif convention == "rep*lift":
        m = mat_mul(rep, U)
    elif convention == "lift*rep^T":
        m = mat_mul(U, transpose(rep))
    elif convention == "rep^T*lift":
        m = mat_mul(transpose(rep), U)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return _int_rows(m)


def hecke_functional(q_index: int, dec: CosetDecomposition, *, convention: str = DEFAULT_CONVENTION,
                     strategy: str = "minmax") -> dict[int, int]:
    """(T f)(Q) as a linear functional of f: {point index: coefficient}."""
    level = dec.level
    table = enumerate_points(level)
    U = lift_point(table.points[q_index], level)
    out: dict[int, int] = {}
    for g in dec.reps:
        for j, c in sr.point_functional(_symbol(U, g, convention), level, table, strategy).items():
            s = out.get(j, 0) + c
            if s:
                out[j] = s
            else:
                out.pop(j)
    return out


def apply_hecke(f: dict[int, Fraction], dec: CosetDecomposition, points: Iterable[int] | None = None,
                **kw) -> dict[int, Fraction]:
    """T f evaluated at the given point indices (all points by default)."""
    table = enumerate_points(dec.level)
    idx = range(len(table)) if points is None else points
    out = {}
    for q in idx:
        val = sum((c * f.get(j, 0) for j, c in hecke_functional(q, dec, **kw).items()), Fraction(0))
        if val:
            out[q] = val
    return out


def _functionals(points: list[int], dec: CosetDecomposition, convention: str, strategy: str,
                 workers: int) -> dict[int, dict[int, int]]:
    # results are keyed by point, so the outcome does not depend on scheduling
    if workers <= 1 or len(points) < 2:
        return {q: hecke_functional(q, dec, convention=convention, strategy=strategy) for q in points}
    fn = partial(hecke_functional, dec=dec, convention=convention, strategy=strategy)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return dict(zip(points, pool.map(fn, points, chunksize=max(1, len(points) // (4 * workers)))))


def _verification_probes(basis: ModelBasis, count: int) -> list[int]:
    pivset = set(basis.pivots)
    support = sorted({j for v in basis.vectors for j in v if j not in pivset})
    if not support:
        return []
    step = max(1, len(support) // count)
    return support[::step][:count]


@dataclass
class HeckeMatrix:
    alpha: RatMatrix
    matrix: list[list[Fraction]]
    convention: str
    probes_checked: int = 0
    cosets: int = 0

    def to_json(self) -> str:
        return json.dumps({"alpha": format_matrix(self.alpha), "convention": self.convention,
                           "dim": len(self.matrix), "cosets": self.cosets,
                           "probes_checked": self.probes_checked,
                           "matrix": [[str(x) for x in row] for row in self.matrix]}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "HeckeMatrix":
        d = json.loads(text)
        return cls(parse_alpha(d["alpha"]), [[Fraction(x) for x in row] for row in d["matrix"]],
                   d["convention"], d.get("probes_checked", 0), d.get("cosets", 0))


def hecke_matrix(alpha: Sequence[Sequence] | CosetDecomposition, basis: ModelBasis, *,
                 convention: str = DEFAULT_CONVENTION, extra_probes: int = 20,
                 strategy: str = "minmax", workers: int = 1) -> HeckeMatrix:
    """Matrix of T_alpha on the basis: column k holds the coordinates of T f_k.

    Basis coordinates are values at the pivot points, so those are the
    probes.  Extra probes off the pivots check that each T f_k really is the
    predicted combination of basis vectors.
    """
    dec = alpha if isinstance(alpha, CosetDecomposition) else enumerate_decomposition(alpha, basis.level)
    if not dec.verified or dec.local:
        raise ValueError("hecke_matrix needs a verified global decomposition")
    n = basis.dim
    if len(set(basis.pivots)) != n:
        raise ProbeRankDeficient("pivot probes are not distinct")
    probes = _verification_probes(basis, extra_probes)
    phis = _functionals(list(basis.pivots) + probes, dec, convention, strategy, workers)
    M = [[Fraction(0)] * n for _ in range(n)]
    for l, q in enumerate(basis.pivots):
        phi = phis[q]
        for k in range(n):
            vec = basis.vectors[k]
            M[l][k] = sum((c * vec.get(j, 0) for j, c in phi.items()), Fraction(0))
    for q in probes:
        phi = phis[q]
        for k in range(n):
            vec = basis.vectors[k]
            direct = sum((c * vec.get(j, 0) for j, c in phi.items()), Fraction(0))
            predicted = sum((M[l][k] * basis.value(l, q) for l in range(n)), Fraction(0))
            if direct != predicted:
                raise ProbeRankDeficient(
                    f"T f_{k} disagrees with its pivot reconstruction at point {q}; "
                    f"the action convention {convention!r} does not preserve the model space")
    return HeckeMatrix(dec.alpha, M, convention, len(probes), len(dec))


def calibrate_convention(basis: ModelBasis, anchor_alpha=((3, 0, 0), (0, 1, 0), (0, 0, 1)),
                         anchor_values=(GaussRat(1, 2), GaussRat(1, -2))) -> dict[str, str]:
    """Try each action convention on the anchor operator; report what happened."""
    report = {}
    for conv in CONVENTIONS:
        try:
            hm = hecke_matrix(anchor_alpha, basis, convention=conv)
        except ProbeRankDeficient as exc:
            report[conv] = f"not stable: {exc}"
            continue
        poly = cl.charpoly(hm.matrix)
        hits = [str(v) for v in anchor_values if not cl.poly_eval(poly, v)]
        report[conv] = "anchor eigenvalue " + ",".join(hits) if hits else "stable, anchor absent"
    return report


# ---------------------------------------------------------------------------
# eigenreport


LEVEL128_OPERATORS: dict[str, RatMatrix] = {
    "diag(2,2,1)": rat_matrix([[2, 0, 0], [0, 2, 0], [0, 0, 1]]),
    "diag(2,1,1)": rat_matrix([[2, 0, 0], [0, 1, 0], [0, 0, 1]]),
    "lower(64)": rat_matrix([[1, 0, 0], [64, 1, 0], [0, 0, 1]]),
    "(36,1;128,4;;4)": rat_matrix([[36, 1, 0], [128, 4, 0], [0, 0, 4]]),
    "(8,1;128,8;;8)": rat_matrix([[8, 1, 0], [128, 8, 0], [0, 0, 8]]),
    "(0,1;-128,0;;1)": rat_matrix([[0, 1, 0], [-128, 0, 0], [0, 0, 1]]),
    "central(2)": rat_matrix([[2, 0, 0], [0, 2, 0], [0, 0, 2]]),
}

EXPECTED_EIGENVALUES: dict[str, GaussRat] = {
    "diag(2,2,1)": GaussRat(0, 2),
    "diag(2,1,1)": GaussRat(0),
    "lower(64)": GaussRat(-1),
    "(36,1;128,4;;4)": GaussRat(8),
    "(8,1;128,8;;8)": GaussRat(32),
    "(0,1;-128,0;;1)": GaussRat(8, -8),
    "central(2)": GaussRat(1),
}

ANCHOR_ALPHA = rat_matrix([[3, 0, 0], [0, 1, 0], [0, 0, 1]])


@dataclass
class EigenReport:
    level: Level
    anchor: tuple[RatMatrix, GaussRat]
    eigenvector: list[GaussRat] = field(repr=False)
    lines: list[tuple[str, RatMatrix, GaussRat]]
    coset_counts: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({
            "level": self.level.N,
            "anchor": {"alpha": format_matrix(self.anchor[0]), "eigenvalue": cl.format_gauss(self.anchor[1])},
            "lines": [{"name": n, "alpha": format_matrix(a), "eigenvalue": cl.format_gauss(v),
                       "cosets": self.coset_counts.get(n)} for n, a, v in self.lines],
        }, indent=1)

    def table(self) -> str:
        width = max(len(n) for n, _, _ in self.lines)
        rows = [f"{'anchor diag(3,1,1)'.ljust(width)}  {cl.format_gauss(self.anchor[1])}"]
        rows += [f"{n.ljust(width)}  {cl.format_gauss(v)}" for n, _, v in self.lines]
        return "\n".join(rows)


def anchor_eigenvector(T: Sequence[Sequence[Fraction]],
                       candidates=(GaussRat(1, 2), GaussRat(1, -2))) -> tuple[GaussRat, list[GaussRat]]:
    """The first candidate eigenvalue with a 1-dimensional eigenspace, and its vector."""
    for lam in candidates:
        space = cl.eigenspace(T, lam)
        if len(space) == 1:
            return lam, [GaussRat.coerce(x) for x in space[0]]
    raise AnchorNotFound("no candidate anchor eigenvalue has a 1-dimensional eigenspace")


def eigenvalue_on(T: Sequence[Sequence[Fraction]], v: Sequence[GaussRat]) -> GaussRat:
    """lambda with T v = lambda v, checked exactly; raises ValueError otherwise."""
    Tv = [sum((GaussRat.coerce(x) * v[k] for k, x in enumerate(row) if x), GaussRat(0)) for row in T]
    j = next(i for i, x in enumerate(v) if x)
    lam = Tv[j] / v[j]
    if any(Tv[i] != lam * v[i] for i in range(len(v))):
        raise ValueError("vector is not an eigenvector of this operator")
    return lam


def eigenreport(basis: ModelBasis, operators: dict[str, RatMatrix] | None = None, *,
                convention: str = DEFAULT_CONVENTION, workers: int = 1,
                compute: Callable[[RatMatrix], HeckeMatrix] | None = None) -> EigenReport:
    """Anchor on the diag(3,1,1) eigenvector and read off each operator's eigenvalue.

    ``compute`` maps alpha to its HeckeMatrix; it lets callers add caching.
    """
    operators = LEVEL128_OPERATORS if operators is None else operators
    if compute is None:
        def compute(alpha):
            return hecke_matrix(alpha, basis, convention=convention, workers=workers)
    T3 = compute(ANCHOR_ALPHA).matrix
    lam, v = anchor_eigenvector(T3)
    lines = []
    counts = {}
    for name, alpha in operators.items():
        hm = compute(alpha)
        counts[name] = hm.cosets
        lines.append((name, alpha, eigenvalue_on(hm.matrix, v)))
    return EigenReport(basis.level, (ANCHOR_ALPHA, lam), v, lines, counts)
