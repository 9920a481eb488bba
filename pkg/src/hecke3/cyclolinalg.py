"""Exact scalars over Q(i) and exact sparse/dense linear algebra.

Rationals are :class:`fractions.Fraction`.  ``GaussRat`` adds the symbol i.
Large integer kernels go through a multi-modular path (structured
elimination, reduction mod word-size primes, rational reconstruction) and
every reconstructed vector is checked exactly before it is returned.
"""

from __future__ import annotations

import json
import math
import random
import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

Scalar = Union[int, Fraction, "GaussRat"]

_PRIMES = (1073741789, 1073741783, 1073741741, 1073741723, 1073741719,
           1073741717, 1073741689, 1073741671, 1073741663, 1073741651)


class GaussRat:
    """An element re + im*i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        if isinstance(x, str):
            return parse_gauss(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussRat")

    def __add__(self, other):
        if isinstance(other, GaussRat):
            return GaussRat(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussRat(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, GaussRat):
            return GaussRat(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return GaussRat(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GaussRat):
            return GaussRat(self.re * other.re - self.im * other.im,
                            self.re * other.im + self.im * other.re)
        if isinstance(other, (int, Fraction)):
            return GaussRat(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def inverse(self) -> "GaussRat":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("GaussRat division by zero")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("GaussRat division by zero")
            return GaussRat(self.re / other, self.im / other)
        return self * GaussRat.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = GaussRat(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, GaussRat):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussRat({format_gauss(self)!r})"

    def __str__(self):
        return format_gauss(self)


I = GaussRat(0, 1)


def format_gauss(x: Scalar) -> str:
    """Canonical ``a/b+c/d*i`` string; both parts always present."""
    x = GaussRat.coerce(x)
    sign = "-" if x.im < 0 else "+"
    return f"{x.re}{sign}{abs(x.im)}*i"


_GAUSS_RE = re.compile(r"^([+-]?\d+(?:/\d+)?)?(?:([+-])(\d+(?:/\d+)?)?\*?i)?$")


def parse_gauss(text: str) -> GaussRat:
    """Inverse of :func:`format_gauss`; also accepts ``2*i``, ``-i``, ``3``."""
    s = text.replace(" ", "").replace("sqrt(-1)", "i").replace("I", "i")
    if s.startswith(("i", "*i")) or re.fullmatch(r"[+-]?(\d+(/\d+)?)?\*?i", s):
        m = re.fullmatch(r"([+-]?)(\d+(?:/\d+)?)?\*?i", s)
        if not m:
            raise ValueError(f"bad Gaussian rational {text!r}")
        coef = Fraction(m.group(2) or 1)
        return GaussRat(0, -coef if m.group(1) == "-" else coef)
    m = _GAUSS_RE.match(s)
    if not m or not s:
        raise ValueError(f"bad Gaussian rational {text!r}")
    re_part = Fraction(m.group(1)) if m.group(1) else Fraction(0)
    im_part = Fraction(0)
    if m.group(2):
        im_part = Fraction(m.group(3)) if m.group(3) else Fraction(1)
        if m.group(2) == "-":
            im_part = -im_part
    return GaussRat(re_part, im_part)


def is_zero(x) -> bool:
    return not x


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMat:
    """Dictionary-of-keys matrix; stored entries are always nonzero."""

    def __init__(self, rows: int, cols: int, entries: Iterable[tuple[int, int, Scalar]] = ()):
        self.rows = rows
        self.cols = cols
        self.data: dict[tuple[int, int], Scalar] = {}
        for r, c, v in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
            s = self.data.get((r, c), 0) + v
            if s:
                self.data[(r, c)] = s
            else:
                self.data.pop((r, c), None)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[Scalar]]) -> "SparseMat":
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        return cls(rows, cols, ((r, c, v) for r, row in enumerate(dense)
                                for c, v in enumerate(row) if v))

    @classmethod
    def from_rows(cls, rows: Sequence[dict[int, Scalar]], cols: int) -> "SparseMat":
        return cls(len(rows), cols, ((r, c, v) for r, row in enumerate(rows) for c, v in row.items()))

    def row_dicts(self) -> list[dict[int, Scalar]]:
        out: list[dict[int, Scalar]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.data.items():
            out[r][c] = v
        return out

    def to_dense(self) -> list[list[Scalar]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.data.items():
            out[r][c] = v
        return out

    def is_rational(self) -> bool:
        return all(isinstance(v, (int, Fraction)) or (isinstance(v, GaussRat) and v.im == 0)
                   for v in self.data.values())

    def matvec(self, v: Sequence[Scalar]) -> list[Scalar]:
        out: list[Scalar] = [0] * self.rows
        for (r, c), a in self.data.items():
            if v[c]:
                out[r] = out[r] + a * v[c]
        return out

    def __len__(self):
        return len(self.data)

    def to_json(self) -> str:
        trip = [[r, c, format_scalar(v)] for (r, c), v in sorted(self.data.items())]
        return json.dumps({"rows": self.rows, "cols": self.cols, "entries": trip})

    @classmethod
    def from_json(cls, text: str) -> "SparseMat":
        obj = json.loads(text)
        return cls(obj["rows"], obj["cols"],
                   ((r, c, parse_scalar(v)) for r, c, v in obj["entries"]))


def format_scalar(v: Scalar) -> str:
    if isinstance(v, GaussRat):
        return format_gauss(v)
    return str(Fraction(v))


def parse_scalar(text: str) -> Scalar:
    if "i" in text:
        return parse_gauss(text)
    return Fraction(text)


# ---------------------------------------------------------------------------
# dense exact elimination (works over Fraction or GaussRat)


def rref(rows: list[list[Scalar]]) -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form (copy) and the ascending pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c] if not isinstance(m[r][c], GaussRat) else m[r][c].inverse()
        m[r] = [x * inv if x else x for x in m[r]]
        prow = m[r]
        nz = [j for j in range(c, ncols) if prow[j]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                row = m[i]
                for j in nz:
                    row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def _nullspace_from_rref(red: list[list[Scalar]], pivots: list[int], ncols: int, one) -> list[list[Scalar]]:
    pivset = set(pivots)
    basis = []
    for j in range(ncols):
        if j in pivset:
            continue
        v = [0 * one] * ncols
        v[j] = one
        for row, pc in zip(red, pivots):
            if row[j]:
                v[pc] = -row[j]
        basis.append(v)
    return basis


def echelonize(vectors: list[list[Scalar]]) -> list[list[Scalar]]:
    """Row-reduced echelon basis of the span, pivots ascending."""
    red, _ = rref(vectors)
    return red


def kernel(m: SparseMat | Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    """Exact basis of the right null space, in reduced echelon form.

    Rational matrices with many columns use :func:`kernel_modular`; the rest
    are eliminated directly.
    """
    if not isinstance(m, SparseMat):
        m = SparseMat.from_dense(m) if len(m) else SparseMat(0, 0)
    if m.cols == 0:
        return []
    if m.is_rational() and m.cols > 200:
        return kernel_modular(m.row_dicts(), m.cols)
    gauss = not m.is_rational()
    one = GaussRat(1) if gauss else Fraction(1)
    dense = m.to_dense()
    if gauss:
        dense = [[GaussRat.coerce(x) for x in row] for row in dense]
    if not dense:
        return [[one if i == j else 0 * one for j in range(m.cols)] for i in range(m.cols)]
    red, piv = rref(dense)
    basis = _nullspace_from_rref(red, piv, m.cols, one)
    return echelonize(basis) if basis else []


def rank(m: SparseMat | Sequence[Sequence[Scalar]]) -> int:
    if isinstance(m, SparseMat):
        m = m.to_dense()
    return len(rref([list(r) for r in m])[1]) if len(m) else 0


def eigenspace(m: Sequence[Sequence[Scalar]], lam: Scalar) -> list[list[Scalar]]:
    """Exact basis of ker(m - lam*I)."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("eigenspace needs a square matrix")
    lam_g = GaussRat.coerce(lam)
    if lam_g.im == 0 and all(not isinstance(x, GaussRat) or x.im == 0 for row in m for x in row):
        shifted = [[Fraction(_re(m[i][j])) - (lam_g.re if i == j else 0) for j in range(n)] for i in range(n)]
    else:
        shifted = [[GaussRat.coerce(m[i][j]) - (lam_g if i == j else 0) for j in range(n)] for i in range(n)]
    red, piv = rref(shifted)
    one = GaussRat(1) if isinstance(shifted[0][0], GaussRat) else Fraction(1)
    basis = _nullspace_from_rref(red, piv, n, one)
    return echelonize(basis) if basis else []


def _re(x):
    return x.re if isinstance(x, GaussRat) else x


def matmul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    bt = list(zip(*b))
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out.append([sum((x * col[k] for k, x in nz), Fraction(0)) for col in bt])
    return out


def mat_vec(a: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> list[Scalar]:
    return [sum((x * v[k] for k, x in enumerate(row) if x and v[k]), Fraction(0)) for row in a]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# characteristic polynomials


def charpoly(m: Sequence[Sequence[Scalar]]) -> list[Scalar]:
    """Monic characteristic polynomial det(x*I - m), coefficients constant-first.

    Hessenberg reduction followed by the usual determinant recurrence, so the
    cost is cubic in the dimension.
    """
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("charpoly needs a square matrix")
    gauss = any(isinstance(x, GaussRat) and x.im != 0 for row in m for x in row)
    conv = GaussRat.coerce if gauss else (lambda x: Fraction(_re(x)))
    h = [[conv(x) for x in row] for row in m]
    zero = conv(0)
    one = conv(1)
    for k in range(n - 2):
        piv = next((i for i in range(k + 1, n) if h[i][k]), None)
        if piv is None:
            continue
        if piv != k + 1:
            h[piv], h[k + 1] = h[k + 1], h[piv]
            for row in h:
                row[piv], row[k + 1] = row[k + 1], row[piv]
        inv = one / h[k + 1][k]
        for i in range(k + 2, n):
            if not h[i][k]:
                continue
            f = h[i][k] * inv
            ri, rk = h[i], h[k + 1]
            for j in range(k, n):
                if rk[j]:
                    ri[j] = ri[j] - f * rk[j]
            for row in h:
                if row[i]:
                    row[k + 1] = row[k + 1] + f * row[i]
    # p_{j}(x) = det(x I - H[:j,:j])
    polys: list[list[Scalar]] = [[one]]
    for j in range(1, n + 1):
        # (x - h[j-1][j-1]) * p_{j-1}
        prev = polys[-1]
        cur = [zero] * (j + 1)
        for d, c in enumerate(prev):
            cur[d + 1] = cur[d + 1] + c
            cur[d] = cur[d] - h[j - 1][j - 1] * c
        t = one
        for i in range(j - 1, 0, -1):
            t = t * h[i][i - 1]
            if not t:
                break
            coef = t * h[i - 1][j - 1]
            if coef:
                for d, c in enumerate(polys[i - 1]):
                    cur[d] = cur[d] - coef * c
        polys.append(cur)
    return polys[-1]


def poly_eval_matrix(coeffs: Sequence[Scalar], m: Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    n = len(m)
    out = [[Fraction(0)] * n for _ in range(n)]
    for c in reversed(coeffs):
        out = matmul(out, m)
        for i in range(n):
            out[i][i] = out[i][i] + c
    return out


def poly_eval(coeffs: Sequence[Scalar], x: Scalar) -> Scalar:
    acc: Scalar = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _log_abs(c: GaussRat) -> float:
    n = c.norm()
    return 0.5 * (math.log(n.numerator) - math.log(n.denominator))


def gaussian_integer_roots(coeffs: Sequence[Scalar], bound: int | None = None) -> list[GaussRat]:
    """Roots of the polynomial lying in Z[i].

    Candidates run over the disc given by the Fujiwara root bound (or
    ``bound`` if smaller).  After clearing denominators and factoring out
    powers of x, a root z divides the constant term, so N(z) must divide its
    norm; survivors are screened modulo a prime p = 1 mod 4 and then checked
    exactly.
    """
    cs = [GaussRat.coerce(c) for c in coeffs]
    while cs and not cs[-1]:
        cs.pop()
    if len(cs) <= 1:
        return []
    roots = []
    if not cs[0]:
        roots.append(GaussRat(0))
        while not cs[0]:
            cs.pop(0)
    n = len(cs) - 1
    if n == 0:
        return roots
    lead = cs[-1]
    # Fujiwara: |z| <= 2 max |c_{n-k}/c_n|^(1/k), the constant term halved
    logs = [_log_abs(cs[n - k] / lead) / k for k in range(1, n) if cs[n - k]]
    logs.append((_log_abs(cs[0] / lead) - math.log(2)) / n)
    B = int(2 * math.exp(max(logs))) + 2
    if bound is not None:
        B = min(B, bound)
    den = 1
    for c in cs:
        den = math.lcm(den, c.re.denominator, c.im.denominator)
    const = cs[0] * den
    const_norm = int(const.norm())
    p = 1000000009  # 1 mod 4
    ip = pow(13, (p - 1) // 4, p)  # a square root of -1 mod p (13 is a non-residue)
    assert ip * ip % p == p - 1
    cm = [(int(c.re * den) + ip * int(c.im * den)) % p for c in cs]
    for a in range(-B, B + 1):
        rest = B * B - a * a
        if rest < 0:
            continue
        r = math.isqrt(rest)
        for b in range(-r, r + 1):
            nz = a * a + b * b
            if not nz or const_norm % nz:
                continue
            x = (a + ip * b) % p
            acc = 0
            for c in reversed(cm):
                acc = (acc * x + c) % p
            if acc:
                continue
            lam = GaussRat(a, b)
            if not poly_eval(cs, lam):
                roots.append(lam)
    return roots


def poly_to_json(coeffs: Sequence[Scalar]) -> str:
    return json.dumps([format_scalar(c) for c in coeffs])


# ---------------------------------------------------------------------------
# large rational kernels


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """Wang's rational reconstruction of a mod m with |num|, den <= sqrt(m/2)."""
    a %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _qdiv(a, b):
    """a / b, staying in int when the quotient is integral."""
    if isinstance(a, int) and isinstance(b, int) and a % b == 0:
        return a // b
    q = Fraction(a) / Fraction(b)
    return q.numerator if q.denominator == 1 else q


class _WeightedUF:
    """x_i = w_i * x_root(i) over Q, with forced zeros.

    Weights stay Python ints while possible; the smallest index of each class
    is its root, so a class is represented by its first column.
    """

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.weight: list[int | Fraction] = [1] * n
        self.zero = [False] * n

    def find(self, i: int) -> tuple[int, int | Fraction]:
        parent = self.parent
        if parent[i] == i:
            return i, 1
        path = []
        while parent[i] != i:
            path.append(i)
            i = parent[i]
        root = i
        acc = 1
        for j in reversed(path):
            acc = self.weight[j] * acc
            self.weight[j] = acc
            parent[j] = root
        return root, self.weight[path[0]]

    def set_zero(self, i: int) -> bool:
        r, _ = self.find(i)
        if self.zero[r]:
            return False
        self.zero[r] = True
        return True

    def relate(self, i: int, j: int, ratio) -> bool:
        """Impose x_i = ratio * x_j.  Returns True if anything changed."""
        ri, wi = self.find(i)
        rj, wj = self.find(j)
        if ri == rj:
            if wi != ratio * wj and not self.zero[ri]:
                self.zero[ri] = True
                return True
            return False
        f = _qdiv(ratio * wj, wi)  # x_ri = f * x_rj
        zero = self.zero[ri] or self.zero[rj]
        if ri < rj:
            self.parent[rj] = ri
            self.weight[rj] = _qdiv(1, f)
            self.zero[ri] = zero
        else:
            self.parent[ri] = rj
            self.weight[ri] = f
            self.zero[rj] = zero
        return True


def _reduce_rows(rows: Sequence[dict[int, Scalar]], uf: _WeightedUF) -> list[dict[int, int | Fraction]]:
    out = []
    for row in rows:
        red: dict[int, int | Fraction] = {}
        for c, v in row.items():
            r, w = uf.find(c)
            if uf.zero[r]:
                continue
            s = red.get(r, 0) + _re(v) * w
            if s:
                red[r] = s
            else:
                red.pop(r)
        if red:
            out.append(red)
    return out


def structured_eliminate(rows: Sequence[dict[int, Scalar]], ncols: int) -> tuple[_WeightedUF, list[dict]]:
    """Absorb all one- and two-term rows into a weighted union-find.

    Repeats until no short rows remain; returns the union-find and the
    remaining rows expressed in root variables (duplicates removed).
    """
    uf = _WeightedUF(ncols)
    current = list(rows)
    longer: list[dict] = []
    while True:
        reduced = _reduce_rows(current, uf)
        changed = False
        longer = []
        for row in reduced:
            if len(row) == 1:
                (c,) = row
                changed |= uf.set_zero(c)
            elif len(row) == 2:
                (a, va), (b, vb) = row.items()
                changed |= uf.relate(a, b, _qdiv(-vb, va))
            else:
                longer.append(row)
        if not changed:
            break
        current = longer
    final = _reduce_rows(longer, uf)
    seen = set()
    uniq = []
    for row in final:
        s = row[min(row)]
        key = tuple(sorted((c, _qdiv(v, s)) for c, v in row.items()))
        if key not in seen:
            seen.add(key)
            uniq.append(row)
    return uf, uniq


def _rref_mod(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    M = M % p
    nrows, ncols = M.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        inv = pow(int(M[r, c]), p - 2, p)
        M[r] = (M[r] * inv) % p
        col = M[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            M[rows] = (M[rows] - (col[rows, None] * M[r][None, :]) % p) % p
        pivots.append(c)
        r += 1
    return M[:r], pivots


def _project(rows: list[dict], cols: list[int], p: int, rng: random.Random) -> np.ndarray:
    """Random dense projection R*A mod p with about len(cols)+16 rows."""
    colpos = {c: k for k, c in enumerate(cols)}
    n = len(cols)
    A = np.zeros((len(rows), n), dtype=np.int64)
    for i, row in enumerate(rows):
        for c, v in row.items():
            v = Fraction(v)
            A[i, colpos[c]] = v.numerator * pow(v.denominator, -1, p) % p
    if len(rows) <= n + 16:
        return A
    k = n + 16
    out = np.zeros((k, n), dtype=np.int64)
    gen = np.random.default_rng(rng.randrange(2**32))
    step = 256
    for s in range(0, len(rows), step):
        R = gen.integers(0, 2**15, size=(k, min(step, len(rows) - s)), dtype=np.int64)
        # entries of A < 2^30, of R < 2^15, block width 256: sums < 2^53
        out = (out + (R @ A[s:s + step]) % p) % p
    return out


def kernel_modular(rows: Sequence[dict[int, Scalar]], ncols: int, *, seed: int = 0,
                   max_primes: int = len(_PRIMES)) -> list[list[Fraction]]:
    """Exact kernel of a large sparse rational matrix, in reduced echelon form.

    Steps: structured elimination of short rows (exact), random projection
    and echelon form of the kernel modulo word-size primes, CRT plus rational
    reconstruction, then an exact check of every vector against the original
    rows.  A failed check moves on to more primes.

    The result is rigorous: the rank mod p never exceeds the rank over Q and
    projection only shrinks it, so the mod-p kernel dimension bounds the true
    one from above, and the returned vectors are verified members.
    """
    rng = random.Random(seed)
    uf, longrows = structured_eliminate(rows, ncols)
    live = []
    for c in range(ncols):
        r, _ = uf.find(c)
        if r == c and not uf.zero[c]:
            live.append(c)
    if not live:
        return []
    modulus = 1
    acc = None
    acc_piv: list[int] = []
    for p in _PRIMES[:max_primes]:
        A = _project(longrows, live, p, rng)
        if A.shape[0]:
            red, piv = _rref_mod(A, p)
        else:
            red, piv = np.zeros((0, len(live)), dtype=np.int64), []
        pivset = set(piv)
        free = [j for j in range(len(live)) if j not in pivset]
        if not free:
            return []
        K = np.zeros((len(free), len(live)), dtype=np.int64)
        for k, j in enumerate(free):
            K[k, j] = 1
            for r, pc in enumerate(piv):
                K[k, pc] = (-int(red[r, j])) % p
        Kred, kpiv = _rref_mod(K, p)
        if acc is not None and kpiv == acc_piv:
            inv = pow(modulus, -1, p)
            diff = (Kred.astype(object) - acc) % p
            acc = acc + modulus * ((diff * inv) % p)
            modulus *= p
        elif acc is not None and len(kpiv) > len(acc_piv):
            continue  # unlucky prime: kernel too large
        else:
            acc, acc_piv, modulus = Kred.astype(object), kpiv, p
        vecs = _try_reconstruct(acc, modulus)
        if vecs is None:
            continue
        full = [_expand(v, live, uf, ncols) for v in vecs]
        if verify_kernel(rows, full):
            return full
    raise ArithmeticError("multi-modular kernel failed to verify; increase primes")


def _try_reconstruct(acc, modulus: int) -> list[list[Fraction]] | None:
    out = []
    for row in acc:
        vec = []
        for a in row:
            a = int(a)
            if a == 0:
                vec.append(0)
                continue
            q = rational_reconstruct(a, modulus)
            if q is None:
                return None
            vec.append(q.numerator if q.denominator == 1 else q)
        out.append(vec)
    return out


def _expand(v: list, live: list[int], uf: _WeightedUF, ncols: int) -> list:
    val = dict(zip(live, v))
    out: list = [0] * ncols
    for c in range(ncols):
        r, w = uf.find(c)
        if uf.zero[r]:
            continue
        x = val.get(r)
        if x:
            out[c] = w * x
    return out


def _integral(v: Sequence) -> list[int]:
    den = 1
    for x in v:
        if isinstance(x, Fraction) and x.denominator != 1:
            den = math.lcm(den, x.denominator)
    if den == 1:
        return [int(x) for x in v]
    return [int(x * den) for x in v]


def verify_kernel(rows: Sequence[dict[int, Scalar]], vectors: Sequence[Sequence]) -> bool:
    """Exactly check ``row . v == 0`` for every row and vector.

    Vectors are cleared of denominators; when every partial sum provably fits
    in 63 bits the check runs in numpy int64, otherwise in Python integers.
    """
    if not vectors:
        return True
    ints = [_integral(v) for v in vectors]
    width = max((len(r) for r in rows), default=0)
    if width == 0:
        return True
    coef_int = all(isinstance(_re(a), int) or Fraction(_re(a)).denominator == 1
                   for r in rows for a in r.values())
    vmax = max(abs(x) for v in ints for x in v)
    cmax = max((abs(int(_re(a))) for r in rows for a in r.values()), default=0) if coef_int else 0
    if coef_int and width * cmax * vmax < 2**62:
        idx = np.zeros((len(rows), width), dtype=np.int64)
        cof = np.zeros((len(rows), width), dtype=np.int64)
        for i, r in enumerate(rows):
            for k, (c, a) in enumerate(r.items()):
                idx[i, k] = c
                cof[i, k] = int(_re(a))
        V = np.array(ints, dtype=np.int64).T  # ncols x nvec
        for s in range(0, len(rows), 8192):
            blk = (cof[s:s + 8192, :, None] * V[idx[s:s + 8192]]).sum(axis=1)
            if blk.any():
                return False
        return True
    for v in ints:
        for r in rows:
            if sum(a * v[c] for c, a in r.items() if v[c]):
                return False
    return True
