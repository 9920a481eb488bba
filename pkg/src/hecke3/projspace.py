"""The finite projective plane P^2(Z/N) and lifts of its points to SL_3(Z).

A point is a unimodular triple modulo ``N`` taken up to multiplication by
units.  Each point is stored in canonical form: the lexicographically
smallest triple among its unit multiples.  The first-column map identifies
``SL_3(Z)/Gamma_0(N)`` with this set.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple

from .errors import NonUnimodular

FORMAT_VERSION = 1


@dataclass(frozen=True)
class Level:
    N: int

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ValueError(f"level must be a positive integer, got {self.N!r}")

    @cached_property
    def units(self) -> tuple[int, ...]:
        if self.N == 1:
            return (0,)
        return tuple(u for u in range(1, self.N) if math.gcd(u, self.N) == 1)

    @cached_property
    def prime_factors(self) -> tuple[int, ...]:
        return tuple(sorted(_prime_factors(self.N)))

    def expected_size(self) -> int:
        """N^2 * prod_{p | N} (1 + 1/p + 1/p^2), computed in integers."""
        size = self.N**2
        for p in self.prime_factors:
            size = size // (p * p) * (p * p + p + 1)
        return size


class ProjPoint(NamedTuple):
    x: int
    y: int
    z: int


def _prime_factors(n: int) -> set[int]:
    out, d = set(), 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


class _Normalizer:
    # For each residue x, the units u minimising u*x mod N; the canonical
    # form is then the minimum over that (usually tiny) set.
    def __init__(self, N: int):
        self.N = N
        units = Level(N).units
        first = []
        for x in range(N):
            best = min(u * x % N for u in units)
            first.append(tuple(u for u in units if u * x % N == best))
        self.first = first
        self.cache: dict[tuple[int, int, int], ProjPoint] = {}

    def __call__(self, x: int, y: int, z: int) -> ProjPoint:
        N = self.N
        key = (x % N, y % N, z % N)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        x, y, z = key
        if math.gcd(math.gcd(x, y), math.gcd(z, N)) != 1:
            raise NonUnimodular(f"({x}, {y}, {z}) is not unimodular mod {N}")
        cands = self.first[x]
        if len(cands) == 1:
            u = cands[0]
            point = ProjPoint(u * x % N, u * y % N, u * z % N)
        else:
            point = min(ProjPoint(u * x % N, u * y % N, u * z % N) for u in cands)
        if len(self.cache) < 4_000_000:
            self.cache[key] = point
        return point


_NORMALIZERS: dict[int, _Normalizer] = {}


def _normalizer(N: int) -> _Normalizer:
    norm = _NORMALIZERS.get(N)
    if norm is None:
        norm = _NORMALIZERS[N] = _Normalizer(N)
    return norm


def normalize(x: int, y: int, z: int, level: Level | int) -> ProjPoint:
    """Canonical representative of ``(x:y:z)`` modulo ``N``.

    >>> normalize(3, 5, 7, 8)
    ProjPoint(x=1, y=7, z=5)
    """
    N = level.N if isinstance(level, Level) else level
    if N == 1:
        return ProjPoint(0, 0, 0)
    return _normalizer(N)(x, y, z)


@dataclass(frozen=True)
class PointTable:
    level: Level
    points: tuple[ProjPoint, ...]
    index: dict[ProjPoint, int] = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[ProjPoint]:
        return iter(self.points)

    def index_of(self, x: int, y: int, z: int) -> int:
        """Ordinal of the point ``(x:y:z)``; coordinates may be unreduced."""
        return self.index[normalize(x, y, z, self.level)]

    def dumps(self) -> str:
        header = {"format": "hecke3.pointtable", "version": FORMAT_VERSION,
                  "level": self.level.N, "count": len(self.points)}
        buf = io.StringIO()
        buf.write(json.dumps(header, sort_keys=True) + "\n")
        for p in self.points:
            buf.write(f"{p.x},{p.y},{p.z}\n")
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str) -> "PointTable":
        lines = text.splitlines()
        header = json.loads(lines[0])
        if header.get("format") != "hecke3.pointtable" or header.get("version") != FORMAT_VERSION:
            raise ValueError("not a version-%d point table" % FORMAT_VERSION)
        level = Level(int(header["level"]))
        pts = tuple(ProjPoint(*map(int, ln.split(","))) for ln in lines[1:] if ln)
        if len(pts) != header["count"]:
            raise ValueError("point count does not match header")
        for p in pts:
            if normalize(*p, level) != p:
                raise ValueError(f"{p} is not canonical")
        return cls(level, pts, {p: i for i, p in enumerate(pts)})


_TABLES: dict[int, PointTable] = {}


def enumerate_points(level: Level | int) -> PointTable:
    """All canonical points of P^2(Z/N), sorted lexicographically."""
    level = level if isinstance(level, Level) else Level(level)
    N = level.N
    table = _TABLES.get(N)
    if table is not None:
        return table
    if N == 1:
        pts = [ProjPoint(0, 0, 0)]
    else:
        # A canonical first coordinate is 0 or a proper divisor of N.
        firsts = [0] + [d for d in range(1, N) if N % d == 0]
        pts = []
        for x in firsts:
            for y in range(N):
                gxy = math.gcd(math.gcd(x, y), N)
                for z in range(N):
                    if math.gcd(gxy, z) != 1:
                        continue
                    if normalize(x, y, z, N) == (x, y, z):
                        pts.append(ProjPoint(x, y, z))
        pts.sort()
    table = PointTable(level, tuple(pts), {p: i for i, p in enumerate(pts)})
    assert len(table) == level.expected_size()
    _TABLES[N] = table
    return table


def primitive_lift(q: ProjPoint | tuple[int, int, int], N: int) -> tuple[int, int, int]:
    """An integer vector with gcd 1 that reduces to ``q`` modulo ``N``."""
    x, y, z = q
    if N == 1:
        return (1, 0, 0)
    if math.gcd(math.gcd(x, y), math.gcd(z, N)) != 1:
        raise NonUnimodular(f"{tuple(q)} is not unimodular mod {N}")
    g = math.gcd(x, y)
    if g == 0:
        # gcd(z, N) = 1 here
        return (N, 0, z) if z != 1 else (0, 0, 1)
    k = 0
    while math.gcd(g, z + k * N) != 1:
        k += 1
    return (x, y, z + k * N)


def complete_to_sl3(v: tuple[int, int, int]) -> list[list[int]]:
    """A matrix in SL_3(Z) whose first column is the primitive vector ``v``."""
    a, b, c = v
    g, s, t = _xgcd(a, b)
    if g == 0:
        if c == 1:
            return [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
        if c == -1:
            return [[0, -1, 0], [0, 0, 1], [-1, 0, 0]]
        raise NonUnimodular(f"{v} is not primitive")
    h, p, q = _xgcd(g, c)
    if h != 1:
        raise NonUnimodular(f"{v} is not primitive")
    # A maps (g, 0, c) to (a, b, c); M2 has first column (g, 0, c), det g*p + c*q.
    A = [[a // g, -t, 0], [b // g, s, 0], [0, 0, 1]]
    M2 = [[g, 0, -q], [0, 1, 0], [c, 0, p]]
    return [[sum(A[i][k] * M2[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def lift_point(q: ProjPoint | tuple[int, int, int], level: Level | int) -> list[list[int]]:
    """U in SL_3(Z) whose first column is congruent to a unit multiple of ``q``."""
    N = level.N if isinstance(level, Level) else level
    return complete_to_sl3(primitive_lift(q, N))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with a*s + b*t = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0
