"""The model space: functions on P^2(Z/N) satisfying the three relations.

For every point (x:y:z) a function ``f`` in the model space satisfies

* ``f(x:y:z) + f(-y:x:z) = 0``
* ``f(x:y:z) - f(z:x:y) = 0``
* ``f(x:y:z) + f(-y:x-y:z) + f(y-x:-x:z) = 0``

and the space is isomorphic to H^3(Gamma_0(N); C).  Functions are stored
sparsely as ``{point index: Fraction}``.
"""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import cyclolinalg as cl
from .errors import CacheCorrupt, NonUnimodular
from .projspace import Level, PointTable, enumerate_points

BASIS_FORMAT = "hecke3.modelbasis"
FORMAT_VERSION = 1

Vector = dict[int, Fraction]


def relation_points(x: int, y: int, z: int) -> tuple[tuple[tuple[int, int, int], ...], ...]:
    """The unreduced arguments of the three relations at (x:y:z), with signs."""
    return (
        ((x, y, z), (-y, x, z)),
        ((x, y, z), (z, x, y)),
        ((x, y, z), (-y, x - y, z), (y - x, -x, z)),
    )


_SIGNS = ((1, 1), (1, -1), (1, 1, 1))


def build_relations(level: Level | int, table: PointTable | None = None) -> cl.SparseMat:
    """Relation matrix with 3n rows, ordered by (point, family), over n columns."""
    level = level if isinstance(level, Level) else Level(level)
    table = table or enumerate_points(level)
    rows: list[dict[int, int]] = []
    for p in table.points:
        for args, signs in zip(relation_points(*p), _SIGNS):
            row: dict[int, int] = {}
            for arg, s in zip(args, signs):
                try:
                    j = table.index_of(*arg)
                except NonUnimodular as exc:  # pragma: no cover - the relations preserve unimodularity
                    raise AssertionError(f"relation at {p} produced {arg}") from exc
                row[j] = row.get(j, 0) + s
            rows.append({j: v for j, v in row.items() if v})
    return cl.SparseMat.from_rows(rows, len(table))


@dataclass
class ModelBasis:
    """Exact basis of the model space in reduced echelon form."""

    level: Level
    table: PointTable = field(repr=False)
    vectors: list[Vector] = field(repr=False)
    pivots: list[int]

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def dense(self, k: int) -> list[Fraction]:
        out = [Fraction(0)] * len(self.table)
        for j, v in self.vectors[k].items():
            out[j] = v
        return out

    def value(self, k: int, point_index: int) -> Fraction:
        return self.vectors[k].get(point_index, Fraction(0))

    def coordinates(self, f: Mapping[int, Fraction] | Sequence[Fraction]) -> list[Fraction]:
        """Coordinates of a model-space element: its values at the pivots."""
        get = f.get if isinstance(f, Mapping) else (lambda j, d=0: f[j])
        return [Fraction(get(p, 0)) for p in self.pivots]

    def combine(self, coords: Sequence[Fraction]) -> Vector:
        out: Vector = {}
        for c, vec in zip(coords, self.vectors):
            if not c:
                continue
            for j, v in vec.items():
                s = out.get(j, 0) + c * v
                if s:
                    out[j] = s
                else:
                    out.pop(j, None)
        return out

    # serialization ---------------------------------------------------------

    def dumps(self) -> str:
        buf = io.StringIO()
        for k, vec in enumerate(self.vectors):
            for j in sorted(vec):
                buf.write(f"{k},{j},{vec[j]}\n")
        body = buf.getvalue()
        header = {"format": BASIS_FORMAT, "version": FORMAT_VERSION, "level": self.level.N,
                  "points": len(self.table), "dim": self.dim, "pivots": self.pivots,
                  "sha256": hashlib.sha256(body.encode()).hexdigest()}
        return json.dumps(header, sort_keys=True) + "\n" + body

    @classmethod
    def loads(cls, text: str, *, verify: bool = True) -> "ModelBasis":
        head, _, body = text.partition("\n")
        header = json.loads(head)
        if header.get("format") != BASIS_FORMAT or header.get("version") != FORMAT_VERSION:
            raise ValueError("not a version-%d model basis" % FORMAT_VERSION)
        if hashlib.sha256(body.encode()).hexdigest() != header["sha256"]:
            raise CacheCorrupt("model basis content hash mismatch")
        level = Level(int(header["level"]))
        table = enumerate_points(level)
        if len(table) != header["points"]:
            raise ValueError("point count does not match this level")
        vectors: list[Vector] = [dict() for _ in range(header["dim"])]
        for line in body.splitlines():
            if line:
                k, j, v = line.split(",")
                vectors[int(k)][int(j)] = Fraction(v)
        basis = cls(level, table, vectors, list(header["pivots"]))
        if verify:
            for k in range(basis.dim):
                if not check_membership(basis.vectors[k], level):
                    raise CacheCorrupt(f"basis vector {k} violates the relations")
        return basis


def _pivots(vectors: Sequence[Vector]) -> list[int]:
    return [min(v) for v in vectors]


def solve_model(level: Level | int, *, seed: int = 0) -> ModelBasis:
    """Exact basis of the model space at level N."""
    level = level if isinstance(level, Level) else Level(level)
    table = enumerate_points(level)
    rel = build_relations(level, table)
    dense_vecs = cl.kernel_modular(rel.row_dicts(), rel.cols, seed=seed) if rel.cols > 200 else cl.kernel(rel)
    vectors = [{j: Fraction(v) for j, v in enumerate(vec) if v} for vec in dense_vecs]
    return ModelBasis(level, table, vectors, _pivots(vectors))


def check_membership(f: Mapping[int, Fraction] | Sequence[Fraction], level: Level | int) -> bool:
    """Whether ``f`` (sparse by point index or dense) satisfies every relation."""
    level = level if isinstance(level, Level) else Level(level)
    table = enumerate_points(level)
    get = f.get if isinstance(f, Mapping) else (lambda j, d=0: f[j])
    for p in table.points:
        for args, signs in zip(relation_points(*p), _SIGNS):
            if sum(s * get(table.index_of(*a), 0) for a, s in zip(args, signs)):
                return False
    return True


def evaluate(f: Mapping[int, Fraction], table: PointTable, x: int, y: int, z: int) -> Fraction:
    return f.get(table.index_of(x, y, z), Fraction(0))
