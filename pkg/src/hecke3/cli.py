"""Command-line front end: basis, cosets, hecke, reduce, eigenreport and verify.

Artifacts are cached under ``$HECKE3_CACHE`` (default ``~/.cache/hecke3``).
Each cache file is a JSON header line holding the tool version and a
SHA-256 of the payload, followed by the payload.  A file whose hash or
version does not match is discarded and recomputed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from . import cyclolinalg as cl
from . import heckeops as ho
from . import projspace as ps
from . import relspace as rs
from . import repaudit as ra
from . import symreduce as sr
from .errors import CacheCorrupt, Hecke3Error

log = logging.getLogger("hecke3")

CACHE_FORMAT = "hecke3.cache"
KINDS = ("basis", "decomposition", "hecke_matrix")


# ---------------------------------------------------------------------------
# cache


@dataclass(frozen=True)
class CacheEntry:
    kind: str
    level: int
    key: str
    sha256: str
    path: Path


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


class Cache:
    def __init__(self, root: Path | str | None = None):
        if root is None:
            root = os.environ.get("HECKE3_CACHE") or Path.home() / ".cache" / "hecke3"
        self.root = Path(root)

    def path(self, kind: str, level: int, key: str) -> Path:
        if kind not in KINDS:
            raise ValueError(f"unknown cache kind {kind!r}")
        return self.root / f"{kind}-N{level}-{_sha(key)[:20]}.json"

    def load(self, kind: str, level: int, key: str) -> str | None:
        p = self.path(kind, level, key)
        if not p.exists():
            return None
        try:
            head, _, payload = p.read_text().partition("\n")
            meta = json.loads(head)
            if meta.get("format") != CACHE_FORMAT or meta.get("version") != __version__:
                raise CacheCorrupt("cache entry written by another version")
            if (meta.get("kind"), meta.get("level"), meta.get("key")) != (kind, level, key):
                raise CacheCorrupt("cache entry has a different key")
            if _sha(payload) != meta.get("sha256"):
                raise CacheCorrupt("cache payload hash mismatch")
        except (CacheCorrupt, ValueError) as exc:
            log.warning("discarding cache entry %s: %s", p, exc)
            p.unlink(missing_ok=True)
            return None
        return payload

    def store(self, kind: str, level: int, key: str, payload: str) -> CacheEntry:
        p = self.path(kind, level, key)
        p.parent.mkdir(parents=True, exist_ok=True)
        meta = {"format": CACHE_FORMAT, "version": __version__, "kind": kind, "level": level,
                "key": key, "sha256": _sha(payload)}
        tmp = p.with_suffix(".tmp")
        tmp.write_text(json.dumps(meta, sort_keys=True) + "\n" + payload)
        tmp.replace(p)
        return CacheEntry(kind, level, key, meta["sha256"], p)

    def get_or_compute(self, kind: str, level: int, key: str, compute: Callable[[], str],
                       parse: Callable[[str], object]):
        text = self.load(kind, level, key)
        if text is not None:
            try:
                return parse(text)
            except (CacheCorrupt, ValueError, KeyError) as exc:
                log.warning("cache entry for %s/%s unusable (%s); recomputing", kind, key, exc)
        text = compute()
        self.store(kind, level, key, text)
        return parse(text)


def load_basis(level: int, *, basis_path: str | None = None, cache: Cache | None = None,
               seed: int = 0) -> rs.ModelBasis:
    if basis_path:
        return rs.ModelBasis.loads(Path(basis_path).read_text(), verify=False)
    cache = cache or Cache()
    return cache.get_or_compute("basis", level, f"level={level}",
                                lambda: rs.solve_model(level, seed=seed).dumps(),
                                lambda t: rs.ModelBasis.loads(t, verify=False))


def basis_id(basis: rs.ModelBasis) -> str:
    return _sha(basis.dumps())[:16]


def cached_hecke(basis: rs.ModelBasis, cache: Cache, *, convention: str = ho.DEFAULT_CONVENTION,
                 workers: int = 1) -> Callable[[Sequence[Sequence]], ho.HeckeMatrix]:
    bid = basis_id(basis)
    N = basis.level.N

    def compute(alpha):
        key = f"alpha={ho.format_matrix(alpha)}|convention={convention}|basis={bid}"
        return cache.get_or_compute(
            "hecke_matrix", N, key,
            lambda: ho.hecke_matrix(alpha, basis, convention=convention, workers=workers).to_json(),
            ho.HeckeMatrix.from_json)
    return compute


# ---------------------------------------------------------------------------
# verification suites


def _verdict(name: str, passed: bool, **counts) -> ra.AuditResult:
    return ra.AuditResult(name, bool(passed), counts)


# dimensions of the model space, confirmed by dense exact elimination
KNOWN_DIMS = {1: 0, 2: 0, 3: 0, 4: 1, 5: 0, 6: 2, 7: 0, 8: 3, 9: 1, 10: 2,
              11: 2, 12: 7, 13: 0, 14: 4, 15: 4, 16: 6}


def suite_model(seed: int = 0, max_level: int = 16) -> list[ra.AuditResult]:
    out = []
    sizes_ok = True
    for N in range(1, 17):
        level = ps.Level(N)
        brute = {ps.normalize(x, y, z, N) for x in range(N) for y in range(N) for z in range(N)
                 if _gcd3(x, y, z, N) == 1}
        sizes_ok &= len(brute) == len(ps.enumerate_points(level)) == level.expected_size()
    out.append(_verdict("point_counts", sizes_ok, levels="1..16"))
    dims = {}
    ok = True
    for N in range(1, max_level + 1):
        basis = rs.solve_model(N, seed=seed)
        dense = cl.kernel(rs.build_relations(N))
        dims[N] = basis.dim
        ok &= basis.dim == len(dense) == KNOWN_DIMS.get(N, basis.dim)
        ok &= all(rs.check_membership(v, N) for v in basis.vectors)
    out.append(_verdict("model_dims", ok, dims=dims))
    return out


def _gcd3(x, y, z, N):
    from math import gcd
    return gcd(gcd(gcd(x, y), z), N)


def random_symbol(rng: random.Random, max_det: int = 60, entry: int = 6) -> list[list[int]]:
    while True:
        m = [[rng.randint(-entry, entry) for _ in range(3)] for _ in range(3)]
        if 1 < abs(sr.det3(m)) <= max_det:
            return m


def suite_reduce(seed: int = 0, samples: int = 100,
                 strategies: Sequence[str] = ("minmax", "minsum", "fewest")) -> list[ra.AuditResult]:
    rng = random.Random(seed)
    bases = {N: rs.solve_model(N) for N in (2, 4, 8)}
    discrepancies = 0
    steps = 0
    for _ in range(samples):
        m = random_symbol(rng)
        for N, basis in bases.items():
            vals = set()
            for s in strategies:
                trace: list = []
                sums = sr.reduce(m, s, trace=trace)
                # every step strictly lowers |det|
                for rec in trace:
                    steps += 1
                    if any(abs(d) >= abs(rec["det"]) for d in rec["subdets"]):
                        discrepancies += 1
                vals.add(tuple(sr.pairing(v, sums, N) for v in basis.vectors))
            discrepancies += len(vals) - 1
    return [_verdict("reduction_well_defined", discrepancies == 0, symbols=samples,
                     levels=[2, 4, 8], strategies=list(strategies), steps=steps,
                     discrepancies=discrepancies)]


COSET_COUNTS = {
    "diag(2,2,1)": 6, "diag(2,1,1)": 4, "lower(64)": 3, "(36,1;128,4;;4)": 48,
    "(8,1;128,8;;8)": 384, "(0,1;-128,0;;1)": 192, "central(2)": 1,
}

HAND_WRITTEN = {
    "diag(2,2,1)": ho.reps_diag221, "diag(2,1,1)": ho.reps_diag211, "lower(64)": ho.reps_lower64,
    "(36,1;128,4;;4)": ho.reps_sl2_mod4, "(8,1;128,8;;8)": ho.reps_sl2_mod8,
    "(0,1;-128,0;;1)": ho.reps_atkin_lehner,
}


def suite_cosets(seed: int = 0, level: int = 128) -> list[ra.AuditResult]:
    out = []
    counts = {}
    ok = True
    ops = dict(ho.LEVEL128_OPERATORS)
    ops["diag(3,1,1)"] = ho.ANCHOR_ALPHA
    expected = dict(COSET_COUNTS, **{"diag(3,1,1)": 13})
    for name, alpha in ops.items():
        g = ho.enumerate_decomposition(alpha, level)
        counts[name] = len(g)
        ok &= g.verified and len(g) == expected[name]
        if _supported_at(ho.mat_det(alpha), level):
            # second route: the local group at the primes of N sees the same cosets
            loc = ho.enumerate_decomposition(alpha, level, local=True)
            ok &= loc.verified and len(loc) == len(g)
    out.append(_verdict("coset_counts", ok, counts=counts))
    ok = True
    for name, make in HAND_WRITTEN.items():
        dec = ho.CosetDecomposition(ho.LEVEL128_OPERATORS[name], ps.Level(level), make(), local=True)
        ok &= ho.verify_decomposition(dec) and len(dec) == COSET_COUNTS[name]
    out.append(_verdict("hand_written_lists", ok, lists=sorted(HAND_WRITTEN)))
    # a list missing one coset must be rejected
    dec = ho.CosetDecomposition(ho.LEVEL128_OPERATORS["diag(2,2,1)"], ps.Level(level),
                                ho.reps_diag221()[:-1], local=True)
    out.append(_verdict("truncated_list_rejected", not ho.verify_decomposition(dec)))
    return out


def _supported_at(d: Fraction, level: int) -> bool:
    """Whether every prime dividing the determinant divides the level."""
    n = abs(d.numerator) * d.denominator
    for p in ps.Level(level).prime_factors:
        while n % p == 0:
            n //= p
    return n == 1


def suite_rep(seed: int = 0) -> list[ra.AuditResult]:
    return ra.run_rep_suite(seed)


SUITES = {"model": suite_model, "reduce": suite_reduce, "cosets": suite_cosets, "rep": suite_rep}


# ---------------------------------------------------------------------------
# commands


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_basis(args) -> int:
    t = time.perf_counter()
    basis = load_basis(args.level, cache=Cache(), seed=args.seed)
    text = basis.dumps()
    if args.out:
        Path(args.out).write_text(text)
    log.info("basis for N=%d ready in %.1fs", args.level, time.perf_counter() - t)
    print(json.dumps({"level": args.level, "points": len(basis.table), "dim": basis.dim,
                      "sha256": _sha(text)}, sort_keys=True))
    return 0


def cmd_cosets(args) -> int:
    alpha = ho.parse_alpha(args.alpha)
    cache = Cache()
    key = f"alpha={ho.format_matrix(alpha)}|local={args.local}"

    def parse(text):
        d = json.loads(text)
        dec = ho.CosetDecomposition(ho.parse_alpha(d["alpha"]), ps.Level(d["level"]),
                                    [ho.parse_alpha(r) for r in d["reps"]], d["verified"], d["local"])
        return dec
    dec = cache.get_or_compute("decomposition", args.level, key,
                               lambda: ho.enumerate_decomposition(alpha, args.level, local=args.local).to_json(),
                               parse)
    _emit(dec.to_json(), args.out)
    log.info("%d cosets, verified=%s", len(dec), dec.verified)
    return 0 if dec.verified else 1


def cmd_hecke(args) -> int:
    alpha = ho.parse_alpha(args.alpha)
    basis = load_basis(args.level, basis_path=args.basis, seed=args.seed)
    hm = cached_hecke(basis, Cache(), workers=args.workers)(alpha)
    poly = cl.charpoly(hm.matrix)
    roots = cl.gaussian_integer_roots(poly)
    payload = json.loads(hm.to_json())
    payload["charpoly"] = [cl.format_scalar(c) for c in poly]
    payload["gaussian_integer_roots"] = [cl.format_gauss(r) for r in roots]
    _emit(json.dumps(payload, indent=1), args.out)
    return 0


def cmd_reduce(args) -> int:
    rows = [[int(Fraction(x)) for x in r.split(",")] for r in args.symbol.replace(" ", "").split(";")]
    trace: list | None = [] if args.trace_reduction else None
    sums = sr.reduce(rows, args.strategy, trace=trace)
    payload = {"symbol": rows, "det": sr.det3(rows), "strategy": args.strategy,
               "terms": [{"matrix": [list(r) for r in m], "coefficient": c} for m, c in sorted(sums.items())]}
    if args.level:
        payload["points"] = {",".join(map(str, q)): c for q, c in sorted(sums.points(args.level).items())}
    if trace is not None:
        payload["trace"] = trace
    _emit(json.dumps(payload, indent=1), args.out)
    return 0


PSI_HEADER = ("# psi: additive character of Q_2 trivial on 2Z_2 with psi(1/2) = {psi}; "
              "sqrt(-1) is written i")


def cmd_eigenreport(args) -> int:
    basis = load_basis(args.level, basis_path=args.basis, seed=args.seed)
    compute = cached_hecke(basis, Cache(), workers=args.workers)
    report = ho.eigenreport(basis, compute=compute)
    chain = ra.lambda_chain(report, conjugate=args.conjugate_psi)
    lines = [PSI_HEADER.format(psi="-i" if args.conjugate_psi else "+i"),
             f"# level {basis.level.N}, model space dimension {basis.dim}",
             f"# anchor: eigenvector of diag(3,1,1) with eigenvalue {cl.format_gauss(report.anchor[1])}"
             " (eigenspace dimension 1)",
             "operator  alpha  cosets  eigenvalue"]
    for name, alpha, val in report.lines:
        lines.append(f"{name}  {ho.format_matrix(alpha)}  {report.coset_counts[name]}  {cl.format_gauss(val)}")
    d = chain.to_dict()
    lines.append(f"# chi(2) = {d['chi(2)']}; D = {d['D']}; Lambda([[1,1],[-2,1]]) = {d['Lambda(u)']}; "
                 f"Lambda([[0,1],[-2,0]]) = {d['Lambda(w)']}")
    _emit("\n".join(lines), args.out)
    return 0


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = 0
    for name in names:
        for res in SUITES[name](seed=args.seed):
            rec = {"suite": name, **res.to_dict()}
            print(json.dumps(rec, sort_keys=True, default=str))
            failed += not res.passed
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hecke3", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hecke3 {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, level_default: int | None = 128):
        sp.add_argument("--level", type=int, default=level_default)
        sp.add_argument("--out", default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    sp = sub.add_parser("basis", help="compute the model space basis")
    common(sp)
    sp.set_defaults(func=cmd_basis)

    sp = sub.add_parser("cosets", help="coset decomposition of a double coset")
    common(sp)
    sp.add_argument("--alpha", required=True, help="rows separated by ';', entries by ','")
    sp.add_argument("--local", action="store_true", help="use the local group at the primes of N")
    sp.set_defaults(func=cmd_cosets)

    sp = sub.add_parser("hecke", help="Hecke matrix on the model space")
    common(sp)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--basis", default=None, help="basis file written by 'basis --out'")
    sp.set_defaults(func=cmd_hecke)

    sp = sub.add_parser("reduce", help="reduce a modular symbol to unimodular symbols")
    common(sp, level_default=None)
    sp.add_argument("--symbol", required=True, help="rows of the symbol, ';'-separated")
    sp.add_argument("--strategy", default="minmax", choices=sorted(sr.STRATEGIES))
    sp.add_argument("--trace-reduction", action="store_true", help="include the recursion tree")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("eigenreport", help="eigenvalues of the level-128 operators on the anchor")
    common(sp)
    sp.add_argument("--basis", default=None)
    sp.add_argument("--conjugate-psi", action="store_true", help="use the character with psi(1/2) = -i")
    sp.set_defaults(func=cmd_eigenreport)

    sp = sub.add_parser("verify", help="run property suites")
    common(sp)
    sp.add_argument("--suite", default="all", choices=[*SUITES, "all"])
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except Hecke3Error as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 2
    except ValueError as exc:
        log.error("invalid input: %s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
