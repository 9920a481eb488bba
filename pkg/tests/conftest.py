from __future__ import annotations

import os
from pathlib import Path

import pytest
from hypothesis import settings

from hecke3 import cli

# exact arithmetic on first-touch tables is slow; deadlines only add noise
settings.register_profile("hecke3", deadline=None, max_examples=60)
settings.load_profile("hecke3")

# acceptance verdicts collected by test_acceptance.py, printed at the end of the run
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(number: int, title: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = (title, passed, detail)
    print(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}: {title} {detail}".rstrip())


@pytest.fixture(scope="session")
def cache(request) -> cli.Cache:
    root = os.environ.get("HECKE3_CACHE")
    if not root:
        root = Path(request.config.cache.mkdir("hecke3"))
    return cli.Cache(root)


@pytest.fixture(scope="session")
def basis128(cache):
    return cli.load_basis(128, cache=cache)


@pytest.fixture(scope="session")
def hecke128(basis128, cache):
    return cli.cached_hecke(basis128, cache, workers=os.cpu_count() or 1)


@pytest.fixture(scope="session")
def report128(basis128, hecke128):
    from hecke3 import heckeops as ho
    return ho.eigenreport(basis128, compute=hecke128)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2} {'PASS' if ok else 'FAIL'}: {title} {detail}".rstrip())
