from __future__ import annotations

from functools import lru_cache

import pytest

from thetablocks.blocks import lattice_block
from thetablocks.lifts import quotient_psi

CRITERIA: dict[str, tuple[bool, str]] = {}


def record(label: str, ok: bool, detail: str = ""):
    CRITERIA[label] = (ok, detail)


@lru_cache(maxsize=None)
def block(name: str, qprec) -> object:
    return lattice_block(name, qprec)


@lru_cache(maxsize=None)
def psi_of(name: str, theta_prec) -> object:
    return quotient_psi(block(f"theta{name}", theta_prec))


@pytest.fixture
def cached_block():
    return block


@pytest.fixture
def cached_psi():
    return psi_of


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, (ok, detail) in sorted(CRITERIA.items(), key=lambda kv: [int(x) if x.isdigit() else x for x in kv[0].replace(".", " ").split()]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else ""))
