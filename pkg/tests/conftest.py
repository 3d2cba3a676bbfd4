"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

from pathlib import Path

import pytest

from equiresolve.algebra import poly_ring

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict = {}


@pytest.fixture
def R2():
    return poly_ring(["x", "y"])


@pytest.fixture
def R3():
    return poly_ring(["x", "y", "z"])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
