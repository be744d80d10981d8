from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from xcavity.materials import default_db  # noqa: E402
from xcavity.stack import CavityStack  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]

CRITERIA: list[str] = []


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERIA.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


FIG3 = [("Pt", 80.4), ("C", 46.0), ("Fe-57", 0.574), ("C", 46.1), ("Pt", 17.8)]
FIG4 = [("Pt", 2.7), ("C", 45.7), ("Fe-57", 0.57), ("C", 46.1), ("Pt", 307.3)]
FIG5 = [("C", 80.1), ("Fe-57", 0.574), ("C", 102.6), ("Pt", 17.6)]


@pytest.fixture(scope="session")
def db():
    return default_db()


@pytest.fixture(scope="session")
def fig3():
    return CavityStack.from_spec(FIG3, "Si", 2)


@pytest.fixture(scope="session")
def fig4():
    return CavityStack.from_spec(FIG4, "Si", 2)


@pytest.fixture(scope="session")
def fig5():
    return CavityStack.from_spec(FIG5, "Si", 1)
