from pathlib import Path

import pytest

from termweave.registry import load_default
from termweave.xml_io import parse

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def registry():
    return load_default()


@pytest.fixture
def figure3():
    return parse((FIXTURES / "figure3.xml").read_bytes(), source_name="figure3.xml").document


def load(name: str):
    """Parse a fixture and return the result (document plus diagnostics)."""
    return parse((FIXTURES / name).read_bytes(), source_name=name)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
