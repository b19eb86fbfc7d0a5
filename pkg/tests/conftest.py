from pathlib import Path

import pytest

from gramgen.grammar import load_grammar

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def table1_path():
    return FIXTURES / "table1_grammar.txt"


@pytest.fixture
def table1(table1_path):
    return load_grammar(table1_path)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
