import sys
from pathlib import Path

import pytest

from gazner.lexicon import load_gazetteer
from gazner.morphology import load_lemma_table

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))


def read_lines(name: str) -> list[str]:
    return (DATA / name).read_text(encoding="utf-8").splitlines()


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def dfki_table():
    return load_lemma_table(read_lines("dfki_lemmas.txt"))


@pytest.fixture(scope="session")
def dfki_table_prp():
    """Same table with prepositions accepted, so "für" has exactly one form."""
    return load_lemma_table(read_lines("dfki_lemmas.txt"), {"ADJ", "SUB", "PRP"})


@pytest.fixture(scope="session")
def dfki_gazetteer():
    return load_gazetteer(read_lines("dfki_gazetteer.tsv"))


# one line per acceptance criterion, printed after the run
ACCEPTANCE: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
