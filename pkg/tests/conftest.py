import sys
from pathlib import Path

import pytest

from clg.cli import _bundled
from clg.morphlex import load_lexicon
from clg.termbase import load_termbase

sys.path.insert(0, str(Path(__file__).parent))

LEXICON_PATH = _bundled("lexicon.tsv")
TERMBASE_PATH = _bundled("termbase.tsv")


@pytest.fixture(scope="session")
def lex():
    return load_lexicon(LEXICON_PATH)


@pytest.fixture(scope="session")
def tb():
    return load_termbase(TERMBASE_PATH)


def wrap(path: str, text: str) -> str:
    """XML document with ``text`` nested inside the elements of ``path``."""
    names = path.split("/")
    opening = "".join(f"<{n}>" for n in names)
    closing = "".join(f"</{n}>" for n in reversed(names))
    return f"<module>{opening}{text}{closing}</module>"


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
