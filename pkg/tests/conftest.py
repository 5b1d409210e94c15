from pathlib import Path

import pytest

from eagertest.java_model import extract_test_cases, parse_sources

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "fixtures" / "golden"
GOLDEN_TESTS = GOLDEN / "test"
GOLDEN_SRC = GOLDEN / "src"


@pytest.fixture(scope="session")
def golden_model():
    return parse_sources([(GOLDEN_SRC, "production"), (GOLDEN_TESTS, "test")])


@pytest.fixture(scope="session")
def golden_cases(golden_model):
    return {tc.method.name: tc for tc in extract_test_cases(golden_model)}


def model_from(tmp_path, files: dict, tags: dict | None = None):
    """Write ``{relative path: source}`` and parse; top dir name is the tag."""
    roots = set()
    for rel, text in files.items():
        p = tmp_path / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)
        roots.add(rel.split("/")[0])
    tags = tags or {"src": "production", "test": "test"}
    return parse_sources([(tmp_path / r, tags[r]) for r in sorted(roots)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
