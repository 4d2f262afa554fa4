from pathlib import Path

import pytest

from reqlens.model import build_model
from reqlens.parser import parse_file, parse_text

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
DATA = Path(__file__).resolve().parent / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"
CORPUS_FILES = sorted(CORPUS.glob("*.rsl"))


def load(*paths):
    classes, problems = [], []
    for p in paths:
        c, d = parse_file(p)
        classes += c
        problems += d
    return classes, problems


def model_of(text, *extra):
    """Model built from ``text`` plus already parsed classes."""
    classes, problems = parse_text(text, "<test>")
    assert not [d for d in problems if d.severity.value == "error"], problems
    return build_model(list(extra) + classes)


@pytest.fixture(scope="session")
def corpus_classes():
    classes, _ = load(*CORPUS_FILES)
    return classes


@pytest.fixture(scope="session")
def corpus_model(corpus_classes):
    return build_model(corpus_classes)


@pytest.fixture(scope="session")
def flag_model(corpus_classes):
    classes, _ = load(DATA / "flag_drivers.rsl")
    return build_model(corpus_classes + classes)


ACCEPTANCE: dict = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(ACCEPTANCE.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
