import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

ROOT = pathlib.Path(__file__).parent.parent


@pytest.fixture(scope="session")
def corpus_dir():
    return ROOT / "programs" / "corpus"


@pytest.fixture(scope="session")
def golden_dir():
    return ROOT / "programs" / "golden"


# One summary line per acceptance criterion, printed after the run so the
# pass/fail verdicts survive in plain `pytest -v` output.

_CRITERIA = [
    ("golden listings reproduce their stated values", "test_acceptance.py::test_golden_listing_suite"),
    ("box laundering checked via the oracle", "test_acceptance.py::test_box_laundering_via_oracle"),
    ("projection equivalence over corpus and random programs", "test_acceptance.py::test_projection_equivalence_corpus_and_random"),
    ("laziness sentinels never fire", "test_acceptance.py::test_laziness_sentinels"),
    ("canonical form and pc consistency property suites", "test_acceptance.py::test_canonical_form_and_pc_property_suites"),
    ("raw-write mutation caught by the oracle corpus", "test_acceptance.py::test_laundering_mutation_detected"),
    ("battleship service end to end", "test_acceptance.py::test_battleship_service_end_to_end"),
]

_outcomes = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for _, suffix in _CRITERIA:
        if report.nodeid.endswith(suffix):
            _outcomes[suffix] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance")
    for title, suffix in _CRITERIA:
        outcome = _outcomes.get(suffix, "not run")
        verdict = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line("%s: %s" % (title, verdict))
