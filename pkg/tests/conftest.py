"""Shared fixtures and the acceptance summary printed after the run."""

import pytest

ACCEPTANCE_CRITERIA = {
    1: "coefficient triple agreement",
    2: "known specializations",
    3: "spectral identities",
    4: "singularity theorems",
    5: "ACVF dual route and Toeplitz PSD",
    6: "Monte Carlo ACVF",
    7: "seasonal long memory ratios",
    8: "pole visibility in periodogram",
    9: "four-family simulation sanity",
    10: "CLI determinism",
}

_results: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Return ``record(criterion, passed, detail)`` for the summary table."""

    def record(criterion: int, passed: bool, detail: str = "") -> bool:
        _results[criterion] = (bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k, name in ACCEPTANCE_CRITERIA.items():
        if k in _results:
            ok, detail = _results[k]
            tr.write_line(f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail}")
        else:
            tr.write_line(f"criterion {k:2d} FAIL  {name}: not run or errored before recording")
