import pytest

from sparse_series.algebraic import build_field


@pytest.fixture(scope="session")
def Q2():
    return build_field([-2, 1])


@pytest.fixture(scope="session")
def silver():
    # q = 1 + sqrt(2)
    return build_field("x^2-2x-1")


@pytest.fixture(scope="session")
def lehmer():
    return build_field("x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1")


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" in report.nodeid and report.when == "call":
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome
    elif "test_acceptance.py::" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    grouped = {}
    for name, outcome in _ACCEPTANCE.items():
        key = name.split("[")[0]
        grouped[key] = grouped.get(key, True) and outcome == "passed"
    for key in sorted(grouped):
        num = key.split("_")[2]
        status = "PASS" if grouped[key] else "FAIL"
        terminalreporter.write_line(f"criterion {int(num)}: {status}  ({key})")
