import pytest

from fel.precision import PrecisionContext

# acceptance criteria outcomes, printed as one line each at session end
_ACCEPTANCE: list = []


def record_criterion(name: str, passed: bool, detail: str = ""):
    _ACCEPTANCE.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        line = "%s  criterion %s" % (status, name)
        if detail:
            line += "  [%s]" % detail
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ctx40():
    return PrecisionContext.make(40)


@pytest.fixture(scope="session")
def ctx30():
    return PrecisionContext.make(30)
