import pytest

from slg import fixtures

ACCEPTANCE = {}


@pytest.fixture
def g0():
    return fixtures.g0()


@pytest.fixture
def corpus3():
    return [fixtures.d1(), fixtures.d2(), fixtures.d3()]


@pytest.fixture
def p1():
    return fixtures.g0_params()


def record_acceptance(n, ok, detail):
    ACCEPTANCE[n] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line("criterion %2d: %s  %s" % (n, "PASS" if ok else "FAIL", detail))
