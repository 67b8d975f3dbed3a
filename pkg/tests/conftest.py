import pytest

from firmfrob.families import gen_grouplike, gen_nil, gen_trunc_poly
from firmfrob.fields import GF, QQ


@pytest.fixture(scope="session")
def g2q():
    return gen_grouplike(2, QQ)


@pytest.fixture(scope="session")
def dual2():
    return gen_trunc_poly(QQ)


@pytest.fixture(scope="session")
def nil():
    return gen_nil(QQ)


@pytest.fixture(scope="session")
def gf5():
    return GF(5)


ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n = mark.args[0]
    ok = ACCEPTANCE.get(n, True) and not rep.failed
    ACCEPTANCE[n] = ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ACCEPTANCE[n] else 'FAIL'}")
