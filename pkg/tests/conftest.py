import pytest

from qmrel import relations as rel
from qmrel.groebner import sp4_basis
from qmrel.polyring import VarTable
from qmrel.symmat import X_NAMES


@pytest.fixture(scope="session")
def xvt():
    return VarTable(X_NAMES)


@pytest.fixture(scope="session")
def gb_x(xvt):
    return sp4_basis(xvt)


@pytest.fixture(scope="session")
def gb_x_lex(xvt):
    return sp4_basis(xvt, "lex")


@pytest.fixture(scope="session")
def rvt():
    return rel.relation_table()


@pytest.fixture(scope="session")
def gb_rel():
    return rel.default_basis()


_CRITERIA = {}


def pytest_runtest_logreport(report):
    mark = report.keywords.get("criterion") if hasattr(report, "keywords") else None
    if mark is None or report.when not in ("setup", "call"):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.failed or report.when == "call":
        _CRITERIA.setdefault(name, "FAIL" if report.failed else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"{verdict}  {name}")
