import pytest

from cyclolrs.lrs import ParamLRS, specialize


def gaussian_family():
    # f = (1, 1), alpha = (X + 3, X + 1)
    return ParamLRS.from_coefficients([[1], [1]], [[3, 1], [1, 1]])


def tied_family():
    return ParamLRS.from_coefficients([[1], [1]], [[2, 1], [1, 2]])


def three_term_family():
    return ParamLRS.from_coefficients([[1], [1], [1]], [[4, 1], [2, 1], [1, 1]])


@pytest.fixture(scope="session")
def L1():
    return gaussian_family()


@pytest.fixture(scope="session")
def L1_at_1(L1):
    return specialize(L1, 1, 1)


@pytest.fixture(scope="session")
def L1_at_i(L1):
    return specialize(L1, 4, 1)


@pytest.fixture(scope="session")
def L3_at_1():
    return specialize(three_term_family(), 1, 1)


ACCEPTANCE: list[str] = []


def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
