import pytest

from weblin.mpnum import precision


@pytest.fixture(autouse=True)
def bits256():
    with precision(256):
        yield


def pytest_terminal_summary(terminalreporter):
    from cases import ACCEPTANCE
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
