import pytest
from hypothesis import settings

from delayloop.tuning import reproduce_table1

settings.register_profile("repo", deadline=None, max_examples=30)
settings.load_profile("repo")

#: criterion number -> (passed, detail); filled by test_acceptance.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def table1_rows():
    return reproduce_table1()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
