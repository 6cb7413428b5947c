import pytest

from so8lab.matgroup import build_g3_generators, build_g8_generators, close_group

# acceptance outcomes, filled by test_acceptance.py and echoed in the terminal summary
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def g3_groups():
    return {m: close_group(build_g3_generators(m)) for m in (3, 5, 7, 9)}


@pytest.fixture(scope="session")
def g8_groups():
    return {ell: close_group(build_g8_generators(ell)) for ell in (1, 2, 3)}


@pytest.fixture(scope="session")
def g33(g3_groups):
    return g3_groups[3]


@pytest.fixture(scope="session")
def g81(g8_groups):
    return g8_groups[1]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
