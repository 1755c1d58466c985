import warnings

import numpy as np
import pytest

warnings.filterwarnings("ignore", category=RuntimeWarning)


@pytest.fixture(scope="session")
def sp04():
    from shockcert.evans_system import SpectralParams

    return SpectralParams()


@pytest.fixture(scope="session")
def prof04():
    from shockcert.profile import ProfileParams, solve_profile

    return solve_profile(ProfileParams())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = []


@pytest.fixture(scope="session")
def report():
    """Record one acceptance line: report(number, ok, detail)."""

    def add(num, ok, detail):
        ACCEPTANCE.append((num, bool(ok), detail))
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")

    return add


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
