from fractions import Fraction as F

import pytest

from arnold_cat.potential import from_raw_coefficients
from arnold_cat.spectral import GridSpec, solve

# triple well with couplings c1 = -61/25, c3 = 36/25 and Lambda^2 = 1/36
FIG1_RAW = [F(-61, 25), 0, F(36, 25), 0]
FIG1_LAMBDA_SQ = F(1, 36)


@pytest.fixture(scope="session")
def fig1_potential():
    return from_raw_coefficients(FIG1_RAW, FIG1_LAMBDA_SQ)


@pytest.fixture(scope="session")
def fig1_result(fig1_potential):
    return solve(fig1_potential, GridSpec(2.2, 8001), 7)


# -- acceptance reporting ----------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """``acceptance(k, ok, detail)`` records one criterion line."""

    def record(k, ok, detail):
        _ACCEPTANCE[k] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
