from __future__ import annotations

import pytest

from kg1d import curve, make_model


@pytest.fixture(scope="session")
def params():
    return make_model()


@pytest.fixture(scope="session")
def special_v1(params):
    return curve.special_points(params, "v1")


@pytest.fixture(scope="session")
def special_v2(params):
    return curve.special_points(params, "v2")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
