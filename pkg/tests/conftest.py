import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from subshift import kernels  # noqa: E402

ACCEPTANCE_LINES: list = []


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    """Run the test once per available kernel backend."""
    before = kernels.backend_name()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(before)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
