import numpy as np
import pytest

from npcmi import parametric


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def gauss05_sample():
    return parametric.rosenblatt_sample(parametric.CopulaSpec.gaussian(0.5), 1024, 7)


# one verdict line per acceptance criterion, repeated in the terminal summary
_VERDICTS = {}
ACCEPTANCE_CRITERIA = range(1, 11)


@pytest.fixture
def verdict():
    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _VERDICTS[number] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in ACCEPTANCE_CRITERIA:
        terminalreporter.write_line(_VERDICTS.get(number, f"criterion {number:>2}: FAIL  no verdict recorded"))
