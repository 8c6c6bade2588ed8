import numpy as np
import pytest

from smallbackups.model import ModelEstimate

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_successor_model():
    """State-keyed model with P-hat(0 -> 1) = 0.3, P-hat(0 -> 2) = 0.7 and R-hat(0) = 1."""
    m = ModelEstimate(3)
    for _ in range(3):
        m.record_transition(0, None, 1.0, 1)
    for _ in range(7):
        m.record_transition(0, None, 1.0, 2)
    return m


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
