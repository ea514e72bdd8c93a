import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    _criteria[number] = (title, call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {title}")


@pytest.fixture
def bell():
    from discordlab import bell_state

    return bell_state(0).density()


@pytest.fixture
def classical_corr():
    """½(|00⟩⟨00| + |11⟩⟨11|)."""
    from discordlab import DensityOperator

    return DensityOperator((2, 2), np.diag([0.5, 0, 0, 0.5]))


def random_hermitian(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z + z.conj().T) / 2
