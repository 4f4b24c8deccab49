import numpy as np
import pytest

from needlet_density import build_window

# (criterion number, title, passed, detail) rows collected by the acceptance module
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def window():
    return build_window()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unit(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}: {detail}")
