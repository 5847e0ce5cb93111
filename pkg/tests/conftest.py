import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_ket(d, rng):
    g = rng.standard_normal((d, 2))
    v = g[:, 0] + 1j * g[:, 1]
    return v / np.linalg.norm(v)


ACCEPTANCE_LINES = []


def record_acceptance(label, passed, detail=""):
    ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
