import numpy as np
import pytest

from srse3.controls import InitialMomentum


def case_i_momentum(rng) -> InitialMomentum:
    u1, u2, u3 = rng.uniform(-2, 2, 3)
    return InitialMomentum(u1, u2, u3, u2, -u1)


def case_ii_momentum(rng) -> InitialMomentum:
    u1, u2, u3 = rng.uniform(-2, 2, 3)
    return InitialMomentum(u1, u2, u3, -u2, u1)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Append one ``PASS``/``FAIL`` line per criterion; echoed in the terminal summary."""

    def record(label: str, passed: bool, detail: str) -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
