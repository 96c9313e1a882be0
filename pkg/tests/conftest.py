import numpy as np
import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    """Log one PASS/FAIL line for an acceptance criterion, shown in the terminal summary."""

    def _record(label, ok, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return _record


@pytest.fixture
def rng():
    return np.random.default_rng(20191016)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_density_matrix(rng, dim=2):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
