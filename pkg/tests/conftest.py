import numpy as np
import pytest


def exact_uniform_gamma_cr(M, u, w=1.0):
    """Independent oracle for the uniform-gain edge EP.

    With {S, H} = 0 the PT chain squares to H^2 - gamma^2, so the edge pair
    turns imaginary exactly when gamma reaches the smallest |E| of the
    Hermitian chain.
    """
    v = w / u
    hops = np.array([v if m % 2 == 0 else w for m in range(M - 1)])
    H = np.diag(hops, 1) + np.diag(hops, -1)
    return float(np.min(np.abs(np.linalg.eigvalsh(H))))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion for the run summary."""

    def record(label: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
